#pragma once

#include "dlambda/prolong.hpp"
#include "dlambda/scheme.hpp"

#include <optional>
#include <string>

namespace dlambda {

/// Invariant of the lambda-prolonged field with phi = 1: v = u[1] - P(u[0])
/// where P is the antiderivative of chi (zero constant term).
struct InvariantForm {
    Expr antiderivative; // P(u[0])
    Expr v;              // u[1] - P(u[0])
};

/// Term-wise antiderivative of a chi polynomial in u[0]; function-symbol
/// atoms integrate by lowering the derivative order (f'[0](u[0]) -> f[0]).
/// Throws ExprError on a non-integrable atom.
Expr antiderivative(const ChiMultiplier& chi);

/// Builds the invariant and verifies that the prolonged field annihilates
/// it (symbolically; a failure is a hard error).
InvariantForm invariant(const ChiMultiplier& chi);

/// First-order map the invariant reduces the scheme to.
struct ReducedMap {
    Expr map;            // R as an expression in the single variable v (and h)
    bool symbolic = true; // false = fitted numerically and then verified
    int degree = 0;
};

/// Rewrite the two-point invariant evaluated on-shell as a function of its
/// backward shift: exact linear-algebra rewriting first, polynomial
/// least-squares fit on trajectories as the fallback. Throws SchemeError
/// ("not reducible...") when both fail.
ReducedMap reduce_order(const Scheme& s, const InvariantForm& inv);

struct VerificationReport {
    int trials = 0;
    int steps = 0;
    double tol = 0.0;
    double max_deviation = 0.0;
    long points_checked = 0;
    long points_skipped = 0;  // outside the numeric verification window
    int divergent = 0;        // trajectories truncated by blow-up
    enum class Verdict { Pass, Fail, Inconclusive } verdict = Verdict::Inconclusive;

    bool pass() const { return verdict == Verdict::Pass; }
};

struct VerifyOptions {
    int trials = 20;
    int steps = 100;
    double tol = 1e-10;
    double init_lo = 0.0, init_hi = 1.0;
    double h_value = 0.1;        // used when the lattice spacing is symbolic
    double value_cap = 100.0;    // window values beyond this are not checked
    uint64_t seed = 20260808;
};

/// Iterate random trajectories and compare v_{n+1} against R(v_n) wherever
/// the window values stay inside the numeric verification cap. Trajectories
/// contributing no checkable point count as divergent; no checkable point at
/// all yields Inconclusive.
VerificationReport verify_reduction(const Scheme& s, const InvariantForm& inv,
                                    const ReducedMap& r, const VerifyOptions& opts = {});

/// v_n along a trajectory (index n pairs u_n, u_{n+1}).
std::vector<double> invariant_series(const InvariantForm& inv, const Trajectory& t);

} // namespace dlambda
