#pragma once

#include "dlambda/prolong.hpp"
#include "dlambda/scheme.hpp"

#include <string>
#include <vector>

namespace dlambda {

/// On-shell determining residual: the prolonged field applied to the scheme
/// equation with the leading variable eliminated through the solved form.
struct DeterminingExpression {
    Expr residual; // normalized, contains no u[b]
    std::string scheme_name;
    std::string phi_printed, chi_printed;
};

DeterminingExpression determining_expression(const Scheme& s, const DiscreteVectorField& vf,
                                             const ChiMultiplier& chi);

enum class SymbolicVerdict { Zero, Nonzero, Undecided };

const char* to_string(SymbolicVerdict v);

struct CheckReport {
    std::string scheme_name;
    SymbolicVerdict symbolic = SymbolicVerdict::Undecided;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    int samples = 0;
    uint64_t seed = 0;
    double tol = 0.0;
    bool pass = false;
};

/// Symbolic verdict first, numeric sampling alongside; passes iff the
/// residual normalizes to zero or the sampled maximum stays within tol.
CheckReport check_symmetry(const Scheme& s, const DiscreteVectorField& vf,
                           const ChiMultiplier& chi, const SampleBox& box, double tol);

/// Default sampling domain for a scheme: u[k], x[k] in [lo, hi] across the
/// stencil, h fixed (used only when the lattice spacing is symbolic), plus
/// the scheme's builtin function evaluators.
SampleBox make_default_box(const Scheme& s, double h_value = 0.1, double lo = 0.25,
                           double hi = 1.0);

/// Residual of the compatibility equation the eta component must satisfy on
/// a uniform lattice, as an expression (exp kept atomic):
///   e^{h lam}(S eta - S xi * lam) - (eta - xi*lam) + h(xi*lam_x + phi*lam_u)
/// where S is the unit forward shift and lam = lam(x[0], u[0]).
Expr eta_residual(const DiscreteVectorField& vf, const Expr& eta, const Expr& lam);

/// Forward propagation of eta values along a trajectory via the first-order
/// recursion the compatibility equation defines. Throws EvalError when
/// e^{h lam} degenerates numerically at some step.
std::vector<double> eta_propagate(double eta0, const DiscreteVectorField& vf, const Expr& lam,
                                  const Trajectory& t);

} // namespace dlambda
