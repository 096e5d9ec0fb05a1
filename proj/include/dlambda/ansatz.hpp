#pragma once

#include "dlambda/determining.hpp"
#include "dlambda/normal_form.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlambda {

/// Polynomial templates for the multiplier (and optionally phi) with fresh
/// unknown coefficient parameters c0..cd (p0..pd for phi).
struct Ansatz {
    Expr chi_template;
    Expr phi_template; // literal 1 unless with_phi
    std::vector<std::string> unknowns;
    int degree = 0;
    int phi_degree = -1; // -1 = phi fixed to 1
};

struct AnsatzOptions {
    int max_degree = 3;
    bool with_phi = false;
    int phi_degree = 0;
};

Ansatz build_ansatz(int degree, const AnsatzOptions& opts = {});

/// Polynomial equations in the unknown coefficients, one per monomial in the
/// window variables of the cleared determining residual.
struct CoefficientSystem {
    std::vector<Poly> equations;      // over the shared atom id space
    std::vector<Expr> atoms;          // id -> atom
    std::vector<int> unknown_ids;     // ids of unknown coefficient atoms
    std::vector<int> param_ids;       // ids of non-unknown parameter atoms (h, ...)
    std::vector<std::string> unknown_names;
    std::vector<std::string> trace;   // originating window monomial per equation
    bool sampled_mode = false;

    bool affine() const;
};

/// Collects the cleared residual numerator by window monomials. With
/// force_sampled the window variables are instantiated at random points
/// instead (3 equations per unknown), which sidesteps monomial collection;
/// solutions from either route are re-verified downstream. An unknown
/// trapped inside an opaque atom (e.g. exp(c0*u[0])) makes the system
/// non-polynomial and is rejected.
CoefficientSystem extract_coefficient_system(const DeterminingExpression& det,
                                             const std::vector<std::string>& unknown_names,
                                             const SampleBox& box, bool force_sampled = false);

/// One verified assignment of the unknowns.
struct CoefficientAssignment {
    bool exact = false;              // true: values are rational functions of params
    std::vector<Expr> values;        // aligned with system.unknown_names
    std::vector<double> numeric;     // numeric view (params at their box values)
    int free_count = 0;              // unknowns unconstrained by the system (pinned to 0)
};

struct SolveOptions {
    int newton_starts = 32;
    int newton_max_iter = 200;
    uint64_t seed = 20260808;
    double dedup_distance = 1e-8;
    double param_default = 0.1;      // numeric value for instantiated params (h)
    std::map<std::string, double> param_values;
};

/// Exact solving first (linear elimination with quadratic branching over the
/// parameter field), multi-start damped Newton on the numeric instantiation
/// when the exact path cannot finish. Every returned assignment re-verifies
/// against the system; sorted lexicographically by numeric values.
std::vector<CoefficientAssignment> solve_coefficient_system(const CoefficientSystem& sys,
                                                            const SolveOptions& opts = {});

struct LambdaSymmetry {
    Expr phi;
    Expr chi;
    Expr lambda;
    bool exact = false;
    CheckReport report;
};

struct FindOptions {
    AnsatzOptions ansatz;
    SolveOptions solve;
    double tol = 1e-10;
    SampleBox box; // sampling domain for verification
};

/// End-to-end search: ansatz -> determining residual -> coefficient system
/// -> solve -> verify. Only assignments whose CheckReport passes are
/// returned; an empty list means none found up to the requested degree.
std::vector<LambdaSymmetry> find_lambda_symmetry(Scheme& s, int degree, FindOptions opts);

} // namespace dlambda
