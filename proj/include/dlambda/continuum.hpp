#pragma once

#include "dlambda/determining.hpp"
#include "dlambda/expr.hpp"

#include <string>
#include <vector>

namespace dlambda {

/// Vector field xi(x,u) d/dx + phi(x,u) d/du on continuous variables.
struct ContinuousVectorField {
    Expr xi;
    Expr phi;
};

/// Jet variable u_k as a continuous variable: u, u1, u2, ...
Expr jet_var(int k);

/// Total derivative on jet expressions: d/dx + sum u_{k+1} d/du_k.
Expr total_derivative(const Expr& e);

/// Coefficients of the deformed prolongation: the k-th entry carries
/// d/du_k, built by the recursion
///   q_{k+1} = (D_x + lam) q_k - u_{k+1} (D_x + lam) xi,  q_0 = phi.
/// lam = 0 degenerates to the classical prolongation.
std::vector<Expr> continuous_lambda_prolong(const ContinuousVectorField& vf, const Expr& lam,
                                            int order);

/// ODE u_m = f(x, u, u1, ..., u_{m-1}).
struct OdeSystem {
    int order;
    Expr f;
};

/// Invariance of the ODE under the deformed prolongation, on shell:
/// symbolic verdict plus sampling, mirroring the discrete check.
CheckReport check_ode_lambda_symmetry(const OdeSystem& ode, const ContinuousVectorField& vf,
                                      const Expr& lam, const SampleBox& box, double tol);

struct ConvergenceReport {
    std::vector<double> h_values;
    std::vector<double> errors;     // E(h) per level
    std::vector<double> ratios;     // E(h_i) / E(h_{i+1})
    bool exact = false;             // all E below the exactness floor
    bool monotone = true;
    bool pass = false;
    std::string detail;
};

struct LimitOptions {
    std::vector<double> h_values = {0.1, 0.05, 0.025, 0.0125};
    double ratio_lo = 1.6, ratio_hi = 2.4;
    double exact_floor = 1e-12;
    int samples = 64;
    uint64_t seed = 20260808;
    double box_lo = 0.25, box_hi = 1.0; // sampling range for x, u, u1
};

/// Finite-h two-point prolongation against its h->0 coefficient
/// (D_x+lam)phi - u1 (D_x+lam)xi, sampled over (x, u, u1). Requires chi
/// consistent with lam to first order in h (checked symbolically via the
/// Taylor coefficients at h = 0). First-order convergence passes when every
/// ratio sits inside [ratio_lo, ratio_hi]; exact degeneration passes when
/// every error is below the floor.
ConvergenceReport continuum_limit_check(const ContinuousVectorField& vf, const Expr& chi,
                                        const Expr& lam, const LimitOptions& opts = {});

} // namespace dlambda
