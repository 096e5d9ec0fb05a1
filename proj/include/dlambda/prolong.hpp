#pragma once

#include "dlambda/expr.hpp"
#include "dlambda/scheme.hpp"

#include <map>

namespace dlambda {

/// Vector field on a single lattice point: coefficients of d/dx[0] and
/// d/du[0], each an expression in (x[0], u[0]); eta is the optional
/// coefficient on the potential direction and may span several points.
struct DiscreteVectorField {
    Expr xi;
    Expr phi;
    std::optional<Expr> eta;

    DiscreteVectorField(Expr xi_, Expr phi_) : xi(std::move(xi_)), phi(std::move(phi_)) {
        check_point_field(xi, "xi");
        check_point_field(phi, "phi");
    }

  private:
    static void check_point_field(const Expr& e, const char* which);
};

/// The multiplier chi(u[0]) = e^{h*lambda(u[0])}; the rational carrier of a
/// discrete lambda-symmetry. lambda is recovered as log(chi)/h on demand.
struct ChiMultiplier {
    Expr chi;

    explicit ChiMultiplier(Expr c) : chi(std::move(c)) {
        Stencil st = stencil(chi);
        if (st.has_lattice && (st.lo != 0 || st.hi != 0))
            throw ExprError("chi must depend on the base point only");
        if (is_zero(normalize(chi)))
            throw ExprError("chi must not be identically zero");
    }

    /// lambda = log(chi)/h.
    Expr lambda() const { return div(logf(chi), param("h")); }

    static ChiMultiplier identity() { return ChiMultiplier(num(1)); }
    static ChiMultiplier from_lambda(const Expr& lam);
};

/// exp(w[n+k] - w[n]) as a product of shifted chi factors: the weight the
/// lambda-prolongation puts on the point at offset k.
Expr potential_weight(const ChiMultiplier& chi, int k);

/// Prolonged field on the window [-a, b]: per-offset coefficient pair.
struct ProlongedField {
    int a = 0, b = 0;
    struct Coeff {
        Expr xi, phi;
    };
    std::map<int, Coeff> coeffs;
};

/// Weighted prolongation: offset k carries W(k)*shift(phi,k) on d/du[k] and
/// W(k)*shift(xi,k) on d/dx[k]. chi = 1 degenerates to the standard
/// discrete prolongation. weight_xi=false leaves the d/dx coefficients
/// unweighted (the two conventions agree on every fixed-lattice example,
/// where xi = 0).
ProlongedField lambda_prolong(const DiscreteVectorField& vf, const ChiMultiplier& chi, int a,
                              int b, bool weight_xi = true);

/// Apply the prolonged field to an expression with stencil inside [-a, b];
/// result is normalized.
Expr apply_field(const ProlongedField& p, const Expr& e);

} // namespace dlambda
