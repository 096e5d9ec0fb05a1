#include "dlambda/prolong.hpp"

#include "dlambda/normal_form.hpp"

namespace dlambda {

void DiscreteVectorField::check_point_field(const Expr& e, const char* which) {
    Stencil st = stencil(e);
    if (st.has_lattice && (st.lo != 0 || st.hi != 0))
        throw ExprError(std::string(which) + " must depend on (x[0], u[0]) only");
}

ChiMultiplier ChiMultiplier::from_lambda(const Expr& lam) {
    // chi = exp(h*lambda); normalize first so rational lambda of the form
    // log(.)/h collapses back to its rational chi
    return ChiMultiplier(expf(normalize(mul(param("h"), lam))));
}

Expr potential_weight(const ChiMultiplier& chi, int k) {
    if (k == 0)
        return num(1);
    std::vector<Expr> factors;
    if (k > 0) {
        for (int i = 0; i < k; ++i)
            factors.push_back(shift(chi.chi, i));
        return mul(std::move(factors));
    }
    for (int i = 0; i < -k; ++i)
        factors.push_back(shift(chi.chi, -i - 1));
    return powi(mul(std::move(factors)), -1);
}

ProlongedField lambda_prolong(const DiscreteVectorField& vf, const ChiMultiplier& chi, int a,
                              int b, bool weight_xi) {
    if (a < 0 || b < 0)
        throw ExprError("lambda_prolong: window bounds must be non-negative");
    ProlongedField p;
    p.a = a;
    p.b = b;
    for (int k = -a; k <= b; ++k) {
        Expr w = potential_weight(chi, k);
        p.coeffs[k] = {weight_xi ? mul(w, shift(vf.xi, k)) : shift(vf.xi, k),
                       mul(w, shift(vf.phi, k))};
    }
    return p;
}

Expr apply_field(const ProlongedField& p, const Expr& e) {
    Stencil st = stencil(e);
    if (st.has_lattice && (st.lo < -p.a || st.hi > p.b))
        throw ExprError("apply_field: expression stencil [" + std::to_string(st.lo) + "," +
                        std::to_string(st.hi) + "] exceeds the prolongation window [-" +
                        std::to_string(p.a) + "," + std::to_string(p.b) + "]");
    std::vector<Expr> terms;
    for (auto& [k, c] : p.coeffs) {
        Expr du = differentiate(e, uvar(k));
        if (!is_zero(du))
            terms.push_back(mul(c.phi, du));
        Expr dx = differentiate(e, xvar(k));
        if (!is_zero(dx))
            terms.push_back(mul(c.xi, dx));
    }
    return normalize(add(std::move(terms)));
}

} // namespace dlambda
