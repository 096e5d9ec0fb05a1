#include "dlambda/determining.hpp"

#include "dlambda/normal_form.hpp"

#include <cmath>

namespace dlambda {

namespace {

bool has_opaque_atoms(const Expr& e) {
    if (e->kind == Kind::FuncSym || e->kind == Kind::Exp || e->kind == Kind::Log)
        return true;
    for (auto& k : e->kids)
        if (has_opaque_atoms(k))
            return true;
    return false;
}

} // namespace

const char* to_string(SymbolicVerdict v) {
    switch (v) {
    case SymbolicVerdict::Zero: return "zero";
    case SymbolicVerdict::Nonzero: return "nonzero";
    default: return "undecided";
    }
}

DeterminingExpression determining_expression(const Scheme& s, const DiscreteVectorField& vf,
                                             const ChiMultiplier& chi) {
    if (!s.solved)
        throw SchemeError("determining_expression requires a solved form on the scheme");
    ProlongedField p = lambda_prolong(vf, chi, s.a, s.b);
    Expr applied = apply_field(p, s.equation);
    Expr on_shell = normalize(substitute(applied, uvar(s.b), *s.solved));
    if (s.lattice.spacing)
        on_shell = normalize(substitute(on_shell, param("h"), num(*s.lattice.spacing)));
    if (contains_lattice(on_shell, 'u', s.b))
        throw SchemeError("internal: residual still contains the leading variable");
    DeterminingExpression d;
    d.residual = on_shell;
    d.scheme_name = s.name;
    d.phi_printed = to_string(vf.phi);
    d.chi_printed = to_string(chi.chi);
    return d;
}

CheckReport check_symmetry(const Scheme& s, const DiscreteVectorField& vf,
                           const ChiMultiplier& chi, const SampleBox& box, double tol) {
    DeterminingExpression det = determining_expression(s, vf, chi);
    CheckReport r;
    r.scheme_name = s.name;
    r.tol = tol;
    r.seed = box.seed;
    if (is_zero(det.residual))
        r.symbolic = SymbolicVerdict::Zero;
    else if (!has_opaque_atoms(det.residual))
        r.symbolic = SymbolicVerdict::Nonzero;
    else
        r.symbolic = SymbolicVerdict::Undecided;

    if (is_zero(det.residual)) {
        r.max_residual = 0.0;
        r.mean_residual = 0.0;
        r.samples = 0;
    } else {
        SampleBox sb = box;
        for (auto& [n, f] : s.builtin_bindings.funcs)
            sb.fixed.funcs.emplace(n, f);
        r.max_residual = max_abs_sample(det.residual, sb, &r.mean_residual);
        r.samples = sb.samples;
    }
    r.pass = r.symbolic == SymbolicVerdict::Zero || r.max_residual <= tol;
    return r;
}

SampleBox make_default_box(const Scheme& s, double h_value, double lo, double hi) {
    SampleBox box;
    for (int k = -s.a; k <= s.b; ++k)
        box.range_lattice('u', k, lo, hi).range_lattice('x', k, lo, hi);
    box.fixed.set_param("h", s.lattice.spacing ? s.lattice.spacing->to_double() : h_value);
    for (auto& [n, f] : s.builtin_bindings.funcs)
        box.fixed.set_func(n, f);
    return box;
}

Expr eta_residual(const DiscreteVectorField& vf, const Expr& eta, const Expr& lam) {
    Expr h = param("h");
    Expr weight = expf(mul(h, lam));
    Expr shifted = sub(shift(eta, 1), mul(shift(vf.xi, 1), lam));
    Expr local = sub(eta, mul(vf.xi, lam));
    Expr source = mul(h, add(mul(vf.xi, differentiate(lam, xvar(0))),
                             mul(vf.phi, differentiate(lam, uvar(0)))));
    return add(sub(mul(weight, shifted), local), source);
}

std::vector<double> eta_propagate(double eta0, const DiscreteVectorField& vf, const Expr& lam,
                                  const Trajectory& t) {
    if (t.u.size() < 2)
        throw EvalError("eta_propagate: trajectory too short");
    Expr lam_x = differentiate(lam, xvar(0));
    Expr lam_u = differentiate(lam, uvar(0));
    std::vector<double> eta{eta0};
    eta.reserve(t.u.size());
    for (size_t n = 0; n + 1 < t.u.size(); ++n) {
        Binding at_n = t.bindings;
        at_n.set_lattice('x', 0, t.x_at(n)).set_lattice('u', 0, t.u[n]);
        Binding at_n1 = t.bindings;
        at_n1.set_lattice('x', 0, t.x_at(n + 1)).set_lattice('u', 0, t.u[n + 1]);

        double lam_n = evaluate(lam, at_n);
        double w = std::exp(t.h * lam_n);
        if (!std::isfinite(w) || w == 0.0)
            throw EvalError("eta_propagate: e^{h*lambda} degenerates at step " +
                            std::to_string(n));
        double xi_n = evaluate(vf.xi, at_n);
        double phi_n = evaluate(vf.phi, at_n);
        double xi_n1 = evaluate(vf.xi, at_n1);
        double source = t.h * (xi_n * evaluate(lam_x, at_n) + phi_n * evaluate(lam_u, at_n));
        double next = xi_n1 * lam_n + ((eta.back() - xi_n * lam_n) - source) / w;
        eta.push_back(next);
    }
    return eta;
}

} // namespace dlambda
