#include "dlambda/reduction.hpp"

#include "dlambda/ansatz.hpp"
#include "dlambda/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dlambda {

Expr antiderivative(const ChiMultiplier& chi) {
    NormalForm nf = normal_form(chi.chi);
    if (!nf.rf.is_poly())
        throw ExprError("antiderivative: chi must be polynomial in u[0]");

    int u_id = -1;
    for (size_t id = 0; id < nf.atoms.size(); ++id) {
        const Expr& atom = nf.atoms[id];
        if (atom->kind == Kind::Lattice && atom->base == 'u' && atom->offset == 0)
            u_id = static_cast<int>(id);
    }

    std::vector<Expr> terms;
    for (auto& [m, c] : nf.rf.num.terms) {
        std::vector<Expr> factors;
        factors.push_back(num(c));
        int u_pow = 0;
        const ExprNode* fatom = nullptr;
        for (auto& [var, e] : m.v) {
            const Expr& atom = nf.atoms[var];
            if (var == u_id) {
                u_pow = e;
            } else if (atom->kind == Kind::FuncSym) {
                if (e != 1 || fatom)
                    throw ExprError("antiderivative: non-integrable function power");
                fatom = atom.get();
            } else if (atom->kind == Kind::Param) {
                factors.push_back(powi(atom, e));
            } else {
                throw ExprError("antiderivative: non-integrable atom " + to_string(atom));
            }
        }
        if (fatom) {
            // c * f^(d)[0](u[0]) integrates to c * f^(d-1)[0](u[0])
            if (u_pow != 0 || fatom->deriv < 1 || fatom->offset != 0 ||
                !equal(fatom->kids[0], uvar(0)))
                throw ExprError("antiderivative: non-integrable function term");
            factors.push_back(func(fatom->name, 0, fatom->deriv - 1, uvar(0)));
        } else {
            factors.push_back(num(Rational(1, u_pow + 1)));
            factors.push_back(powi(uvar(0), u_pow + 1));
        }
        terms.push_back(mul(std::move(factors)));
    }
    return normalize(add(std::move(terms)));
}

InvariantForm invariant(const ChiMultiplier& chi) {
    InvariantForm inv;
    inv.antiderivative = antiderivative(chi);
    // exactness self-check
    if (!identically_equal(differentiate(inv.antiderivative, uvar(0)), chi.chi))
        throw ExprError("internal: antiderivative does not differentiate back to chi");
    inv.v = sub(uvar(1), inv.antiderivative);
    // the prolonged field with phi = 1 must annihilate v
    DiscreteVectorField vf(num(0), num(1));
    Expr killed = apply_field(lambda_prolong(vf, chi, 1, 1), inv.v);
    if (!is_zero(killed))
        throw ExprError("invariant self-check failed: field does not annihilate v, residual " +
                        to_string(killed));
    return inv;
}

namespace {

Expr build_poly_in_v(const std::vector<double>& coeffs) {
    std::vector<Expr> terms;
    for (size_t j = 0; j < coeffs.size(); ++j)
        terms.push_back(mul(num(Rational(mpq_class(coeffs[j]))), powi(param("v"), static_cast<long>(j))));
    return normalize(add(std::move(terms)));
}

std::optional<Expr> rewrite_through(const Expr& target, const Expr& w, int degree) {
    // target(u[-1], u[0]) =? sum_j r_j w^j, solved exactly for the r_j
    std::vector<std::string> unknowns;
    std::vector<Expr> terms{target};
    for (int j = 0; j <= degree; ++j) {
        std::string name = "r" + std::to_string(j);
        unknowns.push_back(name);
        terms.push_back(neg(mul(param(name), powi(w, j))));
    }
    DeterminingExpression det;
    det.residual = normalize(add(std::move(terms)));
    SampleBox unused;
    CoefficientSystem sys = extract_coefficient_system(det, unknowns, unused);
    std::vector<CoefficientAssignment> sols = solve_coefficient_system(sys);
    for (auto& sol : sols) {
        if (!sol.exact)
            continue;
        std::vector<Expr> rterms;
        for (int j = 0; j <= degree; ++j)
            rterms.push_back(mul(sol.values[static_cast<size_t>(j)], powi(param("v"), j)));
        return normalize(add(std::move(rterms)));
    }
    return std::nullopt;
}

} // namespace

std::vector<double> invariant_series(const InvariantForm& inv, const Trajectory& t) {
    std::vector<double> vs;
    for (size_t n = 0; n + 1 < t.u.size(); ++n) {
        Binding b = t.bindings;
        b.set_lattice('u', 0, t.u[n]).set_lattice('u', 1, t.u[n + 1]);
        b.set_lattice('x', 0, t.x_at(n)).set_lattice('x', 1, t.x_at(n + 1));
        vs.push_back(evaluate(inv.v, b));
    }
    return vs;
}

ReducedMap reduce_order(const Scheme& s, const InvariantForm& inv) {
    if (s.a != 1 || s.b != 1)
        throw SchemeError("reduce_order handles stencil -1..1 schemes");
    if (!s.solved)
        throw SchemeError("reduce_order requires a solved form");

    Expr w = shift(inv.v, -1);                                 // v_{n-1}(u[-1], u[0])
    Expr target = normalize(substitute(inv.v, uvar(1), *s.solved)); // v_n on-shell
    if (s.lattice.spacing)
        target = normalize(substitute(target, param("h"), num(*s.lattice.spacing)));

    for (int m = 0; m <= 4; ++m) {
        if (auto r = rewrite_through(target, w, m)) {
            ReducedMap red;
            red.map = *r;
            red.symbolic = true;
            red.degree = m;
            return red;
        }
    }

    // numeric fallback: sample (v_n, v_{n+1}) pairs along trajectories and
    // fit a polynomial, then insist on verification over fresh trajectories
    VerifyOptions vo;
    std::mt19937_64 rng(vo.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unit(vo.init_lo, vo.init_hi);
    Binding bind;
    bind.set_param("h", s.lattice.spacing ? s.lattice.spacing->to_double() : vo.h_value);
    std::vector<std::pair<double, double>> pairs;
    for (int trial = 0; trial < vo.trials; ++trial) {
        std::vector<double> init(static_cast<size_t>(s.window()));
        for (auto& v : init)
            v = unit(rng);
        Trajectory t = iterate_trajectory(s, init, vo.steps, bind);
        std::vector<double> vs = invariant_series(inv, t);
        for (size_t n = 0; n + 1 < vs.size(); ++n)
            if (std::abs(vs[n]) <= vo.value_cap && std::abs(vs[n + 1]) <= vo.value_cap)
                pairs.push_back({vs[n], vs[n + 1]});
    }
    if (pairs.size() >= 8) {
        for (int deg = 1; deg <= 4; ++deg) {
            // least squares via normal equations
            int n = deg + 1;
            std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
            std::vector<double> atb(n, 0.0);
            for (auto& [x, y] : pairs) {
                double xi = 1.0;
                std::vector<double> row(n);
                for (int j = 0; j < n; ++j) {
                    row[j] = xi;
                    xi *= x;
                }
                for (int j = 0; j < n; ++j) {
                    atb[j] += row[j] * y;
                    for (int k = 0; k < n; ++k)
                        ata[j][k] += row[j] * row[k];
                }
            }
            // solve
            std::vector<double> coef(n, 0.0);
            {
                // Gaussian elimination
                for (int col = 0; col < n; ++col) {
                    int piv = col;
                    for (int r = col + 1; r < n; ++r)
                        if (std::abs(ata[r][col]) > std::abs(ata[piv][col]))
                            piv = r;
                    if (std::abs(ata[piv][col]) < 1e-300)
                        goto next_degree;
                    std::swap(ata[piv], ata[col]);
                    std::swap(atb[piv], atb[col]);
                    for (int r = 0; r < n; ++r) {
                        if (r == col)
                            continue;
                        double f = ata[r][col] / ata[col][col];
                        for (int c = col; c < n; ++c)
                            ata[r][c] -= f * ata[col][c];
                        atb[r] -= f * atb[col];
                    }
                }
                for (int j = 0; j < n; ++j)
                    coef[j] = atb[j] / ata[j][j];
            }
            {
                double resid = 0.0;
                for (auto& [x, y] : pairs) {
                    double p = 0.0, xi = 1.0;
                    for (int j = 0; j < n; ++j) {
                        p += coef[j] * xi;
                        xi *= x;
                    }
                    resid = std::max(resid, std::abs(p - y));
                }
                if (resid <= 1e-8) {
                    ReducedMap red;
                    red.map = build_poly_in_v(coef);
                    red.symbolic = false;
                    red.degree = deg;
                    VerifyOptions fresh;
                    fresh.seed = vo.seed + 1;
                    if (verify_reduction(s, inv, red, fresh).pass())
                        return red;
                }
            }
        next_degree:;
        }
    }
    throw SchemeError("not reducible by this invariant");
}

VerificationReport verify_reduction(const Scheme& s, const InvariantForm& inv,
                                    const ReducedMap& r, const VerifyOptions& opts) {
    VerificationReport rep;
    rep.trials = opts.trials;
    rep.steps = opts.steps;
    rep.tol = opts.tol;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(opts.init_lo, opts.init_hi);
    Binding bind;
    bind.set_param("h", s.lattice.spacing ? s.lattice.spacing->to_double() : opts.h_value);

    for (int trial = 0; trial < opts.trials; ++trial) {
        std::vector<double> init(static_cast<size_t>(s.window()));
        for (auto& v : init)
            v = unit(rng);
        Trajectory t = iterate_trajectory(s, init, opts.steps, bind);
        if (t.divergent)
            ++rep.divergent;
        std::vector<double> vs = invariant_series(inv, t);
        long checked_here = 0;
        for (size_t n = 0; n + 1 < vs.size(); ++n) {
            bool window_ok = std::abs(vs[n]) <= opts.value_cap &&
                             std::abs(vs[n + 1]) <= opts.value_cap;
            for (size_t k = n; window_ok && k <= n + 2 && k < t.u.size(); ++k)
                window_ok = std::abs(t.u[k]) <= opts.value_cap;
            if (!window_ok) {
                ++rep.points_skipped;
                continue;
            }
            Binding vb = t.bindings;
            vb.set_param("v", vs[n]);
            double rv = evaluate(r.map, vb);
            rep.max_deviation = std::max(rep.max_deviation, std::abs(vs[n + 1] - rv));
            ++rep.points_checked;
            ++checked_here;
        }
        if (checked_here == 0 && !t.divergent)
            ++rep.divergent; // nothing verifiable on this trajectory
    }

    if (rep.points_checked == 0)
        rep.verdict = VerificationReport::Verdict::Inconclusive;
    else if (rep.max_deviation <= opts.tol)
        rep.verdict = VerificationReport::Verdict::Pass;
    else
        rep.verdict = VerificationReport::Verdict::Fail;
    return rep;
}

} // namespace dlambda
