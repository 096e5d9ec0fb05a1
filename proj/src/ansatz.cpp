#include "dlambda/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace dlambda {

namespace {

struct MonoGt {
    bool operator()(const Mono& a, const Mono& b) const { return mono_cmp(a, b) > 0; }
};

std::set<int> unknowns_in(const Poly& p, const std::set<int>& unk) {
    std::set<int> r;
    for (auto& [m, c] : p.terms)
        for (auto& [var, e] : m.v)
            if (unk.count(var))
                r.insert(var);
    return r;
}

bool contains_any(const Poly& p, const std::set<int>& unk) {
    return !unknowns_in(p, unk).empty();
}

/// P with z := v, computed exactly over the rational-function field.
RatFunc poly_apply(const Poly& p, int z, const RatFunc& v) {
    RatFunc r;
    for (auto& [e, c] : p.coeffs_in(z))
        r = r + RatFunc(c) * v.pow(e);
    return r;
}

RatFunc rf_apply(const RatFunc& f, int z, const RatFunc& v) {
    return poly_apply(f.num, z, v) / poly_apply(f.den, z, v);
}

} // namespace

Ansatz build_ansatz(int degree, const AnsatzOptions& opts) {
    if (degree < 0)
        throw ExprError("ansatz degree must be non-negative");
    if (degree > opts.max_degree || (opts.with_phi && opts.phi_degree > opts.max_degree))
        throw ExprError("ansatz degree exceeds the configured maximum (" +
                        std::to_string(opts.max_degree) + ")");
    Ansatz a;
    a.degree = degree;
    std::vector<Expr> terms;
    for (int i = 0; i <= degree; ++i) {
        std::string name = "c" + std::to_string(i);
        a.unknowns.push_back(name);
        terms.push_back(mul(param(name), powi(uvar(0), i)));
    }
    a.chi_template = add(std::move(terms));
    if (opts.with_phi) {
        a.phi_degree = opts.phi_degree;
        std::vector<Expr> pts;
        for (int j = 0; j <= opts.phi_degree; ++j) {
            std::string name = "p" + std::to_string(j);
            a.unknowns.push_back(name);
            pts.push_back(mul(param(name), powi(uvar(0), j)));
        }
        a.phi_template = add(std::move(pts));
    } else {
        a.phi_template = num(1);
    }
    return a;
}

bool CoefficientSystem::affine() const {
    std::set<int> unk(unknown_ids.begin(), unknown_ids.end());
    for (auto& eq : equations)
        for (auto& [m, c] : eq.terms) {
            int d = 0;
            for (auto& [var, e] : m.v)
                if (unk.count(var))
                    d += e;
            if (d > 1)
                return false;
        }
    return true;
}

CoefficientSystem extract_coefficient_system(const DeterminingExpression& det,
                                             const std::vector<std::string>& unknown_names,
                                             const SampleBox& box, bool force_sampled) {
    NormalForm nf = normal_form(det.residual);
    std::set<std::string> unames(unknown_names.begin(), unknown_names.end());

    CoefficientSystem sys;
    sys.atoms = nf.atoms;
    sys.unknown_names = unknown_names;

    std::vector<int> window_ids;
    for (size_t id = 0; id < nf.atoms.size(); ++id) {
        const Expr& atom = nf.atoms[id];
        SymbolSet fs = free_symbols(atom);
        bool has_window = !fs.lattice_vars.empty() || !fs.cont_vars.empty();
        bool has_unknown = false;
        for (auto& p : fs.params)
            if (unames.count(p))
                has_unknown = true;
        if (atom->kind == Kind::Param && unames.count(atom->name)) {
            sys.unknown_ids.push_back(static_cast<int>(id));
        } else if (has_unknown) {
            throw ExprError("coefficient extraction: unknown trapped inside opaque atom " +
                            to_string(atom) + "; the system is not polynomial in the unknowns");
        } else if (has_window) {
            window_ids.push_back(static_cast<int>(id));
        } else {
            sys.param_ids.push_back(static_cast<int>(id));
        }
    }

    if (!force_sampled) {
        // group the cleared numerator by window monomials
        std::set<int> wset(window_ids.begin(), window_ids.end());
        std::map<Mono, Poly, MonoGt> groups;
        for (auto& [m, c] : nf.rf.num.terms) {
            Mono wpart, cpart;
            for (auto& [var, e] : m.v)
                (wset.count(var) ? wpart : cpart).v.push_back({var, e});
            Poly t;
            t.terms.push_back({cpart, c});
            auto it = groups.find(wpart);
            if (it == groups.end())
                groups.emplace(wpart, t);
            else
                it->second = it->second + t;
        }
        for (auto& [wm, poly] : groups) {
            if (poly.is_zero())
                continue;
            bool dup = false;
            for (auto& prev : sys.equations)
                if (prev == poly) {
                    dup = true;
                    break;
                }
            if (dup)
                continue;
            std::vector<Expr> fs;
            for (auto& [var, e] : wm.v)
                fs.push_back(powi(nf.atoms[var], e));
            sys.trace.push_back(fs.empty() ? "1" : to_string(mul(std::move(fs))));
            sys.equations.push_back(poly);
        }
        return sys;
    }

    // sampled-equation mode: instantiate the window atoms at random points,
    // 3 equations per unknown
    sys.sampled_mode = true;
    int m = std::max(8, 3 * static_cast<int>(sys.unknown_ids.size()));
    std::vector<Expr> window_exprs;
    for (int id : window_ids)
        window_exprs.push_back(nf.atoms[id]);
    SampleBox sb = box;
    sb.samples = m;
    Sampler sampler(sb, window_exprs);
    std::vector<Poly> eqs(static_cast<size_t>(m));
    sampler.for_each([&](int i, const Binding& b) {
        Poly eq = nf.rf.num;
        for (int id : window_ids) {
            double v = evaluate(nf.atoms[id], b);
            if (!std::isfinite(v))
                return false;
            eq = eq.subst(id, Rational(mpq_class(v)));
        }
        eqs[static_cast<size_t>(i)] = std::move(eq);
        return true;
    });
    for (int i = 0; i < m; ++i) {
        sys.equations.push_back(std::move(eqs[static_cast<size_t>(i)]));
        sys.trace.push_back("sample " + std::to_string(i));
    }
    return sys;
}

namespace {

struct ElimState {
    std::vector<Poly> eqs;
    std::vector<std::pair<int, RatFunc>> assigned;
    std::set<int> remaining;
};

struct ExactSolution {
    std::map<int, RatFunc> values; // over param ids only
    int free_count = 0;
};

// exact elimination; sets *complete=false when some branch gets stuck
std::vector<ExactSolution> eliminate_exact(const CoefficientSystem& sys, bool* complete) {
    *complete = true;
    std::set<int> unk(sys.unknown_ids.begin(), sys.unknown_ids.end());

    std::vector<ElimState> work{{sys.equations, {}, unk}};
    std::vector<ExactSolution> out;
    int guard = 0;
    while (!work.empty()) {
        if (++guard > 512 || work.size() > 64) {
            *complete = false;
            break;
        }
        ElimState st = std::move(work.back());
        work.pop_back();

        std::vector<Poly> eqs;
        bool contradiction = false;
        for (auto& e : st.eqs) {
            if (e.is_zero())
                continue;
            if (!contains_any(e, st.remaining)) {
                contradiction = true; // nonzero polynomial in the parameters alone
                break;
            }
            eqs.push_back(e);
        }
        if (contradiction)
            continue;

        if (eqs.empty()) {
            ExactSolution sol;
            std::map<int, RatFunc> resolved;
            for (int z : st.remaining) {
                resolved[z] = RatFunc(); // free direction: pin to zero
                ++sol.free_count;
            }
            bool ok = true;
            for (auto it = st.assigned.rbegin(); it != st.assigned.rend() && ok; ++it) {
                RatFunc v = it->second;
                try {
                    for (;;) {
                        std::set<int> present = unknowns_in(v.num, unk);
                        std::set<int> pden = unknowns_in(v.den, unk);
                        present.insert(pden.begin(), pden.end());
                        if (present.empty())
                            break;
                        int z = *present.begin();
                        auto rit = resolved.find(z);
                        if (rit == resolved.end()) {
                            ok = false;
                            break;
                        }
                        v = rf_apply(v, z, rit->second);
                    }
                } catch (const std::domain_error&) {
                    ok = false; // denominator collapses on this branch
                }
                if (ok)
                    resolved[it->first] = v;
            }
            if (!ok)
                continue;
            // verify against the original system, exactly
            for (auto& eq : sys.equations) {
                Poly p = eq;
                for (int z : sys.unknown_ids) {
                    auto it = resolved.find(z);
                    if (it != resolved.end())
                        p = p.subst_cleared(z, it->second.num, it->second.den);
                }
                if (!p.is_zero()) {
                    ok = false;
                    break;
                }
            }
            if (!ok)
                continue;
            sol.values = std::move(resolved);
            // dedup
            bool dup = false;
            for (auto& prev : out)
                if (prev.values == sol.values)
                    dup = true;
            if (!dup)
                out.push_back(std::move(sol));
            continue;
        }

        auto spawn = [&](const ElimState& base, int z, const RatFunc& val) {
            ElimState next;
            next.assigned = base.assigned;
            next.assigned.push_back({z, val});
            next.remaining = base.remaining;
            next.remaining.erase(z);
            for (auto& e : base.eqs) {
                if (e.deg_in(z) == 0)
                    next.eqs.push_back(e);
                else
                    next.eqs.push_back(e.subst_cleared(z, val.num, val.den));
            }
            work.push_back(std::move(next));
        };

        // rule A: an equation involving exactly one unknown, degree <= 2
        bool advanced = false;
        for (auto& eq : eqs) {
            std::set<int> present = unknowns_in(eq, st.remaining);
            if (present.size() != 1)
                continue;
            int z = *present.begin();
            int d = eq.deg_in(z);
            auto cs = eq.coeffs_in(z);
            auto coeff = [&](int e) {
                auto it = cs.find(e);
                return it == cs.end() ? Poly() : it->second;
            };
            if (d == 1) {
                spawn(st, z, RatFunc(-coeff(0), coeff(1)));
                advanced = true;
                break;
            }
            if (d == 2) {
                Poly A = coeff(2), B = coeff(1), C = coeff(0);
                Poly disc = B * B - A * C.scaled(Rational(4));
                Poly s;
                if (!poly_sqrt(disc, &s))
                    continue; // irrational roots: leave for Newton
                Poly twoA = A.scaled(Rational(2));
                spawn(st, z, RatFunc(-B + s, twoA));
                if (!s.is_zero())
                    spawn(st, z, RatFunc(-B - s, twoA));
                advanced = true;
                break;
            }
        }
        if (advanced)
            continue;

        // rule B: linear in some unknown with an unknown-free coefficient
        for (auto& eq : eqs) {
            std::set<int> present = unknowns_in(eq, st.remaining);
            for (int z : present) {
                if (eq.deg_in(z) != 1)
                    continue;
                auto cs = eq.coeffs_in(z);
                Poly A = cs.at(1);
                if (contains_any(A, st.remaining))
                    continue;
                Poly B = cs.count(0) ? cs.at(0) : Poly();
                spawn(st, z, RatFunc(-B, A));
                advanced = true;
                break;
            }
            if (advanced)
                break;
        }
        if (!advanced)
            *complete = false; // stuck branch: hand over to Newton
    }
    return out;
}

// small dense linear solve (Gauss, partial pivoting); returns false if singular
bool dense_solve(std::vector<std::vector<double>> a, std::vector<double> rhs,
                 std::vector<double>* x) {
    size_t n = a.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (std::abs(a[piv][col]) < 1e-14)
            return false;
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col)
                continue;
            double f = a[r][col] / a[col][col];
            if (f == 0.0)
                continue;
            for (size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    x->resize(n);
    for (size_t i = 0; i < n; ++i)
        (*x)[i] = rhs[i] / a[i][i];
    return true;
}

// continued-fraction rational approximation with bounded denominator
bool snap_rational(double v, long max_den, Rational* out) {
    if (!std::isfinite(v))
        return false;
    double x = v;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        double fa = std::floor(x);
        if (fa > 1e15 || fa < -1e15)
            return false;
        long a = static_cast<long>(fa);
        long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den)
            break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = x - fa;
        if (frac < 1e-12)
            break;
        x = 1.0 / frac;
    }
    if (q1 == 0)
        return false;
    Rational r(p1, q1);
    if (std::abs(r.to_double() - v) > 1e-7 * (1.0 + std::abs(v)))
        return false;
    *out = r;
    return true;
}

} // namespace

std::vector<CoefficientAssignment> solve_coefficient_system(const CoefficientSystem& sys,
                                                            const SolveOptions& opts) {
    if (sys.unknown_ids.size() > 12)
        throw ExprError("coefficient system has more than 12 unknowns");

    // numeric values for the instantiated parameters (h, ...)
    std::map<int, Rational> param_exact;
    std::map<int, double> param_num;
    for (int id : sys.param_ids) {
        double v = opts.param_default;
        if (sys.atoms[id]->kind == Kind::Param) {
            auto it = opts.param_values.find(sys.atoms[id]->name);
            if (it != opts.param_values.end())
                v = it->second;
        }
        Rational r;
        if (!snap_rational(v, 1000000, &r))
            r = Rational(mpq_class(v));
        param_exact[id] = r;
        param_num[id] = r.to_double();
    }

    // align outputs with unknown_names: an unknown that cancelled out of the
    // residual has no atom id and is reported as 0
    std::map<std::string, int> id_of_name;
    for (int id : sys.unknown_ids)
        id_of_name[sys.atoms[id]->name] = id;

    std::vector<CoefficientAssignment> out;
    bool exact_complete = false;
    for (auto& sol : eliminate_exact(sys, &exact_complete)) {
        CoefficientAssignment a;
        a.exact = true;
        a.free_count = sol.free_count;
        for (auto& name : sys.unknown_names) {
            auto it = id_of_name.find(name);
            if (it == id_of_name.end()) {
                a.values.push_back(num(0));
                a.numeric.push_back(0.0);
                ++a.free_count;
            } else {
                const RatFunc& v = sol.values.at(it->second);
                a.values.push_back(rebuild(v, sys.atoms));
                a.numeric.push_back(v.num.eval(param_num) / v.den.eval(param_num));
            }
        }
        out.push_back(std::move(a));
    }

    if (!exact_complete) {
        // damped Newton on the numeric instantiation, multi-start
        std::vector<Poly> eqs;
        for (auto& eq : sys.equations) {
            Poly p = eq;
            for (auto& [id, r] : param_exact)
                p = p.subst(id, r);
            if (!p.is_zero())
                eqs.push_back(p);
        }
        size_t n = sys.unknown_ids.size();
        std::vector<std::vector<Poly>> jac(eqs.size(), std::vector<Poly>(n));
        std::vector<double> scale(eqs.size(), 1.0);
        for (size_t i = 0; i < eqs.size(); ++i) {
            double mx = 0.0;
            for (auto& [m, c] : eqs[i].terms)
                mx = std::max(mx, std::abs(c.to_double()));
            scale[i] = mx > 0 ? 1.0 / mx : 1.0;
            for (size_t j = 0; j < n; ++j)
                jac[i][j] = eqs[i].derivative(sys.unknown_ids[j]);
        }
        auto eval_F = [&](const std::vector<double>& c, std::vector<double>* F) {
            std::map<int, double> pt;
            for (size_t j = 0; j < n; ++j)
                pt[sys.unknown_ids[j]] = c[j];
            F->resize(eqs.size());
            for (size_t i = 0; i < eqs.size(); ++i)
                (*F)[i] = eqs[i].eval(pt) * scale[i];
        };

        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> box(-2.0, 2.0);
        std::vector<std::vector<double>> candidates;
        for (int start = 0; start < opts.newton_starts && !eqs.empty() && n > 0; ++start) {
            std::vector<double> c(n);
            if (start > 0)
                for (auto& v : c)
                    v = box(rng);
            double mu = 1e-3;
            std::vector<double> F;
            eval_F(c, &F);
            for (int it = 0; it < opts.newton_max_iter; ++it) {
                std::map<int, double> pt;
                for (size_t j = 0; j < n; ++j)
                    pt[sys.unknown_ids[j]] = c[j];
                // normal equations J^T J + mu I, J^T F
                std::vector<std::vector<double>> JtJ(n, std::vector<double>(n, 0.0));
                std::vector<double> JtF(n, 0.0);
                for (size_t i = 0; i < eqs.size(); ++i) {
                    std::vector<double> row(n);
                    for (size_t j = 0; j < n; ++j)
                        row[j] = jac[i][j].eval(pt) * scale[i];
                    for (size_t j = 0; j < n; ++j) {
                        JtF[j] += row[j] * F[i];
                        for (size_t k = j; k < n; ++k)
                            JtJ[j][k] += row[j] * row[k];
                    }
                }
                for (size_t j = 0; j < n; ++j)
                    for (size_t k = 0; k < j; ++k)
                        JtJ[j][k] = JtJ[k][j];
                for (size_t j = 0; j < n; ++j)
                    JtJ[j][j] += mu;
                std::vector<double> delta;
                if (!dense_solve(JtJ, JtF, &delta))
                    break;
                std::vector<double> cn(n);
                for (size_t j = 0; j < n; ++j)
                    cn[j] = c[j] - delta[j];
                std::vector<double> Fn;
                eval_F(cn, &Fn);
                double fn = 0.0, fo = 0.0;
                for (double v : Fn)
                    fn = std::max(fn, std::abs(v));
                for (double v : F)
                    fo = std::max(fo, std::abs(v));
                if (fn < fo) {
                    c = cn;
                    F = Fn;
                    mu = std::max(mu * 0.3, 1e-12);
                    if (fn < 1e-13)
                        break;
                } else {
                    mu *= 10.0;
                    if (mu > 1e8)
                        break;
                }
            }
            double fmax = 0.0;
            for (double v : F)
                fmax = std::max(fmax, std::abs(v));
            if (fmax <= 1e-11)
                candidates.push_back(c);
        }

        // dedup candidates, snap to rationals, verify
        for (auto& c : candidates) {
            // snap each coordinate and keep the snapped value only if the
            // whole snapped vector solves the system exactly
            std::map<int, Rational> snapped;
            bool snap_ok = true;
            for (size_t j = 0; j < n; ++j) {
                Rational r;
                if (!snap_rational(c[j], 1024, &r)) {
                    snap_ok = false;
                    break;
                }
                snapped[sys.unknown_ids[j]] = r;
            }
            if (snap_ok) {
                for (auto& eq : eqs)
                    if (!eq.eval_exact(snapped).is_zero()) {
                        snap_ok = false;
                        break;
                    }
            }
            CoefficientAssignment a;
            a.exact = snap_ok;
            for (auto& name : sys.unknown_names) {
                auto it = id_of_name.find(name);
                if (it == id_of_name.end()) {
                    a.values.push_back(num(0));
                    a.numeric.push_back(0.0);
                    ++a.free_count;
                    continue;
                }
                size_t j = 0;
                while (sys.unknown_ids[j] != it->second)
                    ++j;
                if (snap_ok) {
                    a.values.push_back(num(snapped.at(it->second)));
                    a.numeric.push_back(snapped.at(it->second).to_double());
                } else {
                    // keep the numeric root; exact binary rational for reporting
                    a.values.push_back(num(Rational(mpq_class(c[j]))));
                    a.numeric.push_back(c[j]);
                }
            }
            bool dup = false;
            for (auto& prev : out) {
                double d2 = 0.0;
                for (size_t j = 0; j < a.numeric.size(); ++j)
                    d2 += (prev.numeric[j] - a.numeric[j]) * (prev.numeric[j] - a.numeric[j]);
                if (std::sqrt(d2) < opts.dedup_distance)
                    dup = true;
            }
            if (!dup)
                out.push_back(std::move(a));
        }
    }

    std::sort(out.begin(), out.end(), [](const CoefficientAssignment& x,
                                         const CoefficientAssignment& y) {
        return x.numeric < y.numeric;
    });
    // final dedup after sorting (exact duplicates from the two paths)
    std::vector<CoefficientAssignment> dedup;
    for (auto& a : out) {
        bool close = false;
        for (auto& prev : dedup) {
            double d2 = 0.0;
            for (size_t j = 0; j < a.numeric.size(); ++j)
                d2 += (prev.numeric[j] - a.numeric[j]) * (prev.numeric[j] - a.numeric[j]);
            if (std::sqrt(d2) < 1e-8)
                close = true;
        }
        if (!close)
            dedup.push_back(a);
    }
    return dedup;
}

std::vector<LambdaSymmetry> find_lambda_symmetry(Scheme& s, int degree, FindOptions opts) {
    if (!s.solved)
        solve_for_leading(s);
    Ansatz ansatz = build_ansatz(degree, opts.ansatz);
    for (auto& [n, f] : s.builtin_bindings.funcs)
        opts.box.fixed.funcs.emplace(n, f);

    DiscreteVectorField vf(num(0), ansatz.phi_template);
    ChiMultiplier chi_t(ansatz.chi_template);
    DeterminingExpression det = determining_expression(s, vf, chi_t);
    CoefficientSystem sys = extract_coefficient_system(det, ansatz.unknowns, opts.box);
    std::vector<CoefficientAssignment> sols = solve_coefficient_system(sys, opts.solve);

    std::vector<LambdaSymmetry> found;
    for (auto& a : sols) {
        Expr chi_c = ansatz.chi_template;
        Expr phi_c = ansatz.phi_template;
        for (size_t i = 0; i < sys.unknown_names.size(); ++i) {
            Expr p = param(sys.unknown_names[i]);
            chi_c = substitute(chi_c, p, a.values[i]);
            phi_c = substitute(phi_c, p, a.values[i]);
        }
        chi_c = normalize(chi_c);
        phi_c = normalize(phi_c);
        if (is_zero(chi_c) || is_zero(phi_c))
            continue;
        ChiMultiplier chi(chi_c);
        DiscreteVectorField field(num(0), phi_c);
        CheckReport rep = check_symmetry(s, field, chi, opts.box, opts.tol);
        if (!rep.pass)
            continue;
        LambdaSymmetry hit;
        hit.phi = phi_c;
        hit.chi = chi_c;
        hit.lambda = chi.lambda();
        hit.exact = a.exact;
        hit.report = rep;
        found.push_back(std::move(hit));
    }
    return found;
}

} // namespace dlambda
