// Acceptance suite: end-to-end criteria for the workbench, one line each.
// Exit code = number of failed criteria.

#include "dlambda/ansatz.hpp"
#include "dlambda/continuum.hpp"
#include "dlambda/reduction.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <iostream>
#include <vector>

using namespace dlambda;

namespace {

struct Criterion {
    std::string name;
    std::function<void()> run; // throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok)
        throw Failure(what);
}

std::string fixture(const std::string& name) {
    return std::string(DLAMBDA_FIXTURE_DIR) + "/" + name;
}

double run_ms(const std::function<void()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ---- criterion 1: ex2 discovery, exact in h, under 5 s ----
void ex2_discovery() {
    double ms = run_ms([] {
        Scheme s = load_scheme_file(fixture("ex2.scheme"));
        FindOptions fo;
        fo.box = make_default_box(s);
        auto hits = find_lambda_symmetry(s, 1, fo);
        require(hits.size() == 1, "expected exactly one degree-1 solution");
        require(hits[0].exact, "solution must be exact in h");
        require(is_one(hits[0].phi), "phi must be 1");
        require(identically_equal(hits[0].chi, parse("1 + h*u[0]")),
                "chi must equal 1 + h*u[0] exactly");
        require(identically_equal(normalize(hits[0].lambda), normalize(parse("log(1+h*u[0])/h"))),
                "lambda must equal log(1+h*u[0])/h");
    });
    require(ms < 5000.0, "discovery exceeded 5 s");
}

// ---- criterion 2: ex2 reduction and trajectory verification, under 5 s ----
void ex2_reduction() {
    double ms = run_ms([] {
        Scheme s = load_scheme_file(fixture("ex2.scheme"));
        solve_for_leading(s);
        InvariantForm inv = invariant(ChiMultiplier(parse("1+h*u[0]")));
        require(identically_equal(inv.v, parse("u[1] - u[0] - (h/2)*u[0]^2")),
                "invariant must be u[1]-u[0]-(h/2)u[0]^2");
        ReducedMap red = reduce_order(s, inv);
        require(red.symbolic, "reduction must be symbolic");
        require(identically_equal(red.map, parse("v*(1-(h/2)*v)")),
                "reduced map must be v(1-(h/2)v)");
        VerifyOptions vo; // 20 trials x 100 steps, u0,u1 in [0,1], h=0.1
        vo.tol = 1e-10;
        VerificationReport vr = verify_reduction(s, inv, red, vo);
        require(vr.pass(), "trajectory check failed at 1e-10");
        require(vr.points_checked > 0, "no checkable points");
    });
    require(ms < 5000.0, "reduction exceeded 5 s");
}

// ---- criterion 3: ex1 conservation for exp, cubic, sin ----
void ex1_conservation() {
    for (const char* file : {"ex1_exp.scheme", "ex1_cubic.scheme", "ex1_sin.scheme"}) {
        Scheme s = load_scheme_file(fixture(file));
        solve_for_leading(s);
        DiscreteVectorField vf(num(0), num(1));
        ChiMultiplier chi(parse("1+h*f'[0](u[0])"));
        SampleBox box = make_default_box(s);
        CheckReport cr = check_symmetry(s, vf, chi, box, 1e-10);
        require(cr.pass, std::string(file) + ": check_symmetry failed");

        InvariantForm inv = invariant(chi);
        VerifyOptions vo; // 20 trials x 100 steps
        vo.tol = 1e-10;
        VerificationReport vr = verify_reduction(s, inv, reduce_order(s, inv), vo);
        require(vr.pass(), std::string(file) + ": v_{n+1}=v_n check failed");

        // conservation: v_n stays at v_0 within 1e-10 along random trajectories
        std::mt19937_64 rng(7u);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Binding bind;
        bind.set_param("h", 0.1);
        long conserved_points = 0;
        for (int trial = 0; trial < 20; ++trial) {
            Trajectory t = iterate_trajectory(s, {unit(rng), unit(rng)}, 100, bind);
            auto vs = invariant_series(inv, t);
            for (size_t n = 0; n < vs.size(); ++n) {
                if (std::abs(t.u[n]) > 100.0 || std::abs(t.u[n + 1]) > 100.0 ||
                    std::abs(vs[n]) > 100.0)
                    break;
                require(std::abs(vs[n] - vs[0]) <= 1e-10,
                        std::string(file) + ": conservation violated");
                ++conserved_points;
            }
        }
        require(conserved_points > 100, std::string(file) + ": too few conserved points");
    }
}

// ---- criterion 4: negative controls fail loudly ----
void ex2_negative_controls() {
    Scheme s = load_scheme_file(fixture("ex2.scheme"));
    solve_for_leading(s);
    DiscreteVectorField vf(num(0), num(1));
    SampleBox box = make_default_box(s);
    CheckReport r1 = check_symmetry(s, vf, ChiMultiplier::identity(), box, 1e-10);
    require(!r1.pass, "chi=1 must fail");
    require(r1.max_residual >= 1e-4, "chi=1 residual must exceed 1e-4");
    CheckReport r2 = check_symmetry(s, vf, ChiMultiplier(parse("1+2*h*u[0]")), box, 1e-10);
    require(!r2.pass, "chi=1+2h*u must fail");
    require(r2.max_residual >= 1e-4, "chi=1+2h*u residual must exceed 1e-4");
}

// ---- criterion 5: continuum limit convergence ----
void continuum_limit() {
    ContinuousVectorField v01{num(0), num(1)};
    ConvergenceReport r1 = continuum_limit_check(v01, parse("1+h*u"), cvar("u"));
    require(r1.pass && !r1.exact, "(phi=1, lambda=u) must converge at first order");
    for (double ratio : r1.ratios)
        require(ratio >= 1.6 && ratio <= 2.4, "(phi=1, lambda=u) ratio outside [1.6,2.4]");

    ContinuousVectorField vxu{cvar("x"), cvar("u")};
    ConvergenceReport r2 = continuum_limit_check(vxu, parse("exp(h*u1)"), cvar("u1"));
    require(r2.pass && !r2.exact, "(xi=x, phi=u, lambda=u1) must converge at first order");
    for (double ratio : r2.ratios)
        require(ratio >= 1.6 && ratio <= 2.4, "(xi=x, phi=u, lambda=u1) ratio outside band");

    ConvergenceReport r0 = continuum_limit_check(v01, num(1), num(0));
    require(r0.exact, "lambda=0 must be exact");
    for (double e : r0.errors)
        require(e <= 1e-12, "lambda=0 error above 1e-12");
}

// ---- criterion 6: continuous fixtures ----
void continuous_fixtures() {
    SampleBox box;
    box.range_cont("x", 0.25, 1.0).range_cont("u", 0.25, 1.0).range_cont("u1", 0.25, 1.0);
    ContinuousVectorField v01{num(0), num(1)};

    // conservation-law equation: u2 = D_x[(x+x^2)e^u]
    Expr F = parse("(x+x^2)*exp(u)");
    Expr Fu = normalize(differentiate(F, cvar("u")));
    Expr f = normalize(add(differentiate(F, cvar("x")), mul(cvar("u1"), Fu)));
    CheckReport r = check_ode_lambda_symmetry(OdeSystem{2, f}, v01, Fu, box, 1e-10);
    require(r.symbolic == SymbolicVerdict::Zero, "conservation-law check must be symbolic-zero");

    auto coeffs = continuous_lambda_prolong(v01, Fu, 2);
    Expr w = sub(cvar("u1"), F);
    Expr Xw = normalize(add(differentiate(w, cvar("u")),
                            add(mul(coeffs[0], differentiate(w, cvar("u1"))),
                                mul(coeffs[1], differentiate(w, jet_var(2))))));
    require(is_zero(Xw), "prolonged field must annihilate u1 - F symbolically");

    // quadrature family, p = 2, three random cubic g
    std::mt19937_64 rng(99u);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<Expr> terms;
        for (int i = 0; i < 4; ++i) {
            long n = static_cast<long>(rng() % 15) - 7;
            if (n == 0)
                n = 2;
            terms.push_back(mul(num(n), powi(cvar("x"), i)));
        }
        Expr g = add(std::move(terms));
        Expr gp = normalize(differentiate(g, cvar("x")));
        Expr u = cvar("u"), u1 = cvar("u1");
        Expr f3 = normalize(add(add(mul(powi(u, -1), powi(u1, 2)),
                                    mul(mul(g, num(2)), mul(powi(u, 2), u1))),
                                mul(gp, powi(u, 3))));
        Expr lam3 = normalize(mul(powi(u, -1), add(u1, mul(mul(g, num(2)), powi(u, 3)))));
        CheckReport r3 = check_ode_lambda_symmetry(OdeSystem{2, f3}, v01, lam3, box, 1e-10);
        require(r3.pass, "quadrature-family fixture failed at 1e-10");
    }
}

// ---- criterion 7: property suites on a generated corpus ----
void property_suites() {
    // expression algebra invariants over >= 200 generated expressions
    std::mt19937_64 rng(31337);
    auto rand_expr = [&](auto&& self, int depth) -> Expr {
        if (depth == 0) {
            switch (rng() % 5) {
            case 0: return num(static_cast<long>(rng() % 7) - 3);
            case 1: return param("h");
            case 2: return uvar(static_cast<int>(rng() % 3) - 1);
            case 3: return func("f", static_cast<int>(rng() % 3) - 1, static_cast<int>(rng() % 2),
                                uvar(static_cast<int>(rng() % 3) - 1));
            default: return num(static_cast<long>(rng() % 5) + 1, static_cast<long>(rng() % 4) + 1);
            }
        }
        switch (rng() % 5) {
        case 0: return add(self(self, depth - 1), self(self, depth - 1));
        case 1: return sub(self(self, depth - 1), self(self, depth - 1));
        case 2: return mul(self(self, depth - 1), self(self, depth - 1));
        case 3: return powi(self(self, depth - 1), static_cast<long>(rng() % 3) + 1);
        default:
            return div(self(self, depth - 1), add(num(1), powi(uvar(static_cast<int>(rng() % 3) - 1), 2)));
        }
    };
    for (int i = 0; i < 200; ++i) {
        Expr e = rand_expr(rand_expr, 3);
        Expr n = normalize(e);
        require(identically_equal(e, parse(to_string(e))), "round trip failed");
        require(equal(n, normalize(n)), "normalize not idempotent");
        int j = static_cast<int>(rng() % 5) - 2;
        int k = static_cast<int>(rng() % 3) - 1;
        require(identically_equal(differentiate(shift(e, j), uvar(k + j)),
                                  shift(differentiate(e, uvar(k)), j)),
                "shift/differentiate commutation failed");
    }

    // potential-weight telescoping
    ChiMultiplier chi(parse("1+h*u[0]"));
    for (int j = -3; j <= 3; ++j)
        for (int k = -3; k <= 3; ++k)
            require(identically_equal(mul(potential_weight(chi, j),
                                          shift(potential_weight(chi, k), j)),
                                      potential_weight(chi, j + k)),
                    "telescoping failed");

    // lambda = 0 degeneration of the prolongation
    DiscreteVectorField vf(parse("x[0]"), parse("u[0]^2"));
    ProlongedField p = lambda_prolong(vf, ChiMultiplier::identity(), 2, 2);
    for (int k = -2; k <= 2; ++k) {
        require(identically_equal(p.coeffs.at(k).phi, powi(uvar(k), 2)),
                "identity-weight prolongation broke (phi)");
        require(identically_equal(p.coeffs.at(k).xi, xvar(k)),
                "identity-weight prolongation broke (xi)");
    }

    // eta propagation against the geometric closed form
    Scheme tr("trivial", 0, 1, parse("u[1]-u[0]"));
    solve_for_leading(tr);
    Binding bind;
    bind.set_param("h", 0.1);
    Trajectory t = iterate_trajectory(tr, {1.0}, 50, bind);
    DiscreteVectorField v01(num(0), num(1));
    double c = 0.4, eta0 = 2.0;
    auto etas = eta_propagate(eta0, v01, num(Rational(2, 5)), t);
    for (size_t n = 0; n < etas.size(); ++n) {
        double closed = eta0 * std::exp(-static_cast<double>(n) * 0.1 * c);
        require(std::abs(etas[n] - closed) <= 1e-12 * (1.0 + std::abs(closed)),
                "eta propagation deviates from the geometric solution");
    }
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"ex2-discovery-degree1-exact", ex2_discovery},
        {"ex2-reduction-logistic-map", ex2_reduction},
        {"ex1-conservation-exp-cubic-sin", ex1_conservation},
        {"ex2-negative-controls", ex2_negative_controls},
        {"continuum-limit-first-order", continuum_limit},
        {"continuous-fixtures", continuous_fixtures},
        {"property-suites", property_suites},
    };

    auto suite_start = std::chrono::steady_clock::now();
    int failed = 0;
    for (auto& c : criteria) {
        try {
            double ms = run_ms(c.run);
            std::cout << "[PASS] " << c.name << " (" << static_cast<long>(ms) << " ms)\n";
        } catch (const std::exception& e) {
            std::cout << "[FAIL] " << c.name << ": " << e.what() << "\n";
            ++failed;
        }
    }
    double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start)
                       .count();
    std::cout << (failed == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " in " << total
              << " s\n";
    if (total >= 60.0) {
        std::cout << "[FAIL] suite exceeded the 60 s budget\n";
        ++failed;
    }
    return failed;
}
