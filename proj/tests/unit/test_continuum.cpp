#include "dlambda/continuum.hpp"

#include "dlambda/normal_form.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dlambda;

namespace {

SampleBox jet_box() {
    SampleBox box;
    box.range_cont("x", 0.25, 1.0).range_cont("u", 0.25, 1.0).range_cont("u1", 0.25, 1.0);
    return box;
}

} // namespace

TEST_CASE("total derivative on jet expressions") {
    CHECK(identically_equal(total_derivative(cvar("u")), cvar("u1")));
    CHECK(identically_equal(total_derivative(parse("x*u1")), parse("u1 + x*u2")));
    CHECK(identically_equal(total_derivative(parse("u^2")), parse("2*u*u1")));
}

TEST_CASE("deformed prolongation: lam = 0 collapses to the classical one up to order 4") {
    ContinuousVectorField vf{parse("x*u"), parse("u^2 + x")};
    auto deformed = continuous_lambda_prolong(vf, num(0), 4);
    // classical recursion computed independently
    Expr q = vf.phi;
    for (int k = 0; k < 4; ++k) {
        q = normalize(sub(total_derivative(q), mul(jet_var(k + 1), total_derivative(vf.xi))));
        CHECK(identically_equal(deformed[static_cast<size_t>(k)], q));
    }
}

TEST_CASE("deformed prolongation: constant lam gives (c, c^2)") {
    ContinuousVectorField vf{num(0), num(1)};
    auto coeffs = continuous_lambda_prolong(vf, param("c"), 2);
    CHECK(identically_equal(coeffs[0], param("c")));
    CHECK(identically_equal(coeffs[1], parse("c^2")));
}

TEST_CASE("deformed prolongation: the conservation-law generator") {
    // F = (x + x^2) e^u, lam = F_u; second coefficient is F_u^2 + u1 F_uu + F_xu
    Expr F = parse("(x+x^2)*exp(u)");
    Expr Fu = normalize(differentiate(F, cvar("u")));
    ContinuousVectorField vf{num(0), num(1)};
    auto coeffs = continuous_lambda_prolong(vf, Fu, 2);
    CHECK(identically_equal(coeffs[0], Fu));
    Expr expect = normalize(add(add(mul(Fu, Fu), mul(cvar("u1"), differentiate(Fu, cvar("u")))),
                                differentiate(Fu, cvar("x"))));
    CHECK(identically_equal(coeffs[1], expect));
}

TEST_CASE("ODE invariance: conservation-law equation, decided symbolically") {
    Expr F = parse("(x+x^2)*exp(u)");
    Expr Fu = normalize(differentiate(F, cvar("u")));
    Expr f = normalize(add(differentiate(F, cvar("x")), mul(cvar("u1"), Fu)));
    ContinuousVectorField vf{num(0), num(1)};
    CheckReport r = check_ode_lambda_symmetry(OdeSystem{2, f}, vf, Fu, jet_box(), 1e-10);
    CHECK(r.symbolic == SymbolicVerdict::Zero);
    CHECK(r.pass);

    // the invariant w = u1 - F is annihilated, and its on-shell total
    // derivative vanishes, both symbolically
    Expr w = sub(cvar("u1"), F);
    auto coeffs = continuous_lambda_prolong(vf, Fu, 2);
    Expr Xw = normalize(add(differentiate(w, cvar("u")),
                            add(mul(coeffs[0], differentiate(w, cvar("u1"))),
                                mul(coeffs[1], differentiate(w, jet_var(2))))));
    CHECK(is_zero(Xw));
    CHECK(is_zero(normalize(substitute(total_derivative(w), jet_var(2), f))));
}

TEST_CASE("ODE invariance: quadrature family with p = 2 and random cubics") {
    std::mt19937_64 rng(5150);
    ContinuousVectorField vf{num(0), num(1)};
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<Expr> cs;
        for (int i = 0; i < 4; ++i) {
            long n = static_cast<long>(rng() % 17) - 8;
            if (n == 0)
                n = 1;
            cs.push_back(mul(num(Rational(n, static_cast<long>(rng() % 3) + 1)),
                             powi(cvar("x"), i)));
        }
        Expr g = add(std::move(cs));
        Expr gp = normalize(differentiate(g, cvar("x")));
        Expr u = cvar("u"), u1 = cvar("u1");
        Expr f = normalize(add(add(mul(powi(u, -1), powi(u1, 2)), mul(mul(g, num(2)), mul(powi(u, 2), u1))),
                               mul(gp, powi(u, 3))));
        Expr lam = normalize(mul(powi(u, -1), add(u1, mul(mul(g, num(2)), powi(u, 3)))));
        CheckReport r = check_ode_lambda_symmetry(OdeSystem{2, f}, vf, lam, jet_box(), 1e-10);
        CHECK(r.pass);
        CHECK(r.max_residual <= 1e-10);
    }
}

TEST_CASE("ODE invariance: translation of the free equation") {
    ContinuousVectorField vf{num(1), num(0)};
    CheckReport r = check_ode_lambda_symmetry(OdeSystem{2, num(0)}, vf, num(0), jet_box(), 1e-10);
    CHECK(r.symbolic == SymbolicVerdict::Zero);
    CHECK(r.pass);
}

TEST_CASE("continuum limit: first-order convergence with a frozen oracle") {
    ContinuousVectorField vf{num(0), num(1)};
    LimitOptions opts;
    opts.box_lo = opts.box_hi = 1.0; // degenerate box: every sample at u = 1
    ConvergenceReport rep = continuum_limit_check(vf, parse("1+h*u"), cvar("u"), opts);
    CHECK(rep.pass);
    REQUIRE(rep.errors.size() == 4);
    // oracle: E(h) = (e^h - 1)/h - 1 at u = 1, frozen from expm1
    CHECK(rep.errors[0] == doctest::Approx(0.051709180756476236).epsilon(1e-12));
    CHECK(rep.errors[1] == doctest::Approx(0.02542192752048078).epsilon(1e-12));
    CHECK(rep.errors[2] == doctest::Approx(0.012604820977153652).epsilon(1e-12));
    CHECK(rep.errors[3] == doctest::Approx(0.006276123250749999).epsilon(1e-12));
    for (double r : rep.ratios)
        CHECK((r >= 1.6 && r <= 2.4));
}

TEST_CASE("continuum limit: nonzero xi fixture converges at first order") {
    ContinuousVectorField vf{cvar("x"), cvar("u")};
    ConvergenceReport rep = continuum_limit_check(vf, parse("exp(h*u1)"), cvar("u1"));
    CHECK(rep.pass);
    for (double r : rep.ratios)
        CHECK((r >= 1.6 && r <= 2.4));
}

TEST_CASE("continuum limit: lam = 0 is exact") {
    ContinuousVectorField vf{num(0), num(1)};
    ConvergenceReport rep = continuum_limit_check(vf, num(1), num(0));
    CHECK(rep.exact);
    CHECK(rep.pass);
    for (double e : rep.errors)
        CHECK(e <= 1e-12);
}

TEST_CASE("continuum limit: inconsistent chi/lambda pairs are rejected") {
    ContinuousVectorField vf{num(0), num(1)};
    CHECK_THROWS_AS(continuum_limit_check(vf, parse("1+h*u^2"), cvar("u")), ExprError);
    CHECK_THROWS_AS(continuum_limit_check(vf, parse("2+h*u"), cvar("u")), ExprError);
    LimitOptions two_levels;
    two_levels.h_values = {0.1, 0.05};
    CHECK_THROWS_AS(continuum_limit_check(vf, parse("1+h*u"), cvar("u"), two_levels), ExprError);
}
