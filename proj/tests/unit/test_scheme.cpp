#include "dlambda/scheme.hpp"

#include <doctest.h>

#include <cmath>

using namespace dlambda;

namespace {

Scheme ex2_scheme() {
    Expr rhs = parse("u[-1]*(1+(h/2)*u[-1])*(u[0]-u[-1])/h - (h/8)*u[-1]^4");
    return Scheme("ex2", 1, 1, sub(parse("(u[1]-2*u[0]+u[-1])/h^2"), rhs));
}

} // namespace

TEST_CASE("solve_for_leading: affine schemes") {
    Scheme s = ex2_scheme();
    Expr g = solve_for_leading(s);
    // G = 2u[0] - u[-1] + h^2 * F
    Expr expect = parse("2*u[0] - u[-1] + h^2*(u[-1]*(1+(h/2)*u[-1])*(u[0]-u[-1])/h - (h/8)*u[-1]^4)");
    CHECK(identically_equal(g, expect));

    Scheme tr("trivial", 0, 1, parse("u[1]-u[0]"));
    CHECK(identically_equal(solve_for_leading(tr), parse("u[0]")));

    Scheme bad("bad", 0, 1, parse("u[1]^2 - u[0]"));
    CHECK_THROWS_AS(solve_for_leading(bad), SchemeError);
}

TEST_CASE("scheme construction validates the stencil") {
    CHECK_THROWS_AS(Scheme("s", 1, 1, parse("u[1]-u[0]")), SchemeError);   // misses -1
    CHECK_THROWS_AS(Scheme("s", 0, 1, parse("u[2]-u[0]")), SchemeError);   // exceeds b
    CHECK_THROWS_AS(Scheme("s", 0, 1, parse("h^2")), SchemeError);         // no lattice vars
}

TEST_CASE("iterate_trajectory: residual by construction, divergence flag") {
    Scheme s = ex2_scheme();
    solve_for_leading(s);
    Binding bind;
    bind.set_param("h", 0.1);

    // bounded prefix: residual at machine precision
    Trajectory t = iterate_trajectory(s, {0.5, 0.55}, 15, bind);
    CHECK_FALSE(t.divergent);
    CHECK(residual(s, t) <= 1e-11);

    // the growing branch blows up and gets truncated with the flag set
    Trajectory td = iterate_trajectory(s, {0.5, 0.6}, 100, bind);
    CHECK(td.divergent);
    CHECK(td.u.size() < 100);
    for (double v : td.u)
        CHECK(std::isfinite(v));

    // perturbation oracle: bumping one value must blow the residual up
    Trajectory tp = t;
    tp.u[10] += 1e-3;
    CHECK(residual(s, tp) > 1e-6);
}

TEST_CASE("iterate_trajectory: constant scheme") {
    Scheme tr("trivial", 0, 1, parse("u[1]-u[0]"));
    solve_for_leading(tr);
    Binding bind;
    bind.set_param("h", 0.1);
    Trajectory t = iterate_trajectory(tr, {1.0}, 10, bind);
    REQUIRE(t.u.size() == 11);
    for (double v : t.u)
        CHECK(v == 1.0);
    CHECK(residual(tr, t) == 0.0);
}

TEST_CASE("scheme files: parsing, solved-form validation, functions") {
    Scheme s = load_scheme(R"(
# comment
name = demo
stencil = -1..1
lattice = uniform h
equation = u[1] - 2*u[0] + u[-1] = 0
solved = 2*u[0] - u[-1]
)");
    CHECK(s.name == "demo");
    CHECK(s.a == 1);
    CHECK(s.b == 1);
    REQUIRE(s.solved.has_value());

    CHECK_THROWS_AS(load_scheme("stencil = -1..1\n"), SchemeError); // no equation
    CHECK_THROWS_AS(load_scheme(R"(
stencil = -1..1
lattice = uniform h
equation = u[1] - 2*u[0] + u[-1] = 0
solved = u[0]
)"),
                    SchemeError); // wrong solved form

    Scheme sf = load_scheme(R"(
name = withf
stencil = -1..1
lattice = uniform 0.05
equation = (u[1]-2*u[0]+u[-1])/h^2 - (f[0](u[0]) - f[-1](u[-1]))/h = 0
functions = f: builtin(exp)
)");
    CHECK(sf.lattice.spacing.has_value());
    CHECK(sf.builtin_bindings.funcs.count("f") == 1);
    solve_for_leading(sf);
    Binding bind; // h comes from the lattice
    Trajectory t = iterate_trajectory(sf, {0.1, 0.12}, 50, bind);
    CHECK(t.h == doctest::Approx(0.05));
    if (!t.divergent)
        CHECK(residual(sf, t) <= 1e-10);
}
