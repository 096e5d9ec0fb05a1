#include "dlambda/poly.hpp"
#include "dlambda/rational.hpp"

#include <doctest.h>

#include <random>

using namespace dlambda;

TEST_CASE("rational arithmetic stays exact and canonical") {
    Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK(a - b == Rational(1, 6));
    CHECK(a * b == Rational(1, 18));
    CHECK(a / b == Rational(2));
    CHECK(Rational::from_string("0.25") == Rational(1, 4));
    CHECK(Rational::from_string("-4/6") == Rational(-2, 3));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
    CHECK_THROWS(Rational(1, 0));
    CHECK_THROWS(Rational(1) / Rational(0));
}

TEST_CASE("rational square roots") {
    Rational r;
    CHECK(Rational(9, 4).sqrt_exact(&r));
    CHECK(r == Rational(3, 2));
    CHECK_FALSE(Rational(2).sqrt_exact(&r));
    CHECK_FALSE(Rational(-4).sqrt_exact(&r));
}

TEST_CASE("polynomial arithmetic and division") {
    Poly x = Poly::variable(0), y = Poly::variable(1);
    Poly p = (x + y) * (x - y);
    Poly q = x * x - y * y;
    CHECK(p == q);

    Poly quotient;
    CHECK(try_divide(p, x + y, &quotient));
    CHECK(quotient == x - y);
    CHECK_FALSE(try_divide(x * x + y, x + y, nullptr));
}

TEST_CASE("multivariate gcd") {
    Poly x = Poly::variable(0), y = Poly::variable(1), h = Poly::variable(2);
    Poly g = x * y + Poly::constant(1);
    Poly a = g * (x + h);
    Poly b = g * (y * y + Poly::constant(Rational(2, 3)));
    Poly d = poly_gcd(a, b);
    CHECK(try_divide(d, g, nullptr));
    CHECK(try_divide(g, d, nullptr));

    // coprime inputs
    CHECK(poly_gcd(x + h, y + h).is_constant());
    // non-constant gcds come back integer-primitive with positive lead
    Poly c1 = (x * x).scaled(Rational(4)) + x.scaled(Rational(2));
    CHECK(poly_gcd(c1, x.scaled(Rational(6))) == x);
    CHECK(poly_gcd(Poly::constant(Rational(4)), Poly::constant(6)) == Poly::constant(2));
}

TEST_CASE("gcd stress: planted common factors are recovered") {
    std::mt19937_64 rng(2024);
    auto rand_poly = [&](int vars, int terms) {
        Poly p;
        for (int t = 0; t < terms; ++t) {
            Mono m;
            for (int v = 0; v < vars; ++v) {
                int e = static_cast<int>(rng() % 3);
                if (e)
                    m.v.push_back({v, e});
            }
            long c = static_cast<long>(rng() % 9) - 4;
            if (c == 0)
                c = 1;
            Poly term;
            term.terms.push_back({m, Rational(c)});
            p = p + term;
        }
        return p;
    };
    for (int trial = 0; trial < 30; ++trial) {
        Poly g = rand_poly(3, 3);
        Poly a = rand_poly(3, 4), b = rand_poly(3, 4);
        if (g.is_zero() || a.is_zero() || b.is_zero())
            continue;
        Poly d = poly_gcd(a * g, b * g);
        CHECK(try_divide(d, g, nullptr)); // g divides the gcd
        CHECK(try_divide(a * g, d, nullptr));
        CHECK(try_divide(b * g, d, nullptr));
    }
}

TEST_CASE("polynomial square root") {
    Poly x = Poly::variable(0), h = Poly::variable(1);
    Poly s = x * h + Poly::constant(Rational(1, 2));
    Poly root;
    CHECK(poly_sqrt(s * s, &root));
    CHECK(root == s);
    CHECK_FALSE(poly_sqrt(x * h + Poly::constant(1), &root));
    // 4h^2 -> 2h
    CHECK(poly_sqrt((h * h).scaled(Rational(4)), &root));
    CHECK(root == h.scaled(Rational(2)));
}

TEST_CASE("rational function canonical form") {
    Poly x = Poly::variable(0);
    RatFunc r(x * x - Poly::constant(1), x - Poly::constant(1));
    CHECK(r == RatFunc(x + Poly::constant(1)));
    RatFunc z(Poly(), x);
    CHECK(z.is_zero());
    CHECK(z.den == Poly::constant(1));
    CHECK_THROWS(RatFunc(x, Poly()));
}
