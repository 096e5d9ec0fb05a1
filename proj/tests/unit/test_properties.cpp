#include "dlambda/eval.hpp"
#include "dlambda/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dlambda;

namespace {

// random expression corpus: rational trees over lattice variables, h,
// function symbols and guarded exp/log subtrees
struct Gen {
    std::mt19937_64 rng{987654321};

    int pick(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }

    Expr atom() {
        switch (pick(6)) {
        case 0: return num(pick(7) - 3);
        case 1: return num(pick(5) + 1, pick(4) + 1);
        case 2: return param("h");
        case 3: return uvar(pick(3) - 1);
        case 4: return uvar(pick(3) - 1);
        default: return func("f", pick(3) - 1, pick(2), uvar(pick(3) - 1));
        }
    }

    // denominators that stay away from zero on the sample box
    Expr safe_denominator() {
        switch (pick(3)) {
        case 0: return num(pick(3) + 1);
        case 1: return add(num(1), mul(param("h"), uvar(pick(3) - 1)));
        default: return add(num(2), powi(uvar(pick(3) - 1), 2));
        }
    }

    Expr tree(int depth) {
        if (depth == 0)
            return atom();
        switch (pick(6)) {
        case 0: return add(tree(depth - 1), tree(depth - 1));
        case 1: return sub(tree(depth - 1), tree(depth - 1));
        case 2: return mul(tree(depth - 1), tree(depth - 1));
        case 3: return div(tree(depth - 1), safe_denominator());
        case 4: return powi(tree(depth - 1), pick(3) + 1);
        default:
            // exp/log with tame arguments
            return pick(2) ? expf(mul(param("h"), uvar(pick(3) - 1)))
                           : logf(add(num(2), powi(uvar(pick(3) - 1), 2)));
        }
    }
};

Binding corpus_binding(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.3, 1.2);
    Binding b;
    b.set_param("h", 0.1);
    for (int k = -4; k <= 4; ++k)
        b.set_lattice('u', k, unit(rng));
    b.set_func("f", func_exp());
    return b;
}

} // namespace

TEST_CASE("property corpus: roundtrip, idempotence, commutation, linearity, evaluation") {
    Gen gen;
    std::mt19937_64 brng(424242);
    int corpus = 0;
    int evaluated = 0;
    while (corpus < 220) {
        Expr e = gen.tree(3);
        ++corpus;

        // parse/print round trip
        Expr reparsed = parse(to_string(e));
        CHECK(identically_equal(e, reparsed));

        // normalize idempotence
        Expr n = normalize(e);
        CHECK(equal(n, normalize(n)));

        // shift/differentiate commutation: d/du[k+j] shift(e,j) = shift(d/du[k] e, j)
        int j = gen.pick(5) - 2;
        int k = gen.pick(3) - 1;
        Expr lhs = differentiate(shift(e, j), uvar(k + j));
        Expr rhs = shift(differentiate(e, uvar(k)), j);
        CHECK(identically_equal(lhs, rhs));

        // linearity with random rational weights
        Expr e2 = gen.tree(2);
        Rational a(gen.pick(5) - 2), b(gen.pick(3) + 1, 2);
        Expr combo = add(mul(num(a), e), mul(num(b), e2));
        Expr dlin = differentiate(combo, uvar(0));
        Expr dsum = add(mul(num(a), differentiate(e, uvar(0))),
                        mul(num(b), differentiate(e2, uvar(0))));
        CHECK(identically_equal(dlin, dsum));

        // evaluate(normalize(e)) == evaluate(e) on non-singular bindings
        Binding bind = corpus_binding(brng);
        try {
            double v1 = evaluate(e, bind);
            double v2 = evaluate(n, bind);
            if (std::isfinite(v1) && std::isfinite(v2)) {
                CHECK(std::abs(v1 - v2) <= 1e-12 * (1.0 + std::abs(v1)));
                ++evaluated;
            }
        } catch (const EvalError&) {
            // singular binding for this particular tree; skip the numeric leg
        }
    }
    CHECK(corpus >= 200);
    CHECK(evaluated >= 150);
}
