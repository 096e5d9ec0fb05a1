#pragma once

#include "dlambda/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace dlambda {

/// Sparse monomial over integer variable ids: (var, exp) pairs, ascending
/// var, exponents > 0.
struct Mono {
    std::vector<std::pair<int, int>> v;

    int total_deg() const {
        int d = 0;
        for (auto& [var, e] : v)
            d += e;
        return d;
    }
    int deg_of(int var) const {
        for (auto& [w, e] : v)
            if (w == var)
                return e;
        return 0;
    }
    bool is_one() const { return v.empty(); }
    bool operator==(const Mono& o) const { return v == o.v; }
};

/// Graded lexicographic order: total degree first, then exponents on the
/// lowest-id variables weigh most. Returns <0, 0, >0.
int mono_cmp(const Mono& a, const Mono& b);

Mono mono_mul(const Mono& a, const Mono& b);
bool mono_divides(const Mono& d, const Mono& m);
Mono mono_div(const Mono& m, const Mono& d); // requires d | m

/// Multivariate polynomial with exact rational coefficients; terms kept
/// sorted descending under mono_cmp, no zero coefficients.
class Poly {
  public:
    std::vector<std::pair<Mono, Rational>> terms; // descending

    Poly() = default;
    static Poly constant(const Rational& r);
    static Poly constant(long n) { return constant(Rational(n)); }
    static Poly variable(int id);

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].first.is_one()); }
    Rational constant_value() const; // requires is_constant
    bool operator==(const Poly& o) const { return terms == o.terms; }

    const Mono& lead_mono() const { return terms.front().first; }
    const Rational& lead_coeff() const { return terms.front().second; }

    int max_var() const; // -1 if constant
    int deg_in(int var) const;
    int total_deg() const;

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Rational& r) const;
    Poly pow(long e) const; // e >= 0

    Poly derivative(int var) const;

    /// View as univariate in `var`: exponent -> coefficient polynomial.
    std::map<int, Poly> coeffs_in(int var) const;
    static Poly from_coeffs_in(int var, const std::map<int, Poly>& cs);

    /// Substitute var := value (exact).
    Poly subst(int var, const Rational& value) const;

    /// Substitute var := n/d and clear the denominator: returns
    /// sum_k c_k n^k d^(deg-k). Equivalent to the original up to the
    /// (nonzero) factor d^deg, which is fine for equations.
    Poly subst_cleared(int var, const Poly& n, const Poly& d) const;

    double eval(const std::map<int, double>& point) const;
    Rational eval_exact(const std::map<int, Rational>& point) const;

    std::string str() const; // debug form: v<i> names
};

/// Exact division; throws std::domain_error if b does not divide a.
Poly divexact(const Poly& a, const Poly& b);
bool try_divide(const Poly& a, const Poly& b, Poly* q);

/// GCD, normalized integer-primitive with positive leading coefficient.
/// gcd of two constants is the rational gcd of the constants.
Poly poly_gcd(const Poly& a, const Poly& b);

/// True iff p is a perfect square; sets *root (leading coefficient positive).
bool poly_sqrt(const Poly& p, Poly* root);

/// Rational function num/den in canonical form: reduced (coprime), den != 0,
/// den monic under the global term order; zero is 0/1.
struct RatFunc {
    Poly num, den;

    RatFunc() : den(Poly::constant(1)) {}
    explicit RatFunc(Poly n) : num(std::move(n)), den(Poly::constant(1)) {}
    RatFunc(Poly n, Poly d);
    static RatFunc constant(const Rational& r) { return RatFunc(Poly::constant(r)); }
    static RatFunc variable(int id) { return RatFunc(Poly::variable(id)); }

    bool is_zero() const { return num.is_zero(); }
    bool is_poly() const { return den.is_constant(); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
    RatFunc operator-() const;
    RatFunc pow(long e) const;
    bool operator==(const RatFunc& o) const { return num == o.num && den == o.den; }

  private:
    void reduce();
};

} // namespace dlambda
