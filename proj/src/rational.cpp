#include "dlambda/rational.hpp"

namespace dlambda {

Rational Rational::from_string(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        mpq_class q;
        if (q.set_str(s, 10) != 0)
            throw std::invalid_argument("Rational: cannot parse '" + s + "'");
        q.canonicalize();
        return Rational(q);
    }
    // decimal literal: digits '.' digits -> numerator / 10^k, exact
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    mpz_class num;
    if (num.set_str(digits.empty() ? "0" : digits, 10) != 0)
        throw std::invalid_argument("Rational: cannot parse '" + s + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    mpq_class q(num, den);
    q.canonicalize();
    return Rational(q);
}

Rational Rational::pow(long e) const {
    if (e == 0)
        return Rational(1);
    if (is_zero()) {
        if (e < 0)
            throw std::domain_error("Rational: 0 raised to negative power");
        return Rational(0);
    }
    mpz_class num = q_.get_num(), den = q_.get_den();
    unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), k);
    mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), k);
    mpq_class r = (e > 0) ? mpq_class(pn, pd) : mpq_class(pd, pn);
    r.canonicalize();
    return Rational(r);
}

bool Rational::sqrt_exact(Rational* root) const {
    if (sign() < 0)
        return false;
    mpz_class num = q_.get_num(), den = q_.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0)
        return false;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    if (root)
        *root = Rational(mpq_class(rn, rd));
    return true;
}

std::string Rational::str() const {
    if (is_integer())
        return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational gcd(const Rational& a, const Rational& b) {
    // gcd over Q: gcd of numerators over lcm of denominators; used to pull
    // a common factor out of polynomial contents.
    if (a.is_zero())
        return b.abs();
    if (b.is_zero())
        return a.abs();
    mpz_class gn, gd;
    mpz_gcd(gn.get_mpz_t(), a.raw().get_num().get_mpz_t(), b.raw().get_num().get_mpz_t());
    mpz_lcm(gd.get_mpz_t(), a.raw().get_den().get_mpz_t(), b.raw().get_den().get_mpz_t());
    mpq_class g(gn, gd);
    g.canonicalize();
    return Rational(g);
}

} // namespace dlambda
