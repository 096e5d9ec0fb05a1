#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dlambda {

/// Exact rational number. Always stored in canonical form (reduced,
/// positive denominator).
class Rational {
  public:
    Rational() : q_(0) {}
    Rational(long n) : q_(static_cast<signed long>(n)) {}
    Rational(long num, long den) : q_(static_cast<signed long>(num), static_cast<unsigned long>(1)) {
        if (den == 0)
            throw std::domain_error("Rational: zero denominator");
        q_ /= mpq_class(static_cast<signed long>(den));
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    /// Parses "123", "-4/5" or a decimal literal like "0.25" (kept exact).
    static Rational from_string(const std::string& s);

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_one() const { return q_ == 1; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero())
            throw std::domain_error("Rational: division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

    Rational abs() const { return sign() < 0 ? -*this : *this; }
    Rational reciprocal() const {
        if (is_zero())
            throw std::domain_error("Rational: reciprocal of zero");
        return Rational(mpq_class(1) / q_);
    }

    /// b^e for integer e (e may be negative when b != 0).
    Rational pow(long e) const;

    /// True iff the rational is a perfect square; if so *root is set to the
    /// non-negative square root.
    bool sqrt_exact(Rational* root) const;

    double to_double() const { return q_.get_d(); }
    std::string str() const;

    const mpq_class& raw() const { return q_; }

  private:
    mpq_class q_;
};

Rational gcd(const Rational& a, const Rational& b);

} // namespace dlambda
