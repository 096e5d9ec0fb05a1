#include "dlambda/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dlambda {

int mono_cmp(const Mono& a, const Mono& b) {
    int da = a.total_deg(), db = b.total_deg();
    if (da != db)
        return da < db ? -1 : 1;
    // lex on ascending var ids; a variable missing from a monomial has
    // exponent 0, and lower ids weigh most
    size_t i = 0, j = 0;
    while (i < a.v.size() || j < b.v.size()) {
        int va = i < a.v.size() ? a.v[i].first : INT32_MAX;
        int vb = j < b.v.size() ? b.v[j].first : INT32_MAX;
        if (va != vb) {
            // the monomial holding the lower-id variable is lex-greater
            return va < vb ? 1 : -1;
        }
        int ea = a.v[i].second, eb = b.v[j].second;
        if (ea != eb)
            return ea < eb ? -1 : 1;
        ++i;
        ++j;
    }
    return 0;
}

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r;
    size_t i = 0, j = 0;
    while (i < a.v.size() || j < b.v.size()) {
        if (j == b.v.size() || (i < a.v.size() && a.v[i].first < b.v[j].first))
            r.v.push_back(a.v[i++]);
        else if (i == a.v.size() || b.v[j].first < a.v[i].first)
            r.v.push_back(b.v[j++]);
        else {
            r.v.push_back({a.v[i].first, a.v[i].second + b.v[j].second});
            ++i;
            ++j;
        }
    }
    return r;
}

bool mono_divides(const Mono& d, const Mono& m) {
    size_t j = 0;
    for (auto& [var, e] : d.v) {
        while (j < m.v.size() && m.v[j].first < var)
            ++j;
        if (j == m.v.size() || m.v[j].first != var || m.v[j].second < e)
            return false;
    }
    return true;
}

Mono mono_div(const Mono& m, const Mono& d) {
    Mono r;
    size_t j = 0;
    for (auto& [var, e] : m.v) {
        int sub = 0;
        while (j < d.v.size() && d.v[j].first < var)
            ++j;
        if (j < d.v.size() && d.v[j].first == var)
            sub = d.v[j].second;
        if (e - sub < 0)
            throw std::domain_error("mono_div: not divisible");
        if (e - sub > 0)
            r.v.push_back({var, e - sub});
    }
    return r;
}

Poly Poly::constant(const Rational& r) {
    Poly p;
    if (!r.is_zero())
        p.terms.push_back({Mono{}, r});
    return p;
}

Poly Poly::variable(int id) {
    Poly p;
    p.terms.push_back({Mono{{{id, 1}}}, Rational(1)});
    return p;
}

Rational Poly::constant_value() const {
    if (terms.empty())
        return Rational(0);
    return terms[0].second;
}

int Poly::max_var() const {
    int m = -1;
    for (auto& [mono, c] : terms)
        for (auto& [var, e] : mono.v)
            m = std::max(m, var);
    return m;
}

int Poly::deg_in(int var) const {
    int d = 0;
    for (auto& [mono, c] : terms)
        d = std::max(d, mono.deg_of(var));
    return d;
}

int Poly::total_deg() const {
    int d = 0;
    for (auto& [mono, c] : terms)
        d = std::max(d, mono.total_deg());
    return d;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms)
        c = -c;
    return r;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
        if (j == b.terms.size()) {
            r.terms.push_back(a.terms[i++]);
        } else if (i == a.terms.size()) {
            r.terms.push_back(b.terms[j++]);
        } else {
            int c = mono_cmp(a.terms[i].first, b.terms[j].first);
            if (c > 0)
                r.terms.push_back(a.terms[i++]);
            else if (c < 0)
                r.terms.push_back(b.terms[j++]);
            else {
                Rational s = a.terms[i].second + b.terms[j].second;
                if (!s.is_zero())
                    r.terms.push_back({a.terms[i].first, s});
                ++i;
                ++j;
            }
        }
    }
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero())
        return Poly();
    // accumulate in a map keyed by monomial (descending)
    struct Gt {
        bool operator()(const Mono& x, const Mono& y) const { return mono_cmp(x, y) > 0; }
    };
    std::map<Mono, Rational, Gt> acc;
    for (auto& [ma, ca] : a.terms)
        for (auto& [mb, cb] : b.terms) {
            Mono m = mono_mul(ma, mb);
            auto it = acc.find(m);
            if (it == acc.end())
                acc.emplace(std::move(m), ca * cb);
            else {
                it->second += ca * cb;
                if (it->second.is_zero())
                    acc.erase(it);
            }
        }
    Poly r;
    r.terms.assign(acc.begin(), acc.end());
    return r;
}

Poly Poly::scaled(const Rational& r) const {
    if (r.is_zero())
        return Poly();
    Poly p = *this;
    for (auto& [m, c] : p.terms)
        c *= r;
    return p;
}

Poly Poly::pow(long e) const {
    if (e < 0)
        throw std::domain_error("Poly::pow: negative exponent");
    Poly r = Poly::constant(1);
    Poly base = *this;
    while (e > 0) {
        if (e & 1)
            r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Poly Poly::derivative(int var) const {
    Poly r;
    for (auto& [m, c] : terms) {
        int e = m.deg_of(var);
        if (e == 0)
            continue;
        Mono d;
        for (auto& [w, k] : m.v) {
            if (w == var) {
                if (k > 1)
                    d.v.push_back({w, k - 1});
            } else {
                d.v.push_back({w, k});
            }
        }
        Poly t;
        t.terms.push_back({d, c * Rational(e)});
        r = r + t;
    }
    return r;
}

std::map<int, Poly> Poly::coeffs_in(int var) const {
    std::map<int, Poly> cs;
    for (auto& [m, c] : terms) {
        int e = m.deg_of(var);
        Mono rest;
        for (auto& [w, k] : m.v)
            if (w != var)
                rest.v.push_back({w, k});
        Poly t;
        t.terms.push_back({rest, c});
        auto it = cs.find(e);
        if (it == cs.end())
            cs.emplace(e, t);
        else
            it->second = it->second + t;
    }
    for (auto it = cs.begin(); it != cs.end();)
        it = it->second.is_zero() ? cs.erase(it) : std::next(it);
    return cs;
}

Poly Poly::from_coeffs_in(int var, const std::map<int, Poly>& cs) {
    Poly r;
    Poly v = Poly::variable(var);
    for (auto& [e, c] : cs)
        r = r + c * v.pow(e);
    return r;
}

Poly Poly::subst(int var, const Rational& value) const {
    Poly r;
    for (auto& [m, c] : terms) {
        int e = m.deg_of(var);
        Mono rest;
        for (auto& [w, k] : m.v)
            if (w != var)
                rest.v.push_back({w, k});
        Poly t;
        Rational cc = c * value.pow(e);
        if (!cc.is_zero())
            t.terms.push_back({rest, cc});
        r = r + t;
    }
    return r;
}

Poly Poly::subst_cleared(int var, const Poly& n, const Poly& d) const {
    auto cs = coeffs_in(var);
    int deg = cs.empty() ? 0 : cs.rbegin()->first;
    Poly r;
    for (auto& [e, c] : cs)
        r = r + c * n.pow(e) * d.pow(deg - e);
    return r;
}

double Poly::eval(const std::map<int, double>& point) const {
    double s = 0.0;
    for (auto& [m, c] : terms) {
        double t = c.to_double();
        for (auto& [var, e] : m.v) {
            auto it = point.find(var);
            if (it == point.end())
                throw std::domain_error("Poly::eval: unbound variable v" + std::to_string(var));
            double p = 1.0, b = it->second;
            for (int k = 0; k < e; ++k)
                p *= b;
            t *= p;
        }
        s += t;
    }
    return s;
}

Rational Poly::eval_exact(const std::map<int, Rational>& point) const {
    Rational s(0);
    for (auto& [m, c] : terms) {
        Rational t = c;
        for (auto& [var, e] : m.v) {
            auto it = point.find(var);
            if (it == point.end())
                throw std::domain_error("Poly::eval_exact: unbound variable v" + std::to_string(var));
            t *= it->second.pow(e);
        }
        s += t;
    }
    return s;
}

std::string Poly::str() const {
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : terms) {
        if (!first)
            os << " + ";
        os << c.str();
        for (auto& [var, e] : m.v) {
            os << "*v" << var;
            if (e > 1)
                os << "^" << e;
        }
        first = false;
    }
    return os.str();
}

bool try_divide(const Poly& a, const Poly& b, Poly* q) {
    if (b.is_zero())
        throw std::domain_error("poly division by zero");
    Poly rem = a, quot;
    while (!rem.is_zero()) {
        if (!mono_divides(b.lead_mono(), rem.lead_mono()))
            return false;
        Mono m = mono_div(rem.lead_mono(), b.lead_mono());
        Rational c = rem.lead_coeff() / b.lead_coeff();
        Poly t;
        t.terms.push_back({m, c});
        quot = quot + t;
        rem = rem - t * b;
    }
    if (q)
        *q = quot;
    return true;
}

Poly divexact(const Poly& a, const Poly& b) {
    Poly q;
    if (!try_divide(a, b, &q))
        throw std::domain_error("divexact: not divisible");
    return q;
}

namespace {

// rational gcd of all coefficients (makes a poly integer-primitive)
Rational numeric_content(const Poly& p) {
    Rational g(0);
    for (auto& [m, c] : p.terms)
        g = gcd(g, c);
    return g;
}

// sign convention: positive leading coefficient, integer-primitive
Poly unit_normalize(const Poly& p) {
    if (p.is_zero())
        return p;
    Rational c = numeric_content(p);
    if (p.lead_coeff().sign() < 0)
        c = -c;
    return p.scaled(c.reciprocal());
}

// content of p viewed as univariate in var: recursive poly gcd of coefficients
Poly content_in(const Poly& p, int var);

// univariate image of p in `keep` with every other variable evaluated at
// the probe point; returns coefficient vector by ascending degree
std::vector<Rational> eval_to_univariate(const Poly& p, int keep,
                                         const std::map<int, Rational>& point) {
    std::vector<Rational> img(static_cast<size_t>(p.deg_in(keep)) + 1, Rational(0));
    for (auto& [m, c] : p.terms) {
        Rational t = c;
        int e = 0;
        for (auto& [var, k] : m.v) {
            if (var == keep) {
                e = k;
                continue;
            }
            t *= point.at(var).pow(k);
        }
        img[static_cast<size_t>(e)] += t;
    }
    while (img.size() > 1 && img.back().is_zero())
        img.pop_back();
    return img;
}

// degree of gcd of two univariate rational polynomials (empty vector = 0)
int univariate_gcd_degree(std::vector<Rational> r0, std::vector<Rational> r1) {
    auto trim = [](std::vector<Rational>& r) {
        while (!r.empty() && r.back().is_zero())
            r.pop_back();
    };
    trim(r0);
    trim(r1);
    if (r1.size() > r0.size())
        std::swap(r0, r1);
    while (!r1.empty()) {
        // monic divisor
        std::vector<Rational> m = r1;
        Rational lc = m.back();
        for (auto& c : m)
            c /= lc;
        // r = r0 mod m
        std::vector<Rational> r = std::move(r0);
        while (r.size() >= m.size()) {
            Rational f = r.back();
            size_t off = r.size() - m.size();
            if (!f.is_zero())
                for (size_t i = 0; i + 1 < m.size(); ++i)
                    r[i + off] -= f * m[i];
            r.pop_back();
        }
        trim(r);
        r0 = std::move(r1);
        r1 = std::move(r);
    }
    return static_cast<int>(r0.size()) - 1;
}

// Deterministic probe: if the gcd's degree in the top variable is zero, the
// gcd lives entirely in the contents, which keeps the recursion cheap when
// the inputs are coprime (the common case here).
bool probe_gcd_depends_on(const Poly& a, const Poly& b, int v) {
    static const long points[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    std::vector<int> vars;
    for (auto& [m, c] : a.terms)
        for (auto& [var, e] : m.v)
            if (var != v)
                vars.push_back(var);
    for (auto& [m, c] : b.terms)
        for (auto& [var, e] : m.v)
            if (var != v)
                vars.push_back(var);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

    for (int trial = 0; trial < 4; ++trial) {
        std::map<int, Rational> point;
        for (size_t i = 0; i < vars.size(); ++i)
            point[vars[i]] =
                Rational(points[(i + static_cast<size_t>(trial) * 3) % std::size(points)] +
                         17 * trial);
        std::vector<Rational> ia = eval_to_univariate(a, v, point);
        std::vector<Rational> ib = eval_to_univariate(b, v, point);
        if (static_cast<int>(ia.size()) - 1 != a.deg_in(v) ||
            static_cast<int>(ib.size()) - 1 != b.deg_in(v))
            continue; // leading coefficient vanished; retry elsewhere
        return univariate_gcd_degree(std::move(ia), std::move(ib)) > 0;
    }
    return true; // probes inconclusive: assume dependence, run the full PRS
}

Poly gcd_impl(const Poly& a, const Poly& b) {
    if (a.is_zero())
        return unit_normalize(b);
    if (b.is_zero())
        return unit_normalize(a);
    if (a.is_constant() && b.is_constant())
        return Poly::constant(gcd(a.constant_value(), b.constant_value()).abs());
    if (a.is_constant())
        return Poly::constant(gcd(a.constant_value(), numeric_content(b)).abs());
    if (b.is_constant())
        return Poly::constant(gcd(b.constant_value(), numeric_content(a)).abs());

    if (try_divide(a, b, nullptr))
        return unit_normalize(b);
    if (try_divide(b, a, nullptr))
        return unit_normalize(a);

    int v = std::max(a.max_var(), b.max_var());
    int da = a.deg_in(v), db = b.deg_in(v);
    if (da == 0)
        return gcd_impl(a, content_in(b, v));
    if (db == 0)
        return gcd_impl(content_in(a, v), b);

    if (!probe_gcd_depends_on(a, b, v))
        return gcd_impl(content_in(a, v), content_in(b, v));

    Poly ca = content_in(a, v), cb = content_in(b, v);
    Poly c = gcd_impl(ca, cb);
    Poly A = divexact(a, ca), B = divexact(b, cb);
    if (A.deg_in(v) < B.deg_in(v))
        std::swap(A, B);

    // primitive pseudo-remainder sequence in v
    while (true) {
        int dB = B.deg_in(v);
        // pseudo-remainder of A by B
        auto bcs = B.coeffs_in(v);
        Poly lb = bcs.rbegin()->second;
        Poly R = A;
        int dR = 0;
        while (!R.is_zero() && (dR = R.deg_in(v)) >= dB) {
            auto rcs = R.coeffs_in(v);
            auto it = rcs.find(dR);
            if (it == rcs.end())
                break;
            Poly lr = it->second;
            R = R * lb - B * lr * Poly::variable(v).pow(dR - dB);
        }
        if (R.is_zero())
            return unit_normalize(c * divexact(B, content_in(B, v)));
        if (R.deg_in(v) == 0)
            return unit_normalize(c);
        A = B;
        B = divexact(R, content_in(R, v));
    }
}

Poly content_in(const Poly& p, int var) {
    Poly g;
    for (auto& [e, c] : p.coeffs_in(var))
        g = gcd_impl(g, c);
    return g;
}

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) { return gcd_impl(a, b); }

bool poly_sqrt(const Poly& p, Poly* root) {
    if (p.is_zero()) {
        if (root)
            *root = Poly();
        return true;
    }
    // leading term must be a perfect square
    const Mono& lm = p.lead_mono();
    Mono half;
    for (auto& [var, e] : lm.v) {
        if (e % 2 != 0)
            return false;
        half.v.push_back({var, e / 2});
    }
    Rational rc;
    if (!p.lead_coeff().sqrt_exact(&rc))
        return false;
    Poly s;
    s.terms.push_back({half, rc});
    Poly two_s0 = s.scaled(Rational(2));
    Poly r = p - s * s;
    int guard = 0;
    while (!r.is_zero()) {
        if (++guard > 4096)
            return false;
        // next term t = lt(r) / (2 s0)
        if (!mono_divides(two_s0.lead_mono(), r.lead_mono()))
            return false;
        Mono tm = mono_div(r.lead_mono(), two_s0.lead_mono());
        Poly t;
        t.terms.push_back({tm, r.lead_coeff() / two_s0.lead_coeff()});
        // t must be strictly below s0 in the term order, else not a square
        if (mono_cmp(tm, half) >= 0)
            return false;
        s = s + t;
        r = p - s * s;
    }
    if (root)
        *root = s;
    return true;
}

RatFunc::RatFunc(Poly n, Poly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero())
        throw std::domain_error("RatFunc: zero denominator");
    reduce();
}

void RatFunc::reduce() {
    if (num.is_zero()) {
        den = Poly::constant(1);
        return;
    }
    Poly g = poly_gcd(num, den);
    if (!(g.is_constant() && g.constant_value().is_one())) {
        num = divexact(num, g);
        den = divexact(den, g);
    }
    // make the denominator monic under the global term order
    Rational lc = den.lead_coeff();
    if (!lc.is_one()) {
        Rational inv = lc.reciprocal();
        num = num.scaled(inv);
        den = den.scaled(inv);
    }
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.den == b.den)
        return RatFunc(a.num + b.num, a.den);
    return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den);
}
RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    if (a.den == b.den)
        return RatFunc(a.num - b.num, a.den);
    return RatFunc(a.num * b.den - b.num * a.den, a.den * b.den);
}
RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num * b.num, a.den * b.den);
}
RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero())
        throw std::domain_error("RatFunc: division by zero");
    return RatFunc(a.num * b.den, a.den * b.num);
}
RatFunc RatFunc::operator-() const {
    RatFunc r = *this;
    r.num = -r.num;
    return r;
}

RatFunc RatFunc::pow(long e) const {
    if (e == 0)
        return RatFunc(Poly::constant(1));
    if (e < 0) {
        if (is_zero())
            throw std::domain_error("RatFunc: zero raised to negative power");
        return RatFunc(den.pow(-e), num.pow(-e));
    }
    return RatFunc(num.pow(e), den.pow(e));
}

} // namespace dlambda
