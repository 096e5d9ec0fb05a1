#include "dlambda/normal_form.hpp"

#include <algorithm>
#include <map>

namespace dlambda {

namespace {

struct AtomTable {
    std::vector<Expr> atoms;

    int intern(const Expr& a) {
        for (size_t i = 0; i < atoms.size(); ++i)
            if (equal(atoms[i], a))
                return static_cast<int>(i);
        atoms.push_back(a);
        return static_cast<int>(atoms.size() - 1);
    }
};

RatFunc to_rf(const Expr& e, AtomTable& tab) {
    switch (e->kind) {
    case Kind::Number:
        return RatFunc::constant(e->value);
    case Kind::Param:
    case Kind::Lattice:
    case Kind::ContVar:
        return RatFunc::variable(tab.intern(e));
    case Kind::FuncSym:
        return RatFunc::variable(tab.intern(func(e->name, e->offset, e->deriv, normalize(e->kids[0]))));
    case Kind::Exp: {
        Expr folded = expf(normalize(e->kids[0]));
        if (folded->kind != Kind::Exp)
            return to_rf(folded, tab);
        return RatFunc::variable(tab.intern(folded));
    }
    case Kind::Log: {
        Expr folded = logf(normalize(e->kids[0]));
        if (folded->kind != Kind::Log)
            return to_rf(folded, tab);
        return RatFunc::variable(tab.intern(folded));
    }
    case Kind::Add: {
        RatFunc r;
        for (auto& k : e->kids)
            r = r + to_rf(k, tab);
        return r;
    }
    case Kind::Mul: {
        RatFunc r = RatFunc::constant(Rational(1));
        for (auto& k : e->kids)
            r = r * to_rf(k, tab);
        return r;
    }
    case Kind::Pow: {
        RatFunc b = to_rf(e->kids[0], tab);
        if (e->exponent < 0 && b.is_zero())
            throw ExprError("normalize: division by identically zero expression: " +
                            to_string(e->kids[0]));
        return b.pow(e->exponent);
    }
    }
    throw ExprError("normal_form: unreachable");
}

Poly remap(const Poly& p, const std::vector<int>& newid) {
    Poly r;
    for (auto& [m, c] : p.terms) {
        Mono nm;
        for (auto& [var, e] : m.v)
            nm.v.push_back({newid[var], e});
        std::sort(nm.v.begin(), nm.v.end());
        r.terms.push_back({std::move(nm), c});
    }
    std::sort(r.terms.begin(), r.terms.end(),
              [](const auto& a, const auto& b) { return mono_cmp(a.first, b.first) > 0; });
    return r;
}

} // namespace

NormalForm normal_form(const Expr& e) {
    AtomTable tab;
    RatFunc rf = to_rf(e, tab);

    // remap atom ids into the canonical (expression total order) numbering
    std::vector<int> order(tab.atoms.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return compare(tab.atoms[a], tab.atoms[b]) < 0; });
    std::vector<int> newid(order.size());
    NormalForm nf;
    nf.atoms.resize(order.size());
    for (size_t rank = 0; rank < order.size(); ++rank) {
        newid[order[rank]] = static_cast<int>(rank);
        nf.atoms[rank] = tab.atoms[order[rank]];
    }
    // re-canonicalize under the new variable numbering
    nf.rf = RatFunc(remap(rf.num, newid), remap(rf.den, newid));
    return nf;
}

Expr rebuild(const Poly& p, const std::vector<Expr>& atoms) {
    if (p.is_zero())
        return num(0);
    std::vector<Expr> terms;
    for (auto& [m, c] : p.terms) {
        std::vector<Expr> factors;
        factors.push_back(num(c));
        for (auto& [var, e] : m.v)
            factors.push_back(powi(atoms[var], e));
        terms.push_back(mul(std::move(factors)));
    }
    return add(std::move(terms));
}

Expr rebuild(const RatFunc& rf, const std::vector<Expr>& atoms) {
    Expr n = rebuild(rf.num, atoms);
    if (rf.den.is_constant())
        return n; // den is monic, hence exactly 1
    Expr d = rebuild(rf.den, atoms);
    return mul(n, powi(d, -1));
}

Expr normalize(const Expr& e) {
    NormalForm nf = normal_form(e);
    return rebuild(nf.rf, nf.atoms);
}

bool identically_equal(const Expr& a, const Expr& b) {
    return is_zero(normalize(sub(a, b)));
}

} // namespace dlambda
