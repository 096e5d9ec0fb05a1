#include "dlambda/expr.hpp"

#include <algorithm>
#include <sstream>

namespace dlambda {

namespace {

Expr make(Kind k) { return std::make_shared<ExprNode>(k); }

ExprNode* mut(Expr& e) { return const_cast<ExprNode*>(e.get()); }

} // namespace

Expr num(const Rational& r) {
    Expr e = make(Kind::Number);
    mut(e)->value = r;
    return e;
}
Expr num(long n) { return num(Rational(n)); }
Expr num(long n, long d) { return num(Rational(n, d)); }

Expr param(const std::string& name) {
    Expr e = make(Kind::Param);
    mut(e)->name = name;
    return e;
}

Expr lattice(char base, int offset) {
    if (base != 'u' && base != 'x')
        throw ExprError("lattice variable must be u or x");
    Expr e = make(Kind::Lattice);
    mut(e)->base = base;
    mut(e)->offset = offset;
    return e;
}

Expr cvar(const std::string& name) {
    Expr e = make(Kind::ContVar);
    mut(e)->name = name;
    return e;
}

Expr func(const std::string& name, int offset, int deriv, Expr arg) {
    if (deriv < 0)
        throw ExprError("function symbol derivative order must be >= 0");
    Expr e = make(Kind::FuncSym);
    mut(e)->name = name;
    mut(e)->offset = offset;
    mut(e)->deriv = deriv;
    mut(e)->kids.push_back(std::move(arg));
    return e;
}

Expr add(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    Rational c(0);
    for (auto& t : terms) {
        if (!t)
            throw ExprError("null expression in add");
        if (t->kind == Kind::Add) {
            for (auto& k : t->kids) {
                if (k->kind == Kind::Number)
                    c += k->value;
                else
                    flat.push_back(k);
            }
        } else if (t->kind == Kind::Number) {
            c += t->value;
        } else {
            flat.push_back(std::move(t));
        }
    }
    if (!c.is_zero() || flat.empty())
        flat.push_back(num(c));
    if (flat.size() == 1)
        return flat[0];
    Expr e = make(Kind::Add);
    mut(e)->kids = std::move(flat);
    return e;
}

Expr add(Expr a, Expr b) { return add(std::vector<Expr>{std::move(a), std::move(b)}); }
Expr sub(Expr a, Expr b) { return add(std::move(a), neg(std::move(b))); }

Expr mul(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    Rational c(1);
    for (auto& f : factors) {
        if (!f)
            throw ExprError("null expression in mul");
        if (f->kind == Kind::Mul) {
            for (auto& k : f->kids) {
                if (k->kind == Kind::Number)
                    c *= k->value;
                else
                    flat.push_back(k);
            }
        } else if (f->kind == Kind::Number) {
            c *= f->value;
        } else {
            flat.push_back(std::move(f));
        }
    }
    if (c.is_zero())
        return num(0);
    if (!c.is_one() || flat.empty())
        flat.insert(flat.begin(), num(c));
    if (flat.size() == 1)
        return flat[0];
    Expr e = make(Kind::Mul);
    mut(e)->kids = std::move(flat);
    return e;
}

Expr mul(Expr a, Expr b) { return mul(std::vector<Expr>{std::move(a), std::move(b)}); }

Expr neg(Expr a) { return mul(num(-1), std::move(a)); }

Expr powi(Expr base, long e) {
    if (!base)
        throw ExprError("null expression in pow");
    if (e == 0)
        return num(1);
    if (e == 1)
        return base;
    if (base->kind == Kind::Number)
        return num(base->value.pow(e));
    if (base->kind == Kind::Pow)
        return powi(base->kids[0], base->exponent * e);
    Expr r = make(Kind::Pow);
    mut(r)->exponent = e;
    mut(r)->kids.push_back(std::move(base));
    return r;
}

Expr div(Expr a, Expr b) {
    if (b->kind == Kind::Number) {
        if (b->value.is_zero())
            throw ExprError("division by zero constant");
        return mul(num(b->value.reciprocal()), std::move(a));
    }
    return mul(std::move(a), powi(std::move(b), -1));
}

Expr expf(Expr arg) {
    if (arg->kind == Kind::Number && arg->value.is_zero())
        return num(1);
    if (arg->kind == Kind::Log)
        return arg->kids[0];
    Expr e = make(Kind::Exp);
    mut(e)->kids.push_back(std::move(arg));
    return e;
}

Expr logf(Expr arg) {
    if (arg->kind == Kind::Number && arg->value.is_one())
        return num(0);
    if (arg->kind == Kind::Exp)
        return arg->kids[0];
    Expr e = make(Kind::Log);
    mut(e)->kids.push_back(std::move(arg));
    return e;
}

bool is_zero(const Expr& e) { return e->kind == Kind::Number && e->value.is_zero(); }
bool is_one(const Expr& e) { return e->kind == Kind::Number && e->value.is_one(); }

int compare(const Expr& a, const Expr& b) {
    if (a.get() == b.get())
        return 0;
    if (a->kind != b->kind)
        return a->kind < b->kind ? -1 : 1;
    auto cmp_int = [](long x, long y) { return x < y ? -1 : (x > y ? 1 : 0); };
    switch (a->kind) {
    case Kind::Number:
        return a->value < b->value ? -1 : (b->value < a->value ? 1 : 0);
    case Kind::Param:
    case Kind::ContVar:
        return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Kind::Lattice:
        if (a->base != b->base)
            return a->base < b->base ? -1 : 1;
        return cmp_int(a->offset, b->offset);
    case Kind::FuncSym: {
        int c = a->name.compare(b->name);
        if (c != 0)
            return c < 0 ? -1 : 1;
        if (int d = cmp_int(a->offset, b->offset))
            return d;
        if (int d = cmp_int(a->deriv, b->deriv))
            return d;
        return compare(a->kids[0], b->kids[0]);
    }
    case Kind::Pow:
        if (int d = cmp_int(a->exponent, b->exponent))
            return d;
        return compare(a->kids[0], b->kids[0]);
    default: {
        if (a->kids.size() != b->kids.size())
            return a->kids.size() < b->kids.size() ? -1 : 1;
        for (size_t i = 0; i < a->kids.size(); ++i)
            if (int d = compare(a->kids[i], b->kids[i]))
                return d;
        return 0;
    }
    }
}

bool equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

void Stencil::absorb(int k) {
    if (!has_lattice) {
        lo = hi = k;
        has_lattice = true;
    } else {
        lo = std::min(lo, k);
        hi = std::max(hi, k);
    }
}

Stencil stencil(const Expr& e) {
    Stencil s;
    std::vector<const ExprNode*> stack{e.get()};
    while (!stack.empty()) {
        const ExprNode* n = stack.back();
        stack.pop_back();
        if (n->kind == Kind::Lattice || n->kind == Kind::FuncSym)
            s.absorb(n->offset);
        for (auto& k : n->kids)
            stack.push_back(k.get());
    }
    return s;
}

SymbolSet free_symbols(const Expr& e) {
    SymbolSet s;
    std::vector<const ExprNode*> stack{e.get()};
    while (!stack.empty()) {
        const ExprNode* n = stack.back();
        stack.pop_back();
        switch (n->kind) {
        case Kind::Param: s.params.insert(n->name); break;
        case Kind::Lattice: s.lattice_vars.insert({n->base, n->offset}); break;
        case Kind::ContVar: s.cont_vars.insert(n->name); break;
        case Kind::FuncSym: s.func_names.insert(n->name); break;
        default: break;
        }
        for (auto& k : n->kids)
            stack.push_back(k.get());
    }
    return s;
}

bool contains_lattice(const Expr& e, char base, int offset) {
    if (e->kind == Kind::Lattice)
        return e->base == base && e->offset == offset;
    for (auto& k : e->kids)
        if (contains_lattice(k, base, offset))
            return true;
    return false;
}

bool contains_param(const Expr& e, const std::string& name) {
    if (e->kind == Kind::Param)
        return e->name == name;
    for (auto& k : e->kids)
        if (contains_param(k, name))
            return true;
    return false;
}

Expr shift(const Expr& e, int j, int max_offset) {
    if (j == 0)
        return e;
    switch (e->kind) {
    case Kind::Number:
    case Kind::Param:
    case Kind::ContVar:
        return e;
    case Kind::Lattice: {
        long k = static_cast<long>(e->offset) + j;
        if (k > max_offset || k < -max_offset)
            throw ExprError("shift: offset " + std::to_string(k) + " exceeds bound " +
                            std::to_string(max_offset));
        return lattice(e->base, static_cast<int>(k));
    }
    case Kind::FuncSym: {
        long k = static_cast<long>(e->offset) + j;
        if (k > max_offset || k < -max_offset)
            throw ExprError("shift: offset " + std::to_string(k) + " exceeds bound " +
                            std::to_string(max_offset));
        return func(e->name, static_cast<int>(k), e->deriv, shift(e->kids[0], j, max_offset));
    }
    case Kind::Pow:
        return powi(shift(e->kids[0], j, max_offset), e->exponent);
    case Kind::Exp:
        return expf(shift(e->kids[0], j, max_offset));
    case Kind::Log:
        return logf(shift(e->kids[0], j, max_offset));
    case Kind::Add: {
        std::vector<Expr> kids;
        kids.reserve(e->kids.size());
        for (auto& k : e->kids)
            kids.push_back(shift(k, j, max_offset));
        return add(std::move(kids));
    }
    case Kind::Mul: {
        std::vector<Expr> kids;
        kids.reserve(e->kids.size());
        for (auto& k : e->kids)
            kids.push_back(shift(k, j, max_offset));
        return mul(std::move(kids));
    }
    }
    throw ExprError("shift: unreachable");
}

Expr differentiate(const Expr& e, const Expr& var) {
    if (var->kind != Kind::Lattice && var->kind != Kind::ContVar && var->kind != Kind::Param)
        throw ExprError("differentiate: target must be a variable or parameter");
    switch (e->kind) {
    case Kind::Number:
        return num(0);
    case Kind::Param:
    case Kind::Lattice:
    case Kind::ContVar:
        return equal(e, var) ? num(1) : num(0);
    case Kind::FuncSym: {
        Expr inner = differentiate(e->kids[0], var);
        if (is_zero(inner))
            return num(0);
        return mul(func(e->name, e->offset, e->deriv + 1, e->kids[0]), std::move(inner));
    }
    case Kind::Add: {
        std::vector<Expr> kids;
        for (auto& k : e->kids)
            kids.push_back(differentiate(k, var));
        return add(std::move(kids));
    }
    case Kind::Mul: {
        std::vector<Expr> terms;
        for (size_t i = 0; i < e->kids.size(); ++i) {
            Expr di = differentiate(e->kids[i], var);
            if (is_zero(di))
                continue;
            std::vector<Expr> fs;
            for (size_t j = 0; j < e->kids.size(); ++j)
                fs.push_back(j == i ? di : e->kids[j]);
            terms.push_back(mul(std::move(fs)));
        }
        return add(std::move(terms));
    }
    case Kind::Pow: {
        Expr db = differentiate(e->kids[0], var);
        if (is_zero(db))
            return num(0);
        return mul({num(e->exponent), powi(e->kids[0], e->exponent - 1), std::move(db)});
    }
    case Kind::Exp: {
        Expr da = differentiate(e->kids[0], var);
        if (is_zero(da))
            return num(0);
        return mul(expf(e->kids[0]), std::move(da));
    }
    case Kind::Log: {
        Expr da = differentiate(e->kids[0], var);
        if (is_zero(da))
            return num(0);
        return div(std::move(da), e->kids[0]);
    }
    }
    throw ExprError("differentiate: unreachable");
}

Expr substitute(const Expr& e, const Expr& target, const Expr& replacement) {
    if (target->kind != Kind::Lattice && target->kind != Kind::ContVar &&
        target->kind != Kind::Param)
        throw ExprError("substitute: target must be a variable or parameter");
    if (equal(e, target))
        return replacement;
    switch (e->kind) {
    case Kind::Number:
    case Kind::Param:
    case Kind::Lattice:
    case Kind::ContVar:
        return e;
    case Kind::FuncSym:
        return func(e->name, e->offset, e->deriv, substitute(e->kids[0], target, replacement));
    case Kind::Pow:
        return powi(substitute(e->kids[0], target, replacement), e->exponent);
    case Kind::Exp:
        return expf(substitute(e->kids[0], target, replacement));
    case Kind::Log:
        return logf(substitute(e->kids[0], target, replacement));
    case Kind::Add: {
        std::vector<Expr> kids;
        for (auto& k : e->kids)
            kids.push_back(substitute(k, target, replacement));
        return add(std::move(kids));
    }
    case Kind::Mul: {
        std::vector<Expr> kids;
        for (auto& k : e->kids)
            kids.push_back(substitute(k, target, replacement));
        return mul(std::move(kids));
    }
    }
    throw ExprError("substitute: unreachable");
}

// ---- printing ----

namespace {

// precedence: add=1, mul/div=2, pow=3, atom=4
int precedence(const Expr& e) {
    switch (e->kind) {
    case Kind::Add: return 1;
    case Kind::Mul: return 2;
    case Kind::Pow: return e->exponent < 0 ? 2 : 3;
    case Kind::Number: return e->value.sign() < 0 || !e->value.is_integer() ? 2 : 4;
    default: return 4;
    }
}

void print(const Expr& e, std::ostream& os);

void print_wrapped(const Expr& e, std::ostream& os, int parent_prec) {
    if (precedence(e) < parent_prec) {
        os << '(';
        print(e, os);
        os << ')';
    } else {
        print(e, os);
    }
}

// Splits a term into (negative?, bare term printed without its sign).
bool term_is_negative(const Expr& t) {
    if (t->kind == Kind::Number)
        return t->value.sign() < 0;
    if (t->kind == Kind::Mul && t->kids[0]->kind == Kind::Number)
        return t->kids[0]->value.sign() < 0;
    return false;
}

Expr term_negated(const Expr& t) {
    if (t->kind == Kind::Number)
        return num(-t->value);
    if (t->kind == Kind::Mul && t->kids[0]->kind == Kind::Number) {
        std::vector<Expr> kids = t->kids;
        kids[0] = num(-kids[0]->value);
        return mul(std::move(kids));
    }
    return neg(t);
}

void print(const Expr& e, std::ostream& os) {
    switch (e->kind) {
    case Kind::Number:
        os << e->value.str();
        return;
    case Kind::Param:
    case Kind::ContVar:
        os << e->name;
        return;
    case Kind::Lattice:
        os << e->base << '[' << e->offset << ']';
        return;
    case Kind::FuncSym:
        os << e->name;
        for (int i = 0; i < e->deriv; ++i)
            os << '\'';
        os << '[' << e->offset << "](";
        print(e->kids[0], os);
        os << ')';
        return;
    case Kind::Exp:
    case Kind::Log:
        os << (e->kind == Kind::Exp ? "exp(" : "log(");
        print(e->kids[0], os);
        os << ')';
        return;
    case Kind::Pow:
        if (e->exponent < 0) {
            os << "1/";
            print_wrapped(e->kids[0], os, 4);
            if (e->exponent != -1)
                os << '^' << -e->exponent;
        } else {
            print_wrapped(e->kids[0], os, 4);
            os << '^' << e->exponent;
        }
        return;
    case Kind::Add: {
        bool first = true;
        for (auto& t : e->kids) {
            if (!first && term_is_negative(t)) {
                os << " - ";
                print_wrapped(term_negated(t), os, 2);
            } else {
                if (!first)
                    os << " + ";
                print_wrapped(t, os, 2);
            }
            first = false;
        }
        return;
    }
    case Kind::Mul: {
        // separate reciprocal factors so products print with '/'
        std::vector<Expr> pos, rec;
        Rational c(1);
        for (auto& f : e->kids) {
            if (f->kind == Kind::Number)
                c *= f->value;
            else if (f->kind == Kind::Pow && f->exponent < 0)
                rec.push_back(powi(f->kids[0], -f->exponent));
            else
                pos.push_back(f);
        }
        bool neg_c = c.sign() < 0;
        Rational ca = neg_c ? -c : c;
        if (neg_c)
            os << '-';
        bool printed = false;
        // constant prints as numerator up front, denominator joining the '/' factors
        mpz_class nz = ca.raw().get_num();
        if (nz != 1 || pos.empty()) {
            os << nz.get_str();
            printed = true;
        }
        if (!ca.is_integer())
            rec.insert(rec.begin(), num(Rational(mpq_class(ca.raw().get_den()))));
        for (auto& f : pos) {
            if (printed)
                os << '*';
            print_wrapped(f, os, 3);
            printed = true;
        }
        for (auto& f : rec) {
            os << '/';
            print_wrapped(f, os, 3);
        }
        return;
    }
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print(e, os);
    return os.str();
}

} // namespace dlambda
