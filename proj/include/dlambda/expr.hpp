#pragma once

#include "dlambda/rational.hpp"

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dlambda {

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

enum class Kind : uint8_t {
    Number,   // exact rational constant
    Param,    // named scalar parameter: h, c0, alpha, ...
    Lattice,  // lattice variable u[k] or x[k], integer offset k
    ContVar,  // continuous variable: x, u, u1, u2, ...
    FuncSym,  // index-dependent function symbol f[k](arg), deriv order >= 0
    Add,      // n-ary sum
    Mul,      // n-ary product
    Pow,      // integer power
    Exp,      // exp(arg)
    Log,      // log(arg)
};

struct ExprError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Immutable expression node. Build through the factory functions below;
/// they flatten nested sums/products and fold constants.
class ExprNode {
  public:
    Kind kind;
    Rational value;            // Number
    std::string name;          // Param, ContVar, FuncSym
    char base = 0;             // Lattice: 'u' or 'x'
    int offset = 0;            // Lattice, FuncSym
    int deriv = 0;             // FuncSym derivative order
    long exponent = 0;         // Pow
    std::vector<Expr> kids;    // Add/Mul children; Pow base; Exp/Log/FuncSym argument

    explicit ExprNode(Kind k) : kind(k) {}
};

// ---- factories ----

Expr num(const Rational& r);
Expr num(long n);
Expr num(long n, long d);
Expr param(const std::string& name);
Expr lattice(char base, int offset);
inline Expr uvar(int k) { return lattice('u', k); }
inline Expr xvar(int k) { return lattice('x', k); }
Expr cvar(const std::string& name);
Expr func(const std::string& name, int offset, int deriv, Expr arg);
Expr add(std::vector<Expr> terms);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(std::vector<Expr> factors);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr neg(Expr a);
Expr powi(Expr base, long e);
Expr expf(Expr arg);
Expr logf(Expr arg);

// ---- structural queries ----

bool is_zero(const Expr& e);
bool is_one(const Expr& e);

/// Total order on expressions; equal(a,b) iff compare(a,b)==0.
int compare(const Expr& a, const Expr& b);
bool equal(const Expr& a, const Expr& b);

/// Offsets of all lattice variables and function symbols in e.
/// Returns {0,0} span only if none present (has_lattice tells them apart).
struct Stencil {
    int lo = 0, hi = 0;
    bool has_lattice = false;
    void absorb(int k);
};
Stencil stencil(const Expr& e);

struct SymbolSet {
    std::set<std::string> params;
    std::set<std::pair<char, int>> lattice_vars;
    std::set<std::string> cont_vars;
    std::set<std::string> func_names;
};
SymbolSet free_symbols(const Expr& e);

/// True if any Lattice, ContVar, FuncSym, Exp or Log node occurs in e whose
/// name/base matches a predicate; used internally but handy in tests.
bool contains_lattice(const Expr& e, char base, int offset);
bool contains_param(const Expr& e, const std::string& name);

// ---- transformations ----

/// Translate every lattice offset (variables and function symbols) by j.
/// Throws ExprError if a resulting offset leaves [-max_offset, max_offset].
Expr shift(const Expr& e, int j, int max_offset = 64);

/// Exact partial derivative with respect to a Lattice, ContVar or Param
/// node (the target must be one of those kinds).
Expr differentiate(const Expr& e, const Expr& var);

/// Replace every occurrence of a Lattice/ContVar/Param node by `replacement`.
Expr substitute(const Expr& e, const Expr& target, const Expr& replacement);

// ---- printing / parsing ----

std::string to_string(const Expr& e);

struct ParseError : ExprError {
    int line, column;
    ParseError(const std::string& msg, int line_, int col_)
        : ExprError(msg), line(line_), column(col_) {}
};

/// Parse the expression DSL. Grammar:
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' int)?
///   base   := number | ident | ident '[' int ']' | ident primes '[' int ']' '(' expr ')'
///           | '(' expr ')' | 'exp(' expr ')' | 'log(' expr ')'
/// u and x take lattice indices; bare u, x, u1, u2, ... are continuous
/// variables; h and any other bare identifier is a parameter.
Expr parse(const std::string& text);

// ---- normalization ----

/// Canonical form: multivariate rational normal form over exact rationals,
/// with exp/log/function-symbol subtrees as opaque atoms. normalize(e1) is
/// structurally equal to normalize(e2) iff e1 - e2 is the zero rational
/// function of the atoms. Throws ExprError on division by an expression
/// that is identically zero.
Expr normalize(const Expr& e);

/// normalize(sub(a,b)) == 0, decided exactly.
bool identically_equal(const Expr& a, const Expr& b);

} // namespace dlambda
