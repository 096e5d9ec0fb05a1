#pragma once

#include "dlambda/expr.hpp"
#include "dlambda/poly.hpp"

#include <vector>

namespace dlambda {

/// Rational normal form of an expression over its atoms. Atoms are the
/// irreducible leaves (parameters, lattice/continuous variables) plus
/// exp/log/function-symbol subtrees, whose arguments are themselves
/// normalized. Atom ids are assigned in the expression total order, so
/// equal rational functions produce identical NormalForm contents.
struct NormalForm {
    RatFunc rf;
    std::vector<Expr> atoms; // atoms[id] is the atom for variable id

    bool is_zero() const { return rf.is_zero(); }
};

NormalForm normal_form(const Expr& e);

/// Rebuilds an Expr from a rational function over the given atoms, in the
/// canonical printing order (terms descending under the global term order).
Expr rebuild(const RatFunc& rf, const std::vector<Expr>& atoms);
Expr rebuild(const Poly& p, const std::vector<Expr>& atoms);

} // namespace dlambda
