#pragma once

#include "dlambda/eval.hpp"
#include "dlambda/expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlambda {

struct SchemeError : ExprError {
    using ExprError::ExprError;
};

/// One-dimensional lattice. Only the uniform kind is constructed by the
/// front end; spacing is either a number or the symbolic parameter h.
struct Lattice {
    enum class Kind { Uniform, ExplicitPoints } kind = Kind::Uniform;
    std::optional<Rational> spacing; // nullopt = symbolic h
    std::vector<double> points;      // ExplicitPoints only
    double x0 = 0.0;

    bool symbolic_h() const { return kind == Kind::Uniform && !spacing; }
    double spacing_value(double fallback) const {
        return spacing ? spacing->to_double() : fallback;
    }
};

/// Difference scheme E = 0 on stencil [-a, b], with an optional solved form
/// u[b] = G(u[-a..b-1], ...).
struct Scheme {
    std::string name;
    int a = 0, b = 1;
    Expr equation;            // E, convention E = 0
    Lattice lattice;
    std::optional<Expr> solved; // G
    Binding builtin_bindings;   // function evaluators from the scheme file

    Scheme(std::string name_, int a_, int b_, Expr eq, Lattice lat = {});

    /// Window width a+b (number of initial values needed).
    int window() const { return a + b; }
};

/// Solve E for the leading variable u[b]; requires E affine in u[b] with a
/// u[b]-free nonzero coefficient. Stores and returns G.
Expr solve_for_leading(Scheme& s);

struct Trajectory {
    std::vector<double> u;  // u[0..n]
    double h = 0.0;
    double x0 = 0.0;
    bool divergent = false; // truncated by overflow/NaN
    Binding bindings;       // h, parameters, function evaluators used

    double x_at(size_t n) const { return x0 + h * static_cast<double>(n); }
};

/// Iterate the solved form from `init` (a+b values). Divergence
/// (|u| > 1e100 or non-finite) truncates the trajectory and sets the flag.
Trajectory iterate_trajectory(const Scheme& s, const std::vector<double>& init, int steps,
                              const Binding& bind);

/// max_n |E(window n)| along the trajectory.
double residual(const Scheme& s, const Trajectory& t);

/// Parse the scheme file format:
///   name = ex2
///   stencil = -1..1
///   lattice = uniform h        (or a numeric spacing)
///   equation = <expr> = 0
///   solved = <expr>            (optional)
///   functions = f: builtin(exp)   (exp | sin | poly c0 c1 ...)
Scheme load_scheme(const std::string& text);
Scheme load_scheme_file(const std::string& path);

} // namespace dlambda
