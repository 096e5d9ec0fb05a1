#pragma once

#include "dlambda/expr.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace dlambda {

/// Numeric evaluator for a function symbol: (derivative order, point) -> value.
using FuncEval = std::function<double(int, double)>;

/// Built-in evaluator families for scheme files and fixtures.
FuncEval func_exp();
FuncEval func_sin();
FuncEval func_poly(std::vector<double> coeffs); // c0 + c1 x + c2 x^2 + ...

struct EvalError : ExprError {
    using ExprError::ExprError;
};

/// Numeric bindings for every free symbol of an expression.
struct Binding {
    std::map<std::string, double> params;
    std::map<std::pair<char, int>, double> lattice;
    std::map<std::string, double> cont;
    std::map<std::string, FuncEval> funcs;

    Binding& set_param(const std::string& n, double v) { params[n] = v; return *this; }
    Binding& set_lattice(char b, int k, double v) { lattice[{b, k}] = v; return *this; }
    Binding& set_cont(const std::string& n, double v) { cont[n] = v; return *this; }
    Binding& set_func(const std::string& n, FuncEval f) { funcs[n] = std::move(f); return *this; }
};

/// IEEE double value of e under b. Throws EvalError on unbound symbols and
/// domain violations (log of non-positive, division by zero), naming the
/// offending subexpression.
double evaluate(const Expr& e, const Binding& b);

/// Sampling domain: an interval per symbol, plus fixed parameter values and
/// function evaluators. Symbols bound in `fixed` are not sampled.
struct SampleBox {
    std::map<std::string, std::pair<double, double>> param_ranges;
    std::map<std::pair<char, int>, std::pair<double, double>> lattice_ranges;
    std::map<std::string, std::pair<double, double>> cont_ranges;
    Binding fixed;
    int samples = 64;
    uint64_t seed = 20260808;
    int max_rejects = 512;

    SampleBox& range_lattice(char b, int k, double lo, double hi) {
        lattice_ranges[{b, k}] = {lo, hi};
        return *this;
    }
    SampleBox& range_cont(const std::string& n, double lo, double hi) {
        cont_ranges[n] = {lo, hi};
        return *this;
    }
    SampleBox& range_param(const std::string& n, double lo, double hi) {
        param_ranges[n] = {lo, hi};
        return *this;
    }
};

/// Draws bindings for all free symbols of the given expressions; every free
/// symbol must either be fixed or have a range. Each sample point derives
/// its values from (seed, point index, redraw count), so results do not
/// depend on evaluation order and points can be evaluated in parallel.
/// A point where the callback reports a domain error (or returns false) is
/// redrawn, up to box.max_rejects times per point.
class Sampler {
  public:
    Sampler(const SampleBox& box, const std::vector<Expr>& exprs);

    /// Runs fn on box.samples admissible bindings; honors DLAMBDA_THREADS.
    /// fn must be pure per point; it returns true if the point is
    /// admissible (false = reject and redraw).
    void for_each(const std::function<bool(int, const Binding&)>& fn) const;

  private:
    Binding draw(int point, int redraw) const;

    SampleBox box_;
    std::vector<std::string> params_;
    std::vector<std::pair<char, int>> lattice_;
    std::vector<std::string> cont_;
};

/// True iff |e1-e2| <= tol*(1+|e1|) at every sample point of the box.
bool equivalent(const Expr& e1, const Expr& e2, const SampleBox& box, double tol);

/// max |e| over the sample points (also returns the mean in *mean_abs).
double max_abs_sample(const Expr& e, const SampleBox& box, double* mean_abs = nullptr);

/// Worker count for parallel sampling loops; reads DLAMBDA_THREADS, default 1.
int thread_count();

} // namespace dlambda
