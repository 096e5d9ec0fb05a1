#include "dlambda/eval.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

namespace dlambda {

FuncEval func_exp() {
    return [](int, double x) { return std::exp(x); };
}

FuncEval func_sin() {
    return [](int d, double x) {
        switch (d & 3) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
        }
    };
}

FuncEval func_poly(std::vector<double> coeffs) {
    return [c = std::move(coeffs)](int d, double x) {
        // Horner on the d-th derivative coefficients
        double v = 0.0;
        for (size_t i = c.size(); i-- > static_cast<size_t>(d);) {
            double fall = 1.0;
            for (int k = 0; k < d; ++k)
                fall *= static_cast<double>(i - k);
            v = v * x + c[i] * fall;
        }
        return v;
    };
}

namespace {

[[noreturn]] void eval_fail(const std::string& what, const Expr& e) {
    throw EvalError(what + ": " + to_string(e));
}

} // namespace

double evaluate(const Expr& e, const Binding& b) {
    switch (e->kind) {
    case Kind::Number:
        return e->value.to_double();
    case Kind::Param: {
        auto it = b.params.find(e->name);
        if (it == b.params.end())
            eval_fail("unbound parameter", e);
        return it->second;
    }
    case Kind::Lattice: {
        auto it = b.lattice.find({e->base, e->offset});
        if (it == b.lattice.end())
            eval_fail("unbound lattice variable", e);
        return it->second;
    }
    case Kind::ContVar: {
        auto it = b.cont.find(e->name);
        if (it == b.cont.end())
            eval_fail("unbound variable", e);
        return it->second;
    }
    case Kind::FuncSym: {
        auto it = b.funcs.find(e->name);
        if (it == b.funcs.end())
            eval_fail("unbound function symbol", e);
        return it->second(e->deriv, evaluate(e->kids[0], b));
    }
    case Kind::Add: {
        double s = 0.0;
        for (auto& k : e->kids)
            s += evaluate(k, b);
        return s;
    }
    case Kind::Mul: {
        double p = 1.0;
        for (auto& k : e->kids)
            p *= evaluate(k, b);
        return p;
    }
    case Kind::Pow: {
        double base = evaluate(e->kids[0], b);
        if (e->exponent < 0 && base == 0.0)
            eval_fail("division by zero", e);
        return std::pow(base, static_cast<double>(e->exponent));
    }
    case Kind::Exp:
        return std::exp(evaluate(e->kids[0], b));
    case Kind::Log: {
        double a = evaluate(e->kids[0], b);
        if (a <= 0.0)
            eval_fail("log of non-positive value", e);
        return std::log(a);
    }
    }
    throw EvalError("evaluate: unreachable");
}

Sampler::Sampler(const SampleBox& box, const std::vector<Expr>& exprs) : box_(box) {
    SymbolSet all;
    for (auto& e : exprs) {
        SymbolSet s = free_symbols(e);
        all.params.insert(s.params.begin(), s.params.end());
        all.lattice_vars.insert(s.lattice_vars.begin(), s.lattice_vars.end());
        all.cont_vars.insert(s.cont_vars.begin(), s.cont_vars.end());
        all.func_names.insert(s.func_names.begin(), s.func_names.end());
    }
    for (auto& p : all.params) {
        if (box.fixed.params.count(p))
            continue;
        if (!box.param_ranges.count(p))
            throw EvalError("sampling box binds no range for parameter " + p);
        params_.push_back(p);
    }
    for (auto& lv : all.lattice_vars) {
        if (box.fixed.lattice.count(lv))
            continue;
        if (!box.lattice_ranges.count(lv))
            throw EvalError(std::string("sampling box binds no range for ") + lv.first + "[" +
                            std::to_string(lv.second) + "]");
        lattice_.push_back(lv);
    }
    for (auto& cv : all.cont_vars) {
        if (box.fixed.cont.count(cv))
            continue;
        if (!box.cont_ranges.count(cv))
            throw EvalError("sampling box binds no range for variable " + cv);
        cont_.push_back(cv);
    }
    for (auto& f : all.func_names)
        if (!box.fixed.funcs.count(f))
            throw EvalError("sampling box binds no evaluator for function " + f);
}

Binding Sampler::draw(int point, int redraw) const {
    // per-point generator: independent of every other point
    std::mt19937_64 rng(box_.seed ^ (0x9e3779b97f4a7c15ull * static_cast<uint64_t>(point + 1)) ^
                        (0xbf58476d1ce4e5b9ull * static_cast<uint64_t>(redraw)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Binding b = box_.fixed;
    for (auto& p : params_) {
        auto [lo, hi] = box_.param_ranges.at(p);
        b.params[p] = lo + (hi - lo) * unit(rng);
    }
    for (auto& lv : lattice_) {
        auto [lo, hi] = box_.lattice_ranges.at(lv);
        b.lattice[lv] = lo + (hi - lo) * unit(rng);
    }
    for (auto& cv : cont_) {
        auto [lo, hi] = box_.cont_ranges.at(cv);
        b.cont[cv] = lo + (hi - lo) * unit(rng);
    }
    return b;
}

void Sampler::for_each(const std::function<bool(int, const Binding&)>& fn) const {
    auto run_point = [&](int i) {
        for (int redraw = 0;; ++redraw) {
            if (redraw > box_.max_rejects)
                throw EvalError("sampling domain exhausted after " +
                                std::to_string(box_.max_rejects) + " rejected points");
            bool ok = false;
            try {
                ok = fn(i, draw(i, redraw));
            } catch (const EvalError&) {
                ok = false;
            }
            if (ok)
                return;
        }
    };
    int workers = std::min(thread_count(), box_.samples);
    if (workers <= 1) {
        for (int i = 0; i < box_.samples; ++i)
            run_point(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= box_.samples)
                    return;
                try {
                    run_point(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err)
                        err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

bool equivalent(const Expr& e1, const Expr& e2, const SampleBox& box, double tol) {
    Sampler sampler(box, {e1, e2});
    std::vector<char> close(static_cast<size_t>(box.samples), 1);
    sampler.for_each([&](int i, const Binding& b) {
        double v1 = evaluate(e1, b);
        double v2 = evaluate(e2, b);
        if (!std::isfinite(v1) || !std::isfinite(v2))
            return false; // rejected point
        close[static_cast<size_t>(i)] = std::abs(v1 - v2) <= tol * (1.0 + std::abs(v1));
        return true;
    });
    for (char c : close)
        if (!c)
            return false;
    return true;
}

double max_abs_sample(const Expr& e, const SampleBox& box, double* mean_abs) {
    Sampler sampler(box, {e});
    std::vector<double> vals(static_cast<size_t>(box.samples), 0.0);
    sampler.for_each([&](int i, const Binding& b) {
        double v = evaluate(e, b);
        if (!std::isfinite(v))
            return false;
        vals[static_cast<size_t>(i)] = std::abs(v);
        return true;
    });
    double mx = 0.0, sum = 0.0;
    for (double v : vals) {
        mx = std::max(mx, v);
        sum += v;
    }
    if (mean_abs)
        *mean_abs = box.samples ? sum / static_cast<double>(box.samples) : 0.0;
    return mx;
}

int thread_count() {
    if (const char* s = std::getenv("DLAMBDA_THREADS")) {
        int n = std::atoi(s);
        if (n > 0)
            return n;
    }
    return 1;
}

} // namespace dlambda
