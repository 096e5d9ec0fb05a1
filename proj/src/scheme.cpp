#include "dlambda/scheme.hpp"

#include "dlambda/normal_form.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dlambda {

Scheme::Scheme(std::string name_, int a_, int b_, Expr eq, Lattice lat)
    : name(std::move(name_)), a(a_), b(b_), equation(std::move(eq)), lattice(std::move(lat)) {
    if (a < 0 || b < 0 || a + b == 0)
        throw SchemeError("scheme stencil bounds must be non-negative with a+b > 0");
    Stencil st = stencil(equation);
    if (!st.has_lattice)
        throw SchemeError("scheme equation contains no lattice variables");
    if (st.lo < -a || st.hi > b)
        throw SchemeError("scheme equation stencil [" + std::to_string(st.lo) + "," +
                          std::to_string(st.hi) + "] leaves declared [-" + std::to_string(a) +
                          "," + std::to_string(b) + "]");
    if (st.lo != -a || st.hi != b)
        throw SchemeError("scheme equation does not attain the declared stencil endpoints");
}

Expr solve_for_leading(Scheme& s) {
    Expr ub = uvar(s.b);
    Expr coeff = normalize(differentiate(s.equation, ub));
    if (is_zero(coeff))
        throw SchemeError("equation does not involve u[" + std::to_string(s.b) + "]");
    if (contains_lattice(coeff, 'u', s.b))
        throw SchemeError("unsupported scheme: equation is not affine in the leading variable "
                          "u[" + std::to_string(s.b) + "]; provide a solved form explicitly");
    // E = A*u[b] + B  ->  G = -B/A
    Expr rest = normalize(substitute(s.equation, ub, num(0)));
    Expr g = normalize(div(neg(rest), coeff));
    if (!is_zero(normalize(substitute(s.equation, ub, g))))
        throw SchemeError("internal: solved form does not annihilate the equation");
    s.solved = g;
    return g;
}

Trajectory iterate_trajectory(const Scheme& s, const std::vector<double>& init, int steps,
                              const Binding& bind) {
    if (!s.solved)
        throw SchemeError("iterate_trajectory requires a solved form; call solve_for_leading");
    if (static_cast<int>(init.size()) != s.window())
        throw SchemeError("iterate_trajectory: expected " + std::to_string(s.window()) +
                          " initial values, got " + std::to_string(init.size()));
    Trajectory t;
    t.bindings = bind;
    for (auto& [n, f] : s.builtin_bindings.funcs)
        t.bindings.funcs.emplace(n, f);
    auto ith = t.bindings.params.find("h");
    t.h = s.lattice.spacing ? s.lattice.spacing->to_double()
                            : (ith != t.bindings.params.end() ? ith->second : 0.0);
    if (t.h <= 0)
        throw SchemeError("iterate_trajectory: positive lattice spacing h required");
    t.bindings.params["h"] = t.h;
    t.x0 = s.lattice.x0;
    t.u = init;

    const Expr& g = *s.solved;
    for (int step = 0; step < steps; ++step) {
        // compute u at index i = window + step; window offsets k map to
        // u[i + k - b]
        size_t i = t.u.size();
        Binding b = t.bindings;
        for (int k = -s.a; k < s.b; ++k) {
            size_t idx = static_cast<size_t>(static_cast<long>(i) + k - s.b);
            b.set_lattice('u', k, t.u[idx]);
            b.set_lattice('x', k, t.x_at(idx));
        }
        b.set_lattice('x', s.b, t.x_at(i));
        double next;
        try {
            next = evaluate(g, b);
        } catch (const EvalError&) {
            t.divergent = true;
            break;
        }
        if (!std::isfinite(next) || std::abs(next) > 1e100) {
            t.divergent = true;
            break;
        }
        t.u.push_back(next);
    }
    return t;
}

double residual(const Scheme& s, const Trajectory& t) {
    if (static_cast<int>(t.u.size()) < s.window() + 1)
        throw SchemeError("residual: trajectory shorter than one full stencil");
    double mx = 0.0;
    for (size_t i = static_cast<size_t>(s.window()); i < t.u.size(); ++i) {
        Binding b = t.bindings;
        for (int k = -s.a; k <= s.b; ++k) {
            size_t idx = static_cast<size_t>(static_cast<long>(i) + k - s.b);
            b.set_lattice('u', k, t.u[idx]);
            b.set_lattice('x', k, t.x_at(idx));
        }
        mx = std::max(mx, std::abs(evaluate(s.equation, b)));
    }
    return mx;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

FuncEval parse_builtin(const std::string& spec, const std::string& where) {
    // exp | sin | poly c0 c1 ...
    std::istringstream is(spec);
    std::string kind;
    is >> kind;
    if (kind == "exp")
        return func_exp();
    if (kind == "sin")
        return func_sin();
    if (kind == "poly") {
        std::vector<double> cs;
        double c;
        while (is >> c)
            cs.push_back(c);
        if (cs.empty())
            throw SchemeError(where + ": poly builtin needs coefficients");
        return func_poly(std::move(cs));
    }
    throw SchemeError(where + ": unknown builtin '" + kind + "' (want exp|sin|poly)");
}

} // namespace

Scheme load_scheme(const std::string& text) {
    std::string name = "scheme";
    int a = -1, b = -1;
    std::optional<Expr> equation, solved;
    Lattice lat;
    std::map<std::string, FuncEval> funcs;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = "scheme file line " + std::to_string(lineno);
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SchemeError(where + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "name") {
            name = value;
        } else if (key == "stencil") {
            auto dots = value.find("..");
            if (dots == std::string::npos)
                throw SchemeError(where + ": stencil wants '-a..b'");
            int lo = std::stoi(trim(value.substr(0, dots)));
            int hi = std::stoi(trim(value.substr(dots + 2)));
            if (lo > 0 || hi < 0)
                throw SchemeError(where + ": stencil must span offset 0");
            a = -lo;
            b = hi;
        } else if (key == "lattice") {
            std::istringstream vs(value);
            std::string kind, sp;
            vs >> kind >> sp;
            if (kind != "uniform")
                throw SchemeError(where + ": only 'lattice = uniform <h>' is supported");
            if (sp != "h") {
                Rational r = Rational::from_string(sp);
                if (r.sign() <= 0)
                    throw SchemeError(where + ": lattice spacing must be positive");
                lat.spacing = r;
            }
        } else if (key == "equation") {
            // value is '<expr> = <expr>' (usually '= 0')
            auto eq2 = value.rfind('=');
            if (eq2 == std::string::npos)
                throw SchemeError(where + ": equation wants '<expr> = 0'");
            std::string lhs = trim(value.substr(0, eq2));
            std::string rhs = trim(value.substr(eq2 + 1));
            Expr e = parse(lhs);
            if (rhs != "0")
                e = sub(e, parse(rhs));
            equation = e;
        } else if (key == "solved") {
            solved = parse(value);
        } else if (key == "functions") {
            // 'f: builtin(exp)' possibly several separated by ';'
            std::istringstream fs(value);
            std::string item;
            while (std::getline(fs, item, ';')) {
                item = trim(item);
                if (item.empty())
                    continue;
                auto colon = item.find(':');
                if (colon == std::string::npos)
                    throw SchemeError(where + ": functions wants 'name: builtin(...)'");
                std::string fname = trim(item.substr(0, colon));
                std::string rest = trim(item.substr(colon + 1));
                auto open = rest.find("builtin(");
                auto close = rest.rfind(')');
                if (open != 0 || close == std::string::npos)
                    throw SchemeError(where + ": functions wants 'name: builtin(...)'");
                funcs[fname] = parse_builtin(rest.substr(8, close - 8), where);
            }
        } else {
            throw SchemeError(where + ": unknown key '" + key + "'");
        }
    }
    if (a < 0 || b < 0)
        throw SchemeError("scheme file: missing 'stencil' entry");
    if (!equation)
        throw SchemeError("scheme file: missing 'equation' entry");
    Scheme s(name, a, b, *equation, lat);
    if (solved) {
        // trust but verify the user's solved form
        Expr check = normalize(substitute(s.equation, uvar(s.b), *solved));
        if (!is_zero(check)) {
            SampleBox box;
            for (int k = -s.a; k <= s.b; ++k)
                box.range_lattice('u', k, 0.25, 1.0).range_lattice('x', k, 0.25, 1.0);
            box.range_param("h", 0.01, 0.2);
            for (auto& [n, f] : funcs)
                box.fixed.set_func(n, f);
            if (!equivalent(substitute(s.equation, uvar(s.b), *solved), num(0), box, 1e-8))
                throw SchemeError("scheme file: solved form does not satisfy the equation");
        }
        s.solved = solved;
    }
    for (auto& [n, f] : funcs)
        s.builtin_bindings.set_func(n, f);
    return s;
}

Scheme load_scheme_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemeError("cannot open scheme file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    Scheme s = load_scheme(ss.str());
    if (s.name == "scheme") {
        auto slash = path.find_last_of('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        auto dot = base.rfind('.');
        s.name = dot == std::string::npos ? base : base.substr(0, dot);
    }
    return s;
}

} // namespace dlambda
