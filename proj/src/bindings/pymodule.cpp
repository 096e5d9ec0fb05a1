#include "dlambda/ansatz.hpp"
#include "dlambda/continuum.hpp"
#include "dlambda/report.hpp"
#include "dlambda/version.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dlambda;

namespace {

struct PyExpr {
    Expr e;
    std::string str() const { return to_string(e); }
};

PyExpr py_parse(const std::string& text) { return {parse(text)}; }

Binding binding_from_dict(const py::dict& d) {
    Binding b;
    for (auto item : d) {
        std::string key = py::cast<std::string>(item.first);
        if (key == "f" || key == "g") {
            // builtin name shortcut: "exp" | "sin"
            std::string v = py::cast<std::string>(item.second);
            b.set_func(key, v == "sin" ? func_sin() : func_exp());
            continue;
        }
        double v = py::cast<double>(item.second);
        if (key.size() >= 4 && (key[0] == 'u' || key[0] == 'x') && key[1] == '[') {
            int off = std::stoi(key.substr(2, key.size() - 3));
            b.set_lattice(key[0], off, v);
        } else if (key == "x" || key == "u" || (key[0] == 'u' && isdigit((unsigned char)key[1]))) {
            b.set_cont(key, v);
        } else {
            b.set_param(key, v);
        }
    }
    return b;
}

SampleBox default_box(const Scheme& s, double h, double lo, double hi, int samples,
                      uint64_t seed) {
    SampleBox box = make_default_box(s, h, lo, hi);
    box.samples = samples;
    box.seed = seed;
    return box;
}

std::string check_json(Scheme& s, const std::string& chi, const std::string& phi, double tol,
                       double h, int samples, uint64_t seed) {
    if (!s.solved)
        solve_for_leading(s);
    DiscreteVectorField vf(num(0), parse(phi));
    ChiMultiplier cm(parse(chi));
    CheckReport r = check_symmetry(s, vf, cm, default_box(s, h, 0.25, 1.0, samples, seed), tol);
    RunReport rep;
    rep.command = "check";
    rep.scheme = s.name;
    rep.seed = seed;
    rep.inputs = {{"phi", phi}, {"chi", chi}};
    rep.checks.push_back(to_json(r));
    rep.pass = r.pass;
    return rep.to_json().dump();
}

std::string find_json(Scheme& s, int degree, double tol, double h, int samples, uint64_t seed) {
    FindOptions fo;
    fo.tol = tol;
    fo.box = default_box(s, h, 0.25, 1.0, samples, seed);
    fo.solve.seed = seed;
    fo.solve.param_values["h"] = h;
    auto hits = find_lambda_symmetry(s, degree, fo);
    RunReport rep;
    rep.command = "find";
    rep.scheme = s.name;
    rep.seed = seed;
    rep.inputs = {{"chi_degree", degree}};
    json sols = json::array();
    for (auto& hit : hits) {
        rep.checks.push_back(to_json(hit.report));
        sols.push_back({{"phi", to_string(hit.phi)},
                        {"chi", to_string(hit.chi)},
                        {"lambda", to_string(normalize(hit.lambda))},
                        {"exact", hit.exact}});
    }
    rep.results["solutions"] = sols;
    rep.results["count"] = hits.size();
    rep.pass = true;
    return rep.to_json().dump();
}

std::string reduce_json(Scheme& s, const std::string& chi, int trials, int steps, double tol,
                        double h, uint64_t seed) {
    if (!s.solved)
        solve_for_leading(s);
    ChiMultiplier cm(parse(chi));
    InvariantForm inv = invariant(cm);
    ReducedMap red = reduce_order(s, inv);
    VerifyOptions vo;
    vo.trials = trials;
    vo.steps = steps;
    vo.tol = tol;
    vo.h_value = h;
    vo.seed = seed;
    VerificationReport vr = verify_reduction(s, inv, red, vo);
    RunReport rep;
    rep.command = "reduce";
    rep.scheme = s.name;
    rep.seed = seed;
    rep.inputs = {{"chi", chi}};
    rep.results["invariant"] = to_string(normalize(inv.v));
    rep.results["reduced_map"] = to_string(red.map);
    rep.results["map_symbolic"] = red.symbolic;
    rep.checks.push_back(to_json(vr));
    rep.pass = vr.pass();
    return rep.to_json().dump();
}

std::string limit_json(const std::string& lam, const std::string& xi, const std::string& phi,
                       const std::string& chi, double h_start, int levels, int samples,
                       uint64_t seed) {
    ContinuousVectorField vf{parse(xi), parse(phi)};
    Expr lam_e = parse(lam);
    Expr chi_e = chi.empty() ? expf(mul(param("h"), lam_e)) : parse(chi);
    LimitOptions lo;
    lo.h_values.clear();
    double h = h_start;
    for (int i = 0; i < levels; ++i, h /= 2)
        lo.h_values.push_back(h);
    lo.samples = samples;
    lo.seed = seed;
    ConvergenceReport cr = continuum_limit_check(vf, chi_e, lam_e, lo);
    RunReport rep;
    rep.command = "limit";
    rep.seed = seed;
    rep.inputs = {{"xi", xi}, {"phi", phi}, {"lambda", lam}};
    rep.checks.push_back(to_json(cr));
    rep.pass = cr.pass;
    return rep.to_json().dump();
}

} // namespace

PYBIND11_MODULE(_dlambda, m) {
    m.doc() = "lambda-symmetry workbench for difference schemes";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ExprError>(m, "ExprError");

    py::class_<PyExpr>(m, "Expr")
        .def("__str__", &PyExpr::str)
        .def("__repr__", [](const PyExpr& e) { return "Expr(" + e.str() + ")"; })
        .def("normalize", [](const PyExpr& e) { return PyExpr{normalize(e.e)}; })
        .def("shift", [](const PyExpr& e, int j) { return PyExpr{shift(e.e, j)}; })
        .def("diff",
             [](const PyExpr& e, const std::string& var) {
                 return PyExpr{differentiate(e.e, parse(var))};
             })
        .def("evaluate",
             [](const PyExpr& e, const py::dict& bindings) {
                 return evaluate(e.e, binding_from_dict(bindings));
             })
        .def("equal_to", [](const PyExpr& a, const PyExpr& b) {
            return identically_equal(a.e, b.e);
        });

    m.def("parse", &py_parse, py::arg("text"), "parse an expression");

    py::class_<Scheme>(m, "Scheme")
        .def_readonly("name", &Scheme::name)
        .def_readonly("a", &Scheme::a)
        .def_readonly("b", &Scheme::b)
        .def_property_readonly("equation",
                               [](const Scheme& s) { return to_string(s.equation); })
        .def_property_readonly("solved",
                               [](const Scheme& s) {
                                   return s.solved ? to_string(*s.solved) : std::string();
                               })
        .def("solve_leading", [](Scheme& s) { return to_string(solve_for_leading(s)); });

    m.def("load_scheme_file", &load_scheme_file, py::arg("path"));
    m.def("load_scheme", &load_scheme, py::arg("text"));

    m.def("check", &check_json, py::arg("scheme"), py::arg("chi"), py::arg("phi") = "1",
          py::arg("tol") = 1e-10, py::arg("h") = 0.1, py::arg("samples") = 64,
          py::arg("seed") = 20260808, "JSON report for a candidate lambda-symmetry check");
    m.def("find", &find_json, py::arg("scheme"), py::arg("degree"), py::arg("tol") = 1e-10,
          py::arg("h") = 0.1, py::arg("samples") = 64, py::arg("seed") = 20260808,
          "JSON report for the polynomial-ansatz search");
    m.def("reduce", &reduce_json, py::arg("scheme"), py::arg("chi"), py::arg("trials") = 20,
          py::arg("steps") = 100, py::arg("tol") = 1e-10, py::arg("h") = 0.1,
          py::arg("seed") = 20260808, "JSON report for invariant construction and reduction");
    m.def("limit", &limit_json, py::arg("lam"), py::arg("xi") = "0", py::arg("phi") = "1",
          py::arg("chi") = "", py::arg("h_start") = 0.1, py::arg("levels") = 4,
          py::arg("samples") = 64, py::arg("seed") = 20260808,
          "JSON report for the continuum-limit convergence check");
}
