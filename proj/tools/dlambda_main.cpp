#include "dlambda/ansatz.hpp"
#include "dlambda/continuum.hpp"
#include "dlambda/report.hpp"
#include "dlambda/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

using namespace dlambda;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFail = 2;

struct CommonOpts {
    double tol = 1e-10;
    int samples = 64;
    uint64_t seed = 20260808;
    double h = 0.1;
    double box_lo = 0.25, box_hi = 1.0;
    std::string emit = "text";
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--tol", o.tol, "numeric tolerance");
    cmd->add_option("--samples", o.samples, "sample points per numeric check");
    cmd->add_option("--seed", o.seed, "sampling seed");
    cmd->add_option("--h-value", o.h, "lattice spacing when the scheme keeps h symbolic");
    cmd->add_option("--box-lo", o.box_lo, "sampling box lower bound");
    cmd->add_option("--box-hi", o.box_hi, "sampling box upper bound");
    cmd->add_option("--emit", o.emit, "report format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", o.out, "write the report to a file instead of stdout");
}

SampleBox box_for(const Scheme& s, const CommonOpts& o) {
    SampleBox box = make_default_box(s, o.h, o.box_lo, o.box_hi);
    box.samples = o.samples;
    box.seed = o.seed;
    return box;
}

int emit(const RunReport& rep, const CommonOpts& o) {
    std::string body = o.emit == "json" ? rep.to_json().dump(2) + "\n" : rep.to_text();
    if (o.out.empty()) {
        std::cout << body;
    } else {
        std::ofstream f(o.out);
        if (!f)
            throw std::runtime_error("cannot write " + o.out);
        f << body;
    }
    return rep.pass ? kExitPass : kExitFail;
}

long elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

ChiMultiplier chi_from(const std::string& chi_text, const std::string& lambda_text) {
    if (!chi_text.empty())
        return ChiMultiplier(parse(chi_text));
    return ChiMultiplier::from_lambda(parse(lambda_text));
}

int run_check(const std::string& scheme_file, const std::string& phi_text,
              const std::string& chi_text, const std::string& lambda_text,
              const CommonOpts& o) {
    auto t0 = std::chrono::steady_clock::now();
    Scheme s = load_scheme_file(scheme_file);
    if (!s.solved)
        solve_for_leading(s);
    DiscreteVectorField vf(num(0), parse(phi_text));
    ChiMultiplier chi = chi_from(chi_text, lambda_text);
    CheckReport cr = check_symmetry(s, vf, chi, box_for(s, o), o.tol);

    RunReport rep;
    rep.command = "check";
    rep.scheme = s.name;
    rep.seed = o.seed;
    rep.inputs = {{"phi", to_string(vf.phi)},
                  {"chi", to_string(chi.chi)},
                  {"lambda", to_string(normalize(chi.lambda()))}};
    rep.checks.push_back(to_json(cr));
    rep.pass = cr.pass;
    rep.wall_ms = elapsed_ms(t0);
    return emit(rep, o);
}

int run_find(const std::string& scheme_file, int degree, bool with_phi, int phi_degree,
             const CommonOpts& o) {
    auto t0 = std::chrono::steady_clock::now();
    Scheme s = load_scheme_file(scheme_file);
    FindOptions fo;
    fo.ansatz.with_phi = with_phi;
    fo.ansatz.phi_degree = phi_degree;
    fo.tol = o.tol;
    fo.box = box_for(s, o);
    fo.solve.seed = o.seed;
    fo.solve.param_values["h"] = o.h;
    auto hits = find_lambda_symmetry(s, degree, fo);

    RunReport rep;
    rep.command = "find";
    rep.scheme = s.name;
    rep.seed = o.seed;
    rep.inputs = {{"chi_degree", degree}, {"with_phi", with_phi}};
    json sols = json::array();
    for (auto& h : hits) {
        rep.checks.push_back(to_json(h.report));
        sols.push_back({{"phi", to_string(h.phi)},
                        {"chi", to_string(h.chi)},
                        {"lambda", to_string(normalize(h.lambda))},
                        {"exact", h.exact}});
    }
    rep.results["solutions"] = sols;
    rep.results["count"] = hits.size();
    if (hits.empty())
        rep.results["note"] = "none found up to degree " + std::to_string(degree);
    rep.pass = true; // an empty list is a successful run
    rep.wall_ms = elapsed_ms(t0);
    return emit(rep, o);
}

int run_reduce(const std::string& scheme_file, const std::string& chi_text,
               const std::string& lambda_text, int trials, int steps, double init_lo,
               double init_hi, const CommonOpts& o) {
    auto t0 = std::chrono::steady_clock::now();
    Scheme s = load_scheme_file(scheme_file);
    if (!s.solved)
        solve_for_leading(s);
    ChiMultiplier chi = chi_from(chi_text, lambda_text);

    RunReport rep;
    rep.command = "reduce";
    rep.scheme = s.name;
    rep.seed = o.seed;
    rep.inputs = {{"chi", to_string(chi.chi)}};
    try {
        InvariantForm inv = invariant(chi);
        ReducedMap red = reduce_order(s, inv);
        VerifyOptions vo;
        vo.trials = trials;
        vo.steps = steps;
        vo.tol = o.tol;
        vo.init_lo = init_lo;
        vo.init_hi = init_hi;
        vo.h_value = o.h;
        vo.seed = o.seed;
        VerificationReport vr = verify_reduction(s, inv, red, vo);
        rep.results["invariant"] = to_string(normalize(inv.v));
        rep.results["reduced_map"] = to_string(red.map);
        rep.results["map_symbolic"] = red.symbolic;
        rep.checks.push_back(to_json(vr));
        rep.pass = vr.pass();
    } catch (const SchemeError& e) {
        rep.results["error"] = e.what();
        rep.pass = false;
    } catch (const ExprError& e) {
        rep.results["error"] = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return emit(rep, o);
}

int run_evolve(const std::string& scheme_file, const std::string& init_text, int steps,
               const std::string& chi_text, const CommonOpts& o) {
    Scheme s = load_scheme_file(scheme_file);
    if (!s.solved)
        solve_for_leading(s);
    std::vector<double> init;
    {
        std::istringstream is(init_text);
        std::string tok;
        while (std::getline(is, tok, ','))
            init.push_back(std::stod(tok));
    }
    Binding bind;
    bind.set_param("h", o.h);
    Trajectory t = iterate_trajectory(s, init, steps, bind);

    std::optional<InvariantForm> inv;
    if (!chi_text.empty())
        inv = invariant(ChiMultiplier(parse(chi_text)));
    std::vector<double> vs;
    if (inv)
        vs = invariant_series(*inv, t);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file)
            throw std::runtime_error("cannot write " + o.out);
        os = &file;
    }
    (*os) << (inv ? "n,u_n,v_n\n" : "n,u_n\n");
    os->precision(17);
    for (size_t n = 0; n < t.u.size(); ++n) {
        (*os) << n << "," << t.u[n];
        if (inv) {
            if (n < vs.size())
                (*os) << "," << vs[n];
            else
                (*os) << ",";
        }
        (*os) << "\n";
    }
    if (t.divergent)
        std::cerr << "note: trajectory truncated after " << t.u.size()
                  << " values (divergence detected)\n";
    return kExitPass;
}

int run_limit(const std::string& xi_text, const std::string& phi_text,
              const std::string& lambda_text, const std::string& chi_text, double h_start,
              int levels, const CommonOpts& o) {
    auto t0 = std::chrono::steady_clock::now();
    if (levels < 3)
        throw CLI::ValidationError("--levels", "needs at least 3 grid levels for ratios");
    ContinuousVectorField vf{parse(xi_text), parse(phi_text)};
    Expr lam = parse(lambda_text);
    Expr chi = chi_text.empty() ? expf(mul(param("h"), lam)) : parse(chi_text);

    LimitOptions lo;
    lo.h_values.clear();
    double h = h_start;
    for (int i = 0; i < levels; ++i, h /= 2)
        lo.h_values.push_back(h);
    lo.samples = o.samples;
    lo.seed = o.seed;
    lo.box_lo = o.box_lo;
    lo.box_hi = o.box_hi;
    ConvergenceReport cr = continuum_limit_check(vf, chi, lam, lo);

    RunReport rep;
    rep.command = "limit";
    rep.scheme = "";
    rep.seed = o.seed;
    rep.inputs = {{"xi", to_string(vf.xi)},
                  {"phi", to_string(vf.phi)},
                  {"lambda", to_string(lam)},
                  {"chi", to_string(chi)},
                  {"h_start", h_start},
                  {"levels", levels}};
    rep.checks.push_back(to_json(cr));
    rep.pass = cr.pass;
    rep.wall_ms = elapsed_ms(t0);
    return emit(rep, o);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lambda-symmetry workbench for difference schemes"};
    app.set_version_flag("--version", std::string(dlambda::kToolVersion));
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "check a candidate lambda-symmetry");
    std::string check_file, check_phi = "1", check_chi, check_lambda;
    CommonOpts check_o;
    check->add_option("scheme", check_file, "scheme file")->required();
    check->add_option("--phi", check_phi, "phi component (default 1)");
    auto* copt = check->add_option("--chi", check_chi, "multiplier chi");
    auto* lopt = check->add_option("--lambda", check_lambda, "lambda (chi = exp(h*lambda))");
    copt->excludes(lopt);
    add_common(check, check_o);

    // find
    auto* find = app.add_subcommand("find", "search for lambda-symmetries by ansatz");
    std::string find_file;
    int find_degree = 1, find_phi_degree = 0;
    bool find_with_phi = false;
    CommonOpts find_o;
    find->add_option("scheme", find_file, "scheme file")->required();
    find->add_option("--chi-degree", find_degree, "polynomial degree of the chi ansatz")
        ->required();
    find->add_flag("--with-phi", find_with_phi, "search a polynomial phi too");
    find->add_option("--phi-degree", find_phi_degree, "degree of the phi ansatz");
    add_common(find, find_o);

    // reduce
    auto* reduce = app.add_subcommand("reduce", "build the invariant and reduce the order");
    std::string red_file, red_chi, red_lambda;
    int red_trials = 20, red_steps = 100;
    double red_lo = 0.0, red_hi = 1.0;
    CommonOpts red_o;
    reduce->add_option("scheme", red_file, "scheme file")->required();
    auto* rcopt = reduce->add_option("--chi", red_chi, "multiplier chi");
    auto* rlopt = reduce->add_option("--lambda", red_lambda, "lambda (chi = exp(h*lambda))");
    rcopt->excludes(rlopt);
    reduce->add_option("--verify-trials", red_trials, "random trajectories for verification");
    reduce->add_option("--steps", red_steps, "steps per trajectory");
    reduce->add_option("--init-lo", red_lo, "initial-value box lower bound");
    reduce->add_option("--init-hi", red_hi, "initial-value box upper bound");
    add_common(reduce, red_o);

    // evolve
    auto* evolve = app.add_subcommand("evolve", "iterate a trajectory and dump CSV");
    std::string ev_file, ev_init, ev_chi;
    int ev_steps = 100;
    CommonOpts ev_o;
    evolve->add_option("scheme", ev_file, "scheme file")->required();
    evolve->add_option("--init", ev_init, "comma-separated initial values")->required();
    evolve->add_option("--steps", ev_steps, "steps to iterate");
    evolve->add_option("--chi", ev_chi, "also print the invariant column for this chi");
    add_common(evolve, ev_o);

    // limit
    auto* limit = app.add_subcommand("limit", "continuum-limit convergence check");
    std::string lim_xi = "0", lim_phi = "1", lim_lambda, lim_chi;
    double lim_h = 0.1;
    int lim_levels = 4;
    CommonOpts lim_o;
    limit->add_option("--xi", lim_xi, "xi(x,u)");
    limit->add_option("--phi", lim_phi, "phi(x,u)");
    limit->add_option("--lambda", lim_lambda, "lambda(x,u,u1)")->required();
    limit->add_option("--chi", lim_chi, "finite-h multiplier (default exp(h*lambda))");
    limit->add_option("--h-start", lim_h, "coarsest spacing");
    limit->add_option("--levels", lim_levels, "number of halved levels");
    add_common(limit, lim_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (check->parsed()) {
            if (check_chi.empty() && check_lambda.empty())
                throw CLI::ValidationError("check", "one of --chi/--lambda is required");
            return run_check(check_file, check_phi, check_chi, check_lambda, check_o);
        }
        if (find->parsed())
            return run_find(find_file, find_degree, find_with_phi, find_phi_degree, find_o);
        if (reduce->parsed()) {
            if (red_chi.empty() && red_lambda.empty())
                throw CLI::ValidationError("reduce", "one of --chi/--lambda is required");
            return run_reduce(red_file, red_chi, red_lambda, red_trials, red_steps, red_lo,
                              red_hi, red_o);
        }
        if (evolve->parsed())
            return run_evolve(ev_file, ev_init, ev_steps, ev_chi, ev_o);
        if (limit->parsed())
            return run_limit(lim_xi, lim_phi, lim_lambda, lim_chi, lim_h, lim_levels, lim_o);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dlambda::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dlambda::SchemeError& e) {
        std::cerr << "scheme error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dlambda::ExprError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
