#include "dlambda/report.hpp"

#include "dlambda/version.hpp"

#include <sstream>

namespace dlambda {

json to_json(const CheckReport& r) {
    return json{{"name", "determining"},
                {"scheme", r.scheme_name},
                {"symbolic", to_string(r.symbolic)},
                {"max_residual", r.max_residual},
                {"mean_residual", r.mean_residual},
                {"samples", r.samples},
                {"seed", r.seed},
                {"tol", r.tol},
                {"pass", r.pass}};
}

json to_json(const VerificationReport& r) {
    const char* verdict = r.verdict == VerificationReport::Verdict::Pass ? "pass"
                          : r.verdict == VerificationReport::Verdict::Fail ? "fail"
                                                                           : "inconclusive";
    return json{{"name", "reduction"},
                {"trials", r.trials},
                {"steps", r.steps},
                {"tol", r.tol},
                {"max_deviation", r.max_deviation},
                {"points_checked", r.points_checked},
                {"points_skipped", r.points_skipped},
                {"divergent_trajectories", r.divergent},
                {"verdict", verdict},
                {"pass", r.pass()}};
}

json to_json(const ConvergenceReport& r) {
    return json{{"name", "continuum_limit"},
                {"h", r.h_values},
                {"errors", r.errors},
                {"ratios", r.ratios},
                {"exact", r.exact},
                {"monotone", r.monotone},
                {"detail", r.detail},
                {"pass", r.pass}};
}

json RunReport::to_json() const {
    return json{{"schema_version", kReportSchemaVersion},
                {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                {"command", command},
                {"scheme", scheme},
                {"seed", seed},
                {"inputs", inputs},
                {"checks", checks},
                {"results", results},
                {"pass", pass},
                {"wall_ms", wall_ms}};
}

RunReport RunReport::from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
        throw std::runtime_error("unsupported report schema version");
    RunReport r;
    r.command = j.at("command").get<std::string>();
    r.scheme = j.at("scheme").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.inputs = j.at("inputs");
    r.checks = j.at("checks");
    r.results = j.at("results");
    r.pass = j.at("pass").get<bool>();
    r.wall_ms = j.at("wall_ms").get<long>();
    return r;
}

namespace {

void render(const json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) {
            if (v.is_object() || v.is_array())
                render(v, prefix.empty() ? k : prefix + "." + k, os);
            else
                os << (prefix.empty() ? k : prefix + "." + k) << ": " << v.dump() << "\n";
        }
    } else if (j.is_array()) {
        if (!j.empty() && !j[0].is_structured()) {
            os << prefix << ": " << j.dump() << "\n";
            return;
        }
        int i = 0;
        for (auto& v : j)
            render(v, prefix + "[" + std::to_string(i++) + "]", os);
    } else {
        os << prefix << ": " << j.dump() << "\n";
    }
}

} // namespace

std::string RunReport::to_text() const {
    std::ostringstream os;
    os << kToolName << " " << kToolVersion << " " << command;
    if (!scheme.empty())
        os << " on " << scheme;
    os << "\n";
    render(inputs, "input", os);
    render(checks, "check", os);
    render(results, "result", os);
    os << (pass ? "PASS" : "FAIL") << " (" << wall_ms << " ms)\n";
    return os.str();
}

} // namespace dlambda
