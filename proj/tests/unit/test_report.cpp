#include "dlambda/report.hpp"

#include <doctest.h>

using namespace dlambda;

namespace {

RunReport sample_report() {
    RunReport rep;
    rep.command = "check";
    rep.scheme = "ex2";
    rep.seed = 20260808;
    rep.inputs = {{"phi", "1"}, {"chi", "h*u[0] + 1"}};
    CheckReport cr;
    cr.scheme_name = "ex2";
    cr.symbolic = SymbolicVerdict::Zero;
    cr.tol = 1e-10;
    cr.pass = true;
    rep.checks.push_back(to_json(cr));
    rep.results = {{"note", "ok"}};
    rep.pass = true;
    rep.wall_ms = 7;
    return rep;
}

} // namespace

TEST_CASE("run report serializes losslessly") {
    RunReport rep = sample_report();
    json j = rep.to_json();
    CHECK(j.at("schema_version") == 1);
    RunReport back = RunReport::from_json(json::parse(j.dump()));
    CHECK(back.to_json() == j);
}

TEST_CASE("identical runs produce identical reports modulo wall clock") {
    RunReport a = sample_report();
    RunReport b = sample_report();
    b.wall_ms = 1234;
    json ja = a.to_json(), jb = b.to_json();
    ja.erase("wall_ms");
    jb.erase("wall_ms");
    CHECK(ja.dump() == jb.dump());
}

TEST_CASE("text rendering carries the verdict line") {
    RunReport rep = sample_report();
    std::string text = rep.to_text();
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("check") != std::string::npos);
    rep.pass = false;
    CHECK(rep.to_text().find("FAIL") != std::string::npos);
}

TEST_CASE("schema version is enforced") {
    json j = sample_report().to_json();
    j["schema_version"] = 999;
    CHECK_THROWS(RunReport::from_json(j));
}
