#pragma once

#include "dlambda/continuum.hpp"
#include "dlambda/determining.hpp"
#include "dlambda/reduction.hpp"

#include <json.hpp>

#include <string>

namespace dlambda {

using json = nlohmann::ordered_json;

json to_json(const CheckReport& r);
json to_json(const VerificationReport& r);
json to_json(const ConvergenceReport& r);

/// Machine-readable run report; the text rendering derives from the same
/// structure. The wall_ms field is the only part that varies between
/// identical runs.
struct RunReport {
    std::string command;
    std::string scheme;
    uint64_t seed = 0;
    json inputs = json::object();
    json checks = json::array();
    json results = json::object();
    bool pass = false;
    long wall_ms = 0;

    json to_json() const;
    static RunReport from_json(const json& j);
    std::string to_text() const;
};

} // namespace dlambda
