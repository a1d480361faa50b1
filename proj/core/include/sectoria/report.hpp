#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sectoria {

/// Structured pass/fail record of a single identity check.
struct Report {
    std::string check;
    std::string operator_spec;
    nlohmann::json params = nlohmann::json::object();
    std::map<std::string, double> residuals;
    std::map<std::string, double> constants;
    nlohmann::json grid = nlohmann::json::object();
    bool pass = false;
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
};

/// Aggregate of the checks run by one CLI command.
struct SuiteReport {
    std::vector<Report> checks;
    nlohmann::json environment = nlohmann::json::object();

    bool summary_pass() const;
    nlohmann::json to_json(bool with_timestamp = true) const;
};

} // namespace sectoria
