#include "sectoria/report.hpp"

#include <chrono>

namespace sectoria {

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["check"] = check;
    j["operator_spec"] = operator_spec;
    j["params"] = params;
    j["residuals"] = residuals;
    j["constants"] = constants;
    j["grid"] = grid;
    j["pass"] = pass;
    if (!notes.empty()) j["notes"] = notes;
    return j;
}

bool SuiteReport::summary_pass() const {
    for (const auto& r : checks)
        if (!r.pass) return false;
    return true;
}

nlohmann::json SuiteReport::to_json(bool with_timestamp) const {
    nlohmann::json j;
    j["environment"] = environment;
    j["checks"] = nlohmann::json::array();
    for (const auto& r : checks) j["checks"].push_back(r.to_json());
    j["summary_pass"] = summary_pass();
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        j["timestamp_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    }
    return j;
}

} // namespace sectoria
