#pragma once

#include "apk/io.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace apk {

struct VerifyConfig {
    std::uint64_t seed = 20240917;
    /// Bragg threshold as a multiple of the squared density.
    double theta_factor = 0.05;
    /// Tags to run; empty runs all.
    std::vector<std::string> only;
};

/// Keys: seed, theta_factor, only. Unknown keys are rejected.
VerifyConfig verify_config_from_json(const json& j);

struct CheckResult {
    std::string tag;
    std::string name;
    bool passed = false;
    json detail;
};

struct VerifyOutcome {
    std::vector<CheckResult> checks;
    /// Named JSON artifacts written next to the summary.
    std::map<std::string, json> artifacts;

    bool passed() const;
    bool tag_passed(const std::string& tag) const;
};

/// Tags in execution order.
const std::vector<std::string>& verify_tags();

/// Throws InvalidArgument on an unknown tag in cfg.only.
VerifyOutcome run_verify(const VerifyConfig& cfg);

/// Summary document: seed, per-check results and the overall flag.
json summary_json(const VerifyConfig& cfg, const VerifyOutcome& out);

} // namespace apk
