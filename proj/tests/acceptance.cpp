// Runs the full verify suite and prints one PASS/FAIL line per acceptance
// criterion. Criterion 10 additionally compares two complete runs byte by byte.
#include "apk/verify.hpp"

#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

std::vector<std::pair<std::string, std::string>> rendered(const apk::VerifyConfig& cfg, const apk::VerifyOutcome& out) {
    std::vector<std::pair<std::string, std::string>> files{{"summary.json", apk::summary_json(cfg, out).dump(2)}};
    for (const auto& [name, artifact] : out.artifacts) files.emplace_back(name + ".json", artifact.dump(2));
    return files;
}

} // namespace

int main() {
    const std::vector<std::pair<int, std::string>> criteria{
        {1, "lattice-diffraction"},
        {2, "autocorr"},
        {3, "estimator-agreement"},
        {4, "pseudometrics"},
        {5, "criteria-coherence"},
        {6, "palm-autocorr"},
        {7, "event-periods"},
        {8, "palm-b"},
        {9, "fibonacci"},
        {10, "determinism"},
    };
    const apk::VerifyConfig cfg;
    const auto first = apk::run_verify(cfg);
    const auto second = apk::run_verify(cfg);
    const bool identical = rendered(cfg, first) == rendered(cfg, second);

    bool all = true;
    for (const auto& [id, tag] : criteria) {
        bool ok = first.tag_passed(tag);
        std::string note;
        if (id == 10) {
            ok = ok && identical;
            note = identical ? " (repeat run byte-identical)" : " (repeat run differs)";
        }
        for (const auto& c : first.checks)
            if (c.tag == tag && !c.passed) note += " [failed: " + c.name + "]";
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " " << tag << note << "\n";
        all = all && ok;
    }
    std::cout << (all ? "ALL PASS" : "SOME FAILED") << "\n";
    return all ? 0 : 1;
}
