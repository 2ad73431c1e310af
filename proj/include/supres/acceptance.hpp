#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace supres::acceptance {

struct Options {
    int threads = 1;
    std::uint64_t seed = 20240611;
    std::ostream* log = nullptr; // progress messages, if set
};

struct CriterionResult {
    std::string id;          // "1", "2", "5-lambda3", ...
    std::string description;
    bool gated = true;       // ungated lines are diagnostics and never fail a suite
    bool passed = false;
    std::string detail;
    double seconds = 0.0;    // wall time of the group of criteria this result came from
};

/// exactness, slopes-lambda2, slopes-lambda3, sigma, crb, oracles, phase,
/// fast (exactness + sigma + crb + oracles) and all.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
std::vector<CriterionResult> run_suite(const std::string& name, const Options& options);

/// "PASS  [id] description: detail (group 1.2 s)", with INFO for ungated lines.
std::string format(const CriterionResult& result);

/// True when every gated result passed.
bool all_passed(const std::vector<CriterionResult>& results);

} // namespace supres::acceptance
