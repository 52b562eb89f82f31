#pragma once

#include <string>
#include <vector>

#include "rcq/index.hpp"

namespace rcq {

struct CheckResult {
    std::string name;
    bool pass = true;
    uint64_t trials = 0;
    uint64_t violations = 0;
    double worst_slack = 0.0;  // largest relative deviation observed
};

struct ValidationReport {
    std::vector<CheckResult> entries;
    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

// Property suites over a built index. `budget` scales trial counts; all
// randomness is seeded, so reports are byte-stable across runs.
ValidationReport validate_structures(const Index& idx, uint64_t budget, uint64_t seed);
ValidationReport validate_coresets(const Index& idx, uint64_t budget, uint64_t seed);
ValidationReport validate_clustering(const Index& idx, uint64_t budget, uint64_t seed);
ValidationReport validate_extent(const Index& idx, uint64_t budget, uint64_t seed);
ValidationReport validate_all(const Index& idx, uint64_t budget, uint64_t seed);

std::string report_to_json(const ValidationReport& rep);

}  // namespace rcq
