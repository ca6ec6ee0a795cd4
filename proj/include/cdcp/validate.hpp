#pragma once

#include <string>
#include <vector>

#include "cdcp/config.hpp"

namespace cdcp {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;      // observed discrepancy or statistic
    double reference = 0.0;  // target value
    double tolerance = 0.0;
};

// Invariant suite behind the `validate` subcommand: curve identities,
// martingale constancy, analytic-vs-MC moment agreement, reduction checks.
std::vector<CheckResult> run_validation(const RunConfig& cfg);

}  // namespace cdcp
