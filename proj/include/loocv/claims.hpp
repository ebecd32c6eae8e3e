#pragma once

#include "loocv/stability.hpp"

#include <string>
#include <vector>

namespace loocv {

struct ClaimCheck {
    std::string claim_id;
    bool pass = false;
    double measured = 0.0;
    double budget = 0.0;
    std::string detail;
};

// Test-oracle hook: runs the claim set against a deliberately wrong
// gradient so the suite's failure localization can be exercised.
// kde_drop_inv_n drops the 1/n factor of the kde data-gradient.
enum class GradientMutation { none, kde_drop_inv_n };

// Runs every per-estimator stability claim at n in {64, 256, 1024} with
// 200 probes each. Exact bounds are checked pointwise; constant-free
// bounds are checked as scale stability of the normalized ratio across
// the n grid (max over the grid at most 1.5x its min). pass iff
// measured <= budget. Deterministic given seed; report order is fixed
// by claim_id.
std::vector<ClaimCheck> verify_all(std::uint64_t seed,
                                   GradientMutation mutation = GradientMutation::none);

// claim_id,status,measured,budget lines.
std::string claims_to_csv(const std::vector<ClaimCheck>& checks);

}  // namespace loocv
