#pragma once

#include "loocv/estimator.hpp"
#include "loocv/generator.hpp"
#include "loocv/loss.hpp"

#include <cstdint>
#include <vector>

namespace loocv {

enum class LooMethod { naive, fast };

struct LooResult {
    double loo_estimate = 0.0;
    std::vector<double> per_fold_losses;
    LooMethod method = LooMethod::naive;
};

struct RiskOracleResult {
    double risk = 0.0;
    long mc_samples = 0;
    double std_error = 0.0;
};

// Raised when a fold's fit fails; carries the offending fold index.
struct FoldError : std::runtime_error {
    FoldError(Index fold_, const std::string& what_)
        : std::runtime_error("fold " + std::to_string(fold_) + ": " + what_), fold(fold_) {}
    Index fold;
};

// LOO risk estimate by full refits: fold i is fitted on DeletedView(D, i)
// and evaluated at (X_i, Y_i).
LooResult loo_naive(const Estimator& est, const Loss& loss, const Dataset& d);

// Same per-fold losses via sufficient-statistic downdates; matches
// loo_naive to relative 1e-10 per fold. O(n) for mean/OLS; one O(n^2)
// kernel pass for kde/nw.
LooResult loo_fast(const Estimator& est, const Loss& loss, const Dataset& d);

// Monte Carlo estimate of the conditional risk E[L(T_D(X), Y) | D]: fits
// once on the full data and averages the loss over M fresh draws.
RiskOracleResult risk_oracle(const Estimator& est, const Loss& loss, const Dataset& d,
                             const DataGenerator& gen, long m, std::uint64_t seed);
RiskOracleResult risk_oracle(const Estimator& est, const Loss& loss, const Dataset& d,
                             const DataGenerator& gen, long m, Rng& rng);

// Mean loss of a fitted predictor over every observation of a dataset;
// a permutation-symmetric statistic used by the restriction-set module.
double mean_loss_over_observations(const FittedEstimator& f, const Loss& loss, const Dataset& d);

}  // namespace loocv
