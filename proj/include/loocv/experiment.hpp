#pragma once

#include "loocv/bounds.hpp"
#include "loocv/loo.hpp"
#include "loocv/restriction.hpp"

#include <optional>
#include <string>

namespace loocv {

struct RestrictionParams {
    double eps_k = 0.5;
    int reps = 500;
};

struct ExperimentConfig {
    std::string name = "experiment";
    DataGenerator generator = DataGenerator::uniform_sine();
    Estimator estimator = Estimator::kde(0.1);
    Loss loss{LossKind::identity_abs};
    std::vector<Index> n_grid = {32, 64, 128, 256, 512, 1024, 2048};
    int reps = 200;
    long oracle_m = 100000;
    double eps_tail = 0.02;
    std::vector<double> eps_bound_grid;
    std::uint64_t base_seed = 1;
    bool two_sided = true;  // doubles the one-sided bounds
    std::optional<RestrictionParams> restriction;

    // Bound-evaluation inputs.
    Growth growth = Growth::linear;
    double lipschitz_const = 1.0;
    double c_l = 0.0, c_q = 1.0;
    int profile_probes = 200;   // envelope probes per n (fitted profiles)
    int delta3_reps = 200;      // delta3 Monte Carlo reps per n
    int z_samples = 512;        // shared z-sample set for bound expectations

    int threads = 0;  // 0: LOO_CERTIFY_THREADS or hardware concurrency

    void validate() const;
};

struct ExperimentRecord {
    Index n = 0;
    int rep = 0;
    double loo_estimate = 0.0;
    double risk = 0.0;
    double error = 0.0;  // risk - loo_estimate
    double oracle_se = 0.0;
};

struct NSummary {
    Index n = 0;
    double std_dev = 0.0;
    double tail_freq = 0.0;
    double tail_se = 0.0;
    std::optional<double> bound_main_value;
    std::optional<double> bound_simplified_value;
    std::optional<double> bound_data_dependent_value;
    bool valid_main = false;
};

struct BoundSweepRow {
    Index n = 0;
    double eps = 0.0;
    double bound_main_value = 1.0;
    bool valid_main = false;
    std::optional<double> bound_data_dependent_value;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ExperimentRecord> records;    // sorted by (n, rep)
    std::vector<NSummary> summaries;          // one per n
    std::vector<BoundSweepRow> bound_sweep;   // |eps_bound_grid| rows per n
};

// Runs the full (n, rep) grid: sample -> loo_fast -> risk_oracle with
// per-(n, rep, purpose) substreams, then aggregates summaries and
// evaluates the configured bounds. Deterministic for any thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares of y on x.
LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// OLS on (log n, log value); values must be positive.
LineFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs);

// Writes <name>_records.csv and <name>_summary.csv under dir (bit-exact
// headers, shortest round-trip decimals, rows sorted by (n, rep)).
void emit_csv(const ExperimentResult& result, const std::string& dir);

// Optional extras next to the two main files.
void emit_bound_sweep_csv(const ExperimentResult& result, const std::string& dir);
void emit_svg(const ExperimentResult& result, const std::string& dir);

std::string format_double(double v);  // shortest round-trip decimal

int resolve_threads(int requested);

}  // namespace loocv
