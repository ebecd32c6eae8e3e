#pragma once

#include "loocv/gradient.hpp"
#include "loocv/generator.hpp"

#include <functional>

namespace loocv {

enum class ProfileProvenance { analytic, fitted };

// The stability triple (delta1, delta2, delta3): gradient-norm envelope
// ||grad_D L|| <= delta1(n,z) + delta2(n,z) ||D|| and deleted-vs-full
// expected-loss gap |E f_1(Z_1) - E f_D(Z)| <= delta3(n).
struct StabilityProfile {
    std::function<double(Index, const Observation&)> delta1;
    std::function<double(Index, const Observation&)> delta2;
    std::function<double(Index)> delta3;
    ProfileProvenance provenance = ProfileProvenance::fitted;
};

// Hard upper envelope g <= delta1 + delta2 * ||D|| fitted over sampled
// probes; violations is 0 by construction on the fitting probes.
struct EnvelopeFit {
    double delta1_hat = 0.0;
    double delta2_hat = 0.0;
    Index n = 0;
    int violations = 0;
    int probes = 0;
};

// Samples `probes` (D, z) pairs from gen, evaluates gradient norms, and
// fits the minimal envelope over a 256-point grid of candidate slopes in
// [0, max g / min ||D||], minimizing delta1 + delta2 * median(||D||).
// Probes that land on a loss kink are resampled (up to 10x oversampling).
EnvelopeFit fit_envelope(const Estimator& est, const Loss& loss, const DataGenerator& gen, Index n,
                         int probes, std::uint64_t seed);

// Shared grid-search core: fits g_j <= a + b * r_j with zero violations,
// minimizing a + b * median(r). Used with r = ||D|| by fit_envelope and
// with r = |x| by the restriction-set envelope.
std::pair<double, double> fit_upper_envelope(const std::vector<double>& g,
                                             const std::vector<double>& r);

struct Delta3Estimate {
    double value = 0.0;      // |mean difference|
    double std_error = 0.0;  // of the paired-difference mean
    int reps = 0;
};

// Monte Carlo estimate of |E[f_1(Z_1)] - E[f_D(Z)]|. Each rep shares one
// dataset between the two terms (common random numbers); the full-fit term
// averages the loss over m fresh points.
Delta3Estimate estimate_delta3(const Estimator& est, const Loss& loss, const DataGenerator& gen,
                               Index n, int reps, int m, std::uint64_t seed);

// Profile with the exact constants of the two estimators whose envelopes
// are known in closed form; `fitted_profile` covers the rest.
//   empirical_mean + absolute: delta1 = 1/sqrt(n), delta2 = 0,
//                              delta3 = 2 E|X| / (n-1)
//   kde + identity_abs:        delta1 = sup|K'|/(h^2 sqrt(n)), delta2 = 0,
//                              delta3 = 0
StabilityProfile analytic_profile(const Estimator& est, const DataGenerator& gen);
bool has_analytic_profile(const Estimator& est, const Loss& loss);

// Envelope + delta3 fitted at a single n, wrapped as a (z-free) profile.
StabilityProfile fitted_profile(const Estimator& est, const Loss& loss, const DataGenerator& gen,
                                Index n, int probes, int delta3_reps, std::uint64_t seed);

}  // namespace loocv
