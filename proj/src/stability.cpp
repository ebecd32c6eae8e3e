#include "loocv/stability.hpp"

#include "loocv/loo.hpp"

#include <algorithm>
#include <cmath>

namespace loocv {

std::pair<double, double> fit_upper_envelope(const std::vector<double>& g,
                                             const std::vector<double>& r) {
    if (g.empty() || g.size() != r.size()) throw ContractError("fit_upper_envelope: bad probe set");
    const double gmax = *std::max_element(g.begin(), g.end());
    const double rmin = *std::min_element(r.begin(), r.end());
    std::vector<double> rs = r;
    std::sort(rs.begin(), rs.end());
    const double rmed = rs[rs.size() / 2];

    if (!(rmin > 0.0)) return {gmax, 0.0};

    const double bmax = gmax / rmin;
    const int kGrid = 256;
    double best_a = gmax, best_b = 0.0, best_obj = gmax;
    for (int t = 0; t < kGrid; ++t) {
        const double b = bmax * static_cast<double>(t) / static_cast<double>(kGrid - 1);
        double a = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) a = std::max(a, g[j] - b * r[j]);
        const double obj = a + b * rmed;
        if (obj < best_obj) {
            best_obj = obj;
            best_a = a;
            best_b = b;
        }
    }
    return {best_a, best_b};
}

EnvelopeFit fit_envelope(const Estimator& est, const Loss& loss, const DataGenerator& gen, Index n,
                         int probes, std::uint64_t seed) {
    if (probes < 100) throw ContractError("fit_envelope: probes must be >= 100");
    Rng rng = substream(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(StreamTag::probe)});

    std::vector<double> g, r;
    g.reserve(static_cast<std::size_t>(probes));
    r.reserve(static_cast<std::size_t>(probes));
    const int max_attempts = 10 * probes;
    int attempts = 0;
    while (static_cast<int>(g.size()) < probes && attempts < max_attempts) {
        ++attempts;
        const Dataset d = sample_dataset(gen, n, rng);
        const Observation z = gen.sample_observation(rng);
        try {
            const DataGradient grad = grad_analytic(est, loss, d, z);
            g.push_back(grad.norm);
            r.push_back(dataset_norm(d));
        } catch (const KinkError&) {
            continue;  // measure-zero kink set; resample
        }
    }
    if (static_cast<int>(g.size()) < probes)
        throw ContractError("fit_envelope: insufficient smooth probes (all landing on kinks)");

    const auto [a, b] = fit_upper_envelope(g, r);
    EnvelopeFit fit;
    fit.delta1_hat = a;
    fit.delta2_hat = b;
    fit.n = n;
    fit.probes = probes;
    fit.violations = 0;
    for (std::size_t j = 0; j < g.size(); ++j)
        if (g[j] > a + b * r[j] + 1e-12 * (1.0 + g[j])) ++fit.violations;
    return fit;
}

Delta3Estimate estimate_delta3(const Estimator& est, const Loss& loss, const DataGenerator& gen,
                               Index n, int reps, int m, std::uint64_t seed) {
    if (reps < 100) throw ContractError("estimate_delta3: reps must be >= 100");
    if (m < 1) throw ContractError("estimate_delta3: m must be >= 1");

    double sum = 0.0, sumsq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng = substream(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep),
                                   static_cast<std::uint64_t>(StreamTag::delta3)});
        const Dataset d = sample_dataset(gen, n, rng);

        // Fold-1 term: deleted fit evaluated at the held-out observation.
        const FittedEstimator f1 = fit(est, DeletedView(d, 0));
        const double a = loss.needs_target() ? loss(f1(d.x1(0)), d.y1(0))
                                             : loss(f1(d.x1(0)), std::nullopt);

        // Full-fit term at m fresh points (same dataset: common random numbers).
        const FittedEstimator fd = fit(est, d);
        double b = 0.0;
        for (int j = 0; j < m; ++j) {
            const Observation z = gen.sample_observation(rng);
            b += loss.needs_target() ? loss(fd(z.x[0]), z.y[0]) : loss(fd(z.x[0]), std::nullopt);
        }
        b /= static_cast<double>(m);

        const double diff = a - b;
        sum += diff;
        sumsq += diff * diff;
    }
    const double mean = sum / reps;
    const double var = (sumsq - sum * sum / reps) / (reps - 1);
    Delta3Estimate est3;
    est3.value = std::abs(mean);
    est3.std_error = std::sqrt(std::max(var, 0.0) / reps);
    est3.reps = reps;
    return est3;
}

bool has_analytic_profile(const Estimator& est, const Loss& loss) {
    if (est.kind == EstimatorKind::empirical_mean && loss.kind == LossKind::absolute) return true;
    if (est.kind == EstimatorKind::kde && loss.kind == LossKind::identity_abs) return true;
    return false;
}

StabilityProfile analytic_profile(const Estimator& est, const DataGenerator& gen) {
    StabilityProfile p;
    p.provenance = ProfileProvenance::analytic;
    p.delta2 = [](Index, const Observation&) { return 0.0; };
    if (est.kind == EstimatorKind::empirical_mean) {
        const double e_abs = gen.abs_first_moment();
        p.delta1 = [](Index n, const Observation&) { return 1.0 / std::sqrt(static_cast<double>(n)); };
        p.delta3 = [e_abs](Index n) { return 2.0 * e_abs / static_cast<double>(n - 1); };
    } else if (est.kind == EstimatorKind::kde) {
        const double h = est.bandwidth;
        const double c = gaussian_kernel_deriv_sup() / (h * h);
        p.delta1 = [c](Index n, const Observation&) { return c / std::sqrt(static_cast<double>(n)); };
        p.delta3 = [](Index) { return 0.0; };
    } else {
        throw ContractError("analytic_profile: only empirical_mean and kde have exact envelopes");
    }
    return p;
}

StabilityProfile fitted_profile(const Estimator& est, const Loss& loss, const DataGenerator& gen,
                                Index n, int probes, int delta3_reps, std::uint64_t seed) {
    const EnvelopeFit env = fit_envelope(est, loss, gen, n, probes, seed);
    const Delta3Estimate d3 = estimate_delta3(est, loss, gen, n, delta3_reps, 1, seed);
    StabilityProfile p;
    p.provenance = ProfileProvenance::fitted;
    p.delta1 = [v = env.delta1_hat](Index, const Observation&) { return v; };
    p.delta2 = [v = env.delta2_hat](Index, const Observation&) { return v; };
    p.delta3 = [v = d3.value](Index) { return v; };
    return p;
}

}  // namespace loocv
