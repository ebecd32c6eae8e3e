#include "loocv/restriction.hpp"

#include "loocv/gradient.hpp"

#include <algorithm>
#include <cmath>

namespace loocv {

namespace {

struct MomentSums {
    double sx = 0.0, sxx = 0.0, sy = 0.0, syy = 0.0;
    Index n = 0;
};

MomentSums moment_sums(const Dataset& d) {
    MomentSums s;
    s.n = d.n();
    for (Index i = 0; i < d.n(); ++i) {
        const double x = d.x1(i), y = d.y1(i);
        s.sx += x;
        s.sxx += x * x;
        s.sy += y;
        s.syy += y * y;
    }
    return s;
}

bool member_from_sums(const MomentSums& s, double eps_k, double x_var, double y_var) {
    const double n = static_cast<double>(s.n);
    const double cxx = s.sxx - s.sx * s.sx / n;
    const double cyy = s.syy - s.sy * s.sy / n;
    return std::abs(cxx / (n * x_var) - 1.0) < eps_k && std::abs(cyy / (n * y_var) - 1.0) < eps_k;
}

}  // namespace

bool k_epsilon_membership(const Dataset& d, double eps_k, double x_var, double y_var) {
    if (!(eps_k > 0.0)) throw ContractError("k_epsilon_membership: eps_k must be positive");
    if (d.k() != 1 || d.m() != 1) throw ContractError("k_epsilon_membership: univariate datasets only");
    return member_from_sums(moment_sums(d), eps_k, x_var, y_var);
}

bool k_epsilon_membership(const Dataset& d, double eps_k) {
    return k_epsilon_membership(d, eps_k, 1.0, 1.0);
}

double wilson_lower_bound(int successes, int trials) {
    if (trials <= 0) throw ContractError("wilson_lower_bound: no trials");
    const double z = 1.959963984540054;  // 95%
    const double nn = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double center = p + z2 / (2.0 * nn);
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    const double lower = (center - half) / (1.0 + z2 / nn);
    return std::clamp(lower, 0.0, 1.0);
}

RestrictionSet estimate_restriction_set(const Estimator& est, const Loss& loss,
                                        const DataGenerator& gen, Index n, double eps_k, int reps,
                                        std::uint64_t seed) {
    if (reps < 500) throw ContractError("estimate_restriction_set: reps must be >= 500");
    if (!(eps_k > 0.0)) throw ContractError("estimate_restriction_set: eps_k must be positive");

    RestrictionSet r;
    r.eps_k = eps_k;
    r.x_var = gen.x_variance();
    r.y_var = gen.y_variance();
    r.n = n;
    r.reps = reps;

    const int kSliceResamples = 100;

    int in_k = 0, in_both = 0;
    double sum_gamma_a = 0.0, sumsq_gamma_a = 0.0;   // f_D(fresh Z), D in K
    double sum_a = 0.0, sumsq_a = 0.0;               // mean_i f_D(Z'_i), both in K
    double sum_b = 0.0, sumsq_b = 0.0;               // mean_i f_E(Z_i), D in K
    double slice_sum = 0.0;
    std::vector<double> env_g, env_r;

    for (int rep = 0; rep < reps; ++rep) {
        Rng rng = substream(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep),
                                   static_cast<std::uint64_t>(StreamTag::restriction)});
        const Dataset d = sample_dataset(gen, n, rng);
        const Dataset dprime = sample_dataset(gen, n, rng);
        const Observation zfresh = gen.sample_observation(rng);
        const Dataset efit = sample_dataset(gen, n - 1, rng);

        const bool dk = r.member(d);
        const bool dpk = r.member(dprime);
        if (!dk) continue;
        ++in_k;

        const FittedEstimator fd = fit(est, d);

        // gamma: unrestricted-risk term, conditioned on D in K.
        const double ga = loss.needs_target() ? loss(fd(zfresh.x[0]), zfresh.y[0])
                                              : loss(fd(zfresh.x[0]), std::nullopt);
        sum_gamma_a += ga;
        sumsq_gamma_a += ga * ga;

        // delta3K first term: E[f_D(Z'_1) | D, D' in K], Rao-Blackwellized
        // over the (exchangeable) index.
        if (dpk) {
            ++in_both;
            const double a = mean_loss_over_observations(fd, loss, dprime);
            sum_a += a;
            sumsq_a += a * a;
        }

        // delta3K second term: f(Z_i) = E[L(T_{D_(-i)}(x), y)] realized by an
        // independent (n-1)-point fit, averaged over the in-K dataset's points.
        const FittedEstimator fe = fit(est, efit);
        const double b = mean_loss_over_observations(fe, loss, d);
        sum_b += b;
        sumsq_b += b * b;

        // Slice probability: fraction of this dataset's points z whose slice
        // K_1(z) has estimated mass below 1/2. The resampled (n-1)-tuples are
        // shared across the points, so the cost stays O(S(n + n)) per rep.
        {
            std::vector<MomentSums> tails(kSliceResamples);
            for (int sres = 0; sres < kSliceResamples; ++sres) {
                const Dataset t = sample_dataset(gen, n - 1, rng);
                tails[static_cast<std::size_t>(sres)] = moment_sums(t);
            }
            int flagged = 0;
            for (Index i = 0; i < n; ++i) {
                const double zx = d.x1(i), zy = d.y1(i);
                int inside = 0;
                for (const MomentSums& t : tails) {
                    MomentSums full = t;
                    full.sx += zx;
                    full.sxx += zx * zx;
                    full.sy += zy;
                    full.syy += zy * zy;
                    full.n = n;
                    if (member_from_sums(full, eps_k, r.x_var, r.y_var)) ++inside;
                }
                if (2 * inside < kSliceResamples) ++flagged;
            }
            slice_sum += static_cast<double>(flagged) / static_cast<double>(n);
        }

        // In-K gradient envelope probe at a fresh z (kinks resampled).
        for (int attempt = 0; attempt < 10; ++attempt) {
            const Observation zp = gen.sample_observation(rng);
            try {
                const DataGradient gr = grad_analytic(est, loss, d, zp);
                env_g.push_back(gr.norm);
                env_r.push_back(zp.x.norm());
                break;
            } catch (const KinkError&) {
                continue;
            }
        }
    }

    if (in_k == 0) throw ContractError("estimate_restriction_set: no sampled dataset landed in K");
    if (in_both == 0) throw ContractError("estimate_restriction_set: no (D, D') pair landed in K");

    r.in_k = in_k;
    r.membership_freq = static_cast<double>(in_k) / static_cast<double>(reps);
    r.mu_k_lower = wilson_lower_bound(in_k, reps);

    const auto mean_se = [](double sum, double sumsq, int count) {
        const double mean = sum / count;
        if (count < 2) return std::make_pair(mean, 0.0);
        const double var = std::max(0.0, (sumsq - sum * sum / count) / (count - 1));
        return std::make_pair(mean, std::sqrt(var / count));
    };

    const auto [mean_gamma_a, se_gamma_a] = mean_se(sum_gamma_a, sumsq_gamma_a, in_k);
    const auto [mean_a, se_a] = mean_se(sum_a, sumsq_a, in_both);
    const auto [mean_b, se_b] = mean_se(sum_b, sumsq_b, in_k);

    r.gamma_k = mean_gamma_a - mean_a;
    r.gamma_k_se = std::sqrt(se_gamma_a * se_gamma_a + se_a * se_a);
    r.delta3k = std::abs(mean_a - mean_b);
    r.delta3k_se = std::sqrt(se_a * se_a + se_b * se_b);
    r.slice_prob = slice_sum / static_cast<double>(in_k);

    const auto [a, b] = fit_upper_envelope(env_g, env_r);
    r.env_a = a;
    r.env_b = b;
    return r;
}

TailBound bound_data_dependent(const BoundSpec& spec, double eps, const RestrictionSet& rset,
                               const std::vector<Observation>& z_samples, double slice_prob) {
    spec.validate();
    if (!(eps > 0.0)) throw ContractError("bound_data_dependent: eps must be positive");
    if (z_samples.empty()) throw ContractError("bound_data_dependent: empty z sample set");
    if (!(rset.mu_k_lower > 0.0)) throw ContractError("bound_data_dependent: mu_K lower bound is zero");

    const double c = restriction_universal_constant();
    const double c1 = c * (1.0 - std::log(rset.mu_k_lower)) * spec.sigma2_mu;
    const double c2 = 2.0 * c * spec.sigma2_mu;
    const double t = eps / 6.0;

    double hat_theta1 = 0.0, e_d1k = 0.0;
    for (const Observation& z : z_samples) {
        const double d1k = rset.delta1k(z);
        hat_theta1 += d1k > 0.0 ? std::exp(-t * t / (16.0 * c2 * d1k * d1k)) : 0.0;
        e_d1k += d1k;
    }
    const double zn = static_cast<double>(z_samples.size());
    hat_theta1 /= zn;
    e_d1k /= zn;

    const auto theta3k = [&](double tt) {
        if (!(tt > 0.0)) return 1.0;
        if (e_d1k <= 0.0) return 0.0;
        return std::exp(-tt * tt / (8.0 * c1 * e_d1k * e_d1k));
    };

    TailBound b;
    b.valid = eps > 6.0 * std::min(rset.delta3k, rset.gamma_k);
    const double comp1 = static_cast<double>(spec.n) * hat_theta1;
    const double comp2 = std::exp(-t * t * static_cast<double>(spec.n) / (8.0 * c1));
    const double comp3 = theta3k(t - rset.delta3k);
    const double comp4 = theta3k(t - rset.gamma_k);
    const double comp5 = 1.0 - rset.mu_k_lower;
    const double comp6 = slice_prob;
    b.components = {{"n_E_theta1K", comp1}, {"theta2K", comp2}, {"theta3K_delta", comp3},
                    {"theta3K_gamma", comp4}, {"P_not_in_K", comp5}, {"slice_prob", comp6}};
    b.value = b.valid ? std::min(1.0, comp1 + comp2 + comp3 + comp4 + comp5 + comp6) : 1.0;
    return b;
}

}  // namespace loocv
