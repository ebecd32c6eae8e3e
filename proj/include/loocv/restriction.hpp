#pragma once

#include "loocv/bounds.hpp"
#include "loocv/loo.hpp"

namespace loocv {

// Permutation-symmetric restriction event on datasets: both centered
// second moments lie within eps_k of their targets,
//   | ||X - xbar||^2 / (n vx) - 1 | < eps_k   (and the same in y),
// where (vx, vy) are the coordinate scales. The paper's set uses
// vx = vy = 1; the estimation routine scales by the generator's analytic
// marginal variances so the event captures "second moments near their
// expectations" for any generator.
bool k_epsilon_membership(const Dataset& d, double eps_k, double x_var, double y_var);

// The unit-scale form.
bool k_epsilon_membership(const Dataset& d, double eps_k);

// Monte Carlo description of a restriction set K and the quantities the
// conditioned bound needs. delta1k is the in-K gradient envelope
// a + b ||x|| fitted on in-K probes only.
struct RestrictionSet {
    double eps_k = 0.0;
    double x_var = 1.0, y_var = 1.0;
    Index n = 0;

    double membership_freq = 0.0;  // raw in-K fraction
    double mu_k_lower = 0.0;       // Wilson 95% lower confidence bound
    double gamma_k = 0.0;          // E[f_D(Z)] - E[f_D(Z'_1) | D, D' in K], in-K centered
    double gamma_k_se = 0.0;
    double delta3k = 0.0;          // |E[f_D(Z'_1) | D, D' in K] - E[f(Z_1) | D in K]|
    double delta3k_se = 0.0;
    double env_a = 0.0, env_b = 0.0;  // delta1K(n, z) = env_a + env_b ||x||
    double slice_prob = 0.0;       // P(mu^{n-1}(K_1(Z_1)) < 1/2 | D in K)
    int reps = 0;
    int in_k = 0;

    bool member(const Dataset& d) const { return k_epsilon_membership(d, eps_k, x_var, y_var); }
    double delta1k(const Observation& z) const { return env_a + env_b * z.x.norm(); }
};

// Estimates every RestrictionSet field over `reps` sampled datasets, with
// rejection of reps outside K for the conditional quantities. All per-rep
// statistics are permutation-symmetric functions of the sampled datasets.
RestrictionSet estimate_restriction_set(const Estimator& est, const Loss& loss,
                                        const DataGenerator& gen, Index n, double eps_k, int reps,
                                        std::uint64_t seed);

// Theorem-level conditioned tail bound:
//   n E_z[exp(-(eps/6)^2 / (16 C2 delta1K(z)^2))]
//   + exp(-(eps/6)^2 n / (8 C1))
//   + exp(-(eps/6 - delta3K)^2 / (8 C1 E[delta1K]^2))
//   + exp(-(eps/6 - gamma_K)^2 / (8 C1 E[delta1K]^2))
//   + (1 - mu_K_lower) + slice_prob,
// with C1 = c log(e / mu_K) sigma2(mu) and C2 = 2 c sigma2(mu). Valid for
// eps > 6 min(delta3K, gamma_K).
TailBound bound_data_dependent(const BoundSpec& spec, double eps, const RestrictionSet& rset,
                               const std::vector<Observation>& z_samples, double slice_prob);

// Lower 95% Wilson confidence bound for a binomial proportion.
double wilson_lower_bound(int successes, int trials);

}  // namespace loocv
