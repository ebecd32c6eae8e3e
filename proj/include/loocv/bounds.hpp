#pragma once

#include "loocv/core.hpp"
#include "loocv/stability.hpp"

#include <string>
#include <vector>

namespace loocv {

enum class Growth { linear, quadratic };

// Everything needed to evaluate the rate functions: the log-Sobolev
// constant C1 = sigma2(mu), the X-marginal second moment E[X^2], the
// growth class of z -> E[L(T_D(x), y)], and the sample size.
struct BoundSpec {
    double sigma2_mu = 1.0;
    double second_moment = 1.0;
    Growth growth = Growth::linear;
    double lipschitz_const = 1.0;  // ||grad f||_inf, linear growth
    double c_l = 0.0, c_q = 1.0;   // quadratic growth coefficients
    Index n = 2;

    void validate() const;
};

// theta1(n, t, z) = exp(-t^2 / (8 C1 [d1^2 + d2^2 n (E|X|^2 + 16 C1)]))
//                   v exp(-t / (8 C1 d2)),
// the rate of the fold-wise fluctuation term. With d2 = 0 the linear
// branch vanishes and the Gaussian branch alone is returned; d1 = d2 = 0
// returns 0 (no randomness in the functional).
double theta1(const BoundSpec& spec, double t, double delta1, double delta2);

// theta2: linear growth  -> exp(-n t^2 / (8 C1 L^2));
//         quadratic      -> exp(-n t^2 / (8 C1 [c_l^2 + c_q^2 (E|X|^2 + 16 C1)]))
//                           v exp(-n t / (8 C1 c_q)).
double theta2(const BoundSpec& spec, double t);

// theta3: structurally theta1 evaluated at (E[delta1(n,Z)], E[delta2(n,Z)]).
double theta3(const BoundSpec& spec, double t, double e_delta1, double e_delta2);

// Mean-concentration bound for sub-exponential summands:
// exp(-eps^2 n / (2 lambda^2)) v exp(-eps n / (2 lambda)).
double subexp_mean_bound(double lambda, Index n, double eps);

// Tail bound for gradient-controlled functionals; the same closed form as
// theta1, kept as an independent transcription so the two routes can be
// cross-checked against each other.
double quadconc_bound(const BoundSpec& spec, double t, double delta1, double delta2);

// Restricted sub-Gaussian constant: c log(e / mu_A) sigma_sg2 with the
// universal constant c = 3 * 2^12 * e^2.
double restricted_sg_constant(double sigma_sg2, double mu_A);
double restriction_universal_constant();  // the c above

struct TailBound {
    double value = 1.0;  // clipped to [0, 1]
    std::vector<std::pair<std::string, double>> components;
    bool valid = false;  // the epsilon-threshold precondition held
};

// Tail bound of the Lipschitz special case (delta2 == 0, linear growth):
// n E_z[theta1] + theta2 + theta3, all at the same split points as the
// general bound, so it coincides with bound_main under delta2 == 0,
// delta3 == 0. Valid for eps > 3 delta3.
TailBound bound_simplified(const BoundSpec& spec,
                           double eps,
                           const std::function<double(Index, const Observation&)>& delta1_fn,
                           double delta3,
                           const std::vector<Observation>& z_samples);

// The general bound: n E_z[theta1(n, eps/3, Z)] + theta2(n, eps/3)
// + theta3(n, eps/3 - delta3(n)), with the Z-expectations replaced by
// Monte Carlo averages over z_samples. Valid for eps > 3 delta3(n).
TailBound bound_main(const BoundSpec& spec, double eps, const StabilityProfile& profile,
                     const std::vector<Observation>& z_samples);

const char* to_string(Growth g);
Growth growth_from_string(const std::string& s);

}  // namespace loocv
