#include "loocv/bounds.hpp"

#include <cmath>

namespace loocv {

void BoundSpec::validate() const {
    if (!(sigma2_mu > 0.0)) throw ContractError("BoundSpec: sigma2_mu must be positive");
    if (!(second_moment >= 0.0)) throw ContractError("BoundSpec: second_moment must be nonnegative");
    if (n < 2) throw ContractError("BoundSpec: n must be >= 2");
    if (growth == Growth::linear && !(lipschitz_const > 0.0))
        throw ContractError("BoundSpec: linear growth requires lipschitz_const > 0");
    if (growth == Growth::quadratic && (!(c_q > 0.0) || c_l < 0.0))
        throw ContractError("BoundSpec: quadratic growth requires c_q > 0, c_l >= 0");
}

double theta1(const BoundSpec& spec, double t, double delta1, double delta2) {
    if (!(t > 0.0)) throw ContractError("theta1: t must be positive");
    if (delta1 < 0.0 || delta2 < 0.0) throw ContractError("theta1: deltas must be nonnegative");
    if (delta1 == 0.0 && delta2 == 0.0) return 0.0;
    const double c1 = spec.sigma2_mu;
    const double bracket = delta1 * delta1 +
                           delta2 * delta2 * static_cast<double>(spec.n) *
                               (spec.second_moment + 16.0 * c1);
    const double gaussian = std::exp(-t * t / (8.0 * c1 * bracket));
    if (delta2 == 0.0) return gaussian;
    const double linear = std::exp(-t / (8.0 * c1 * delta2));
    return std::max(gaussian, linear);
}

double theta2(const BoundSpec& spec, double t) {
    if (!(t > 0.0)) throw ContractError("theta2: t must be positive");
    const double c1 = spec.sigma2_mu;
    const double n = static_cast<double>(spec.n);
    if (spec.growth == Growth::linear) {
        const double l = spec.lipschitz_const;
        return std::exp(-n * t * t / (8.0 * c1 * l * l));
    }
    const double bracket = spec.c_l * spec.c_l +
                           spec.c_q * spec.c_q * (spec.second_moment + 16.0 * c1);
    const double gaussian = std::exp(-n * t * t / (8.0 * c1 * bracket));
    const double linear = std::exp(-n * t / (8.0 * c1 * spec.c_q));
    return std::max(gaussian, linear);
}

double theta3(const BoundSpec& spec, double t, double e_delta1, double e_delta2) {
    return theta1(spec, t, e_delta1, e_delta2);
}

double subexp_mean_bound(double lambda, Index n, double eps) {
    if (!(lambda > 0.0)) throw ContractError("subexp_mean_bound: lambda must be positive");
    if (!(eps > 0.0)) throw ContractError("subexp_mean_bound: eps must be positive");
    const double nn = static_cast<double>(n);
    const double gaussian = std::exp(-eps * eps * nn / (2.0 * lambda * lambda));
    const double expo = std::exp(-eps * nn / (2.0 * lambda));
    return std::max(gaussian, expo);
}

double quadconc_bound(const BoundSpec& spec, double t, double delta1, double delta2) {
    if (!(t > 0.0)) throw ContractError("quadconc_bound: t must be positive");
    if (delta1 == 0.0 && delta2 == 0.0) return 0.0;
    // exp(-t^2 / (8 s2 [d1^2 + d2^2 n (E|X|^2 + 16 s2)])) v exp(-t / (8 s2 d2))
    const double s2 = spec.sigma2_mu;
    const double bracket = delta1 * delta1 +
                           delta2 * delta2 * static_cast<double>(spec.n) *
                               (spec.second_moment + 16.0 * s2);
    const double first = std::exp(-t * t / (8.0 * s2 * bracket));
    if (delta2 == 0.0) return first;
    const double second = std::exp(-t / (8.0 * s2 * delta2));
    return first > second ? first : second;
}

double restriction_universal_constant() {
    // c = 3 * 2^12 * e^2 = 12288 e^2
    return 12288.0 * std::exp(2.0);
}

double restricted_sg_constant(double sigma_sg2, double mu_A) {
    if (!(mu_A > 0.0 && mu_A <= 1.0)) throw ContractError("restricted_sg_constant: mu_A must be in (0, 1]");
    if (!(sigma_sg2 > 0.0)) throw ContractError("restricted_sg_constant: sigma_sg2 must be positive");
    return restriction_universal_constant() * (1.0 - std::log(mu_A)) * sigma_sg2;
}

namespace {

double clip01(double v) { return std::min(v, 1.0); }

}  // namespace

TailBound bound_main(const BoundSpec& spec, double eps, const StabilityProfile& profile,
                     const std::vector<Observation>& z_samples) {
    spec.validate();
    if (!(eps > 0.0)) throw ContractError("bound_main: eps must be positive");
    if (z_samples.empty()) throw ContractError("bound_main: empty z sample set");

    const Index n = spec.n;
    const double d3 = profile.delta3(n);
    const double t = eps / 3.0;

    double theta1_mean = 0.0, e_d1 = 0.0, e_d2 = 0.0;
    for (const Observation& z : z_samples) {
        const double d1 = profile.delta1(n, z);
        const double d2 = profile.delta2(n, z);
        theta1_mean += theta1(spec, t, d1, d2);
        e_d1 += d1;
        e_d2 += d2;
    }
    const double zn = static_cast<double>(z_samples.size());
    theta1_mean /= zn;
    e_d1 /= zn;
    e_d2 /= zn;

    TailBound b;
    b.valid = eps > 3.0 * d3;
    const double comp1 = static_cast<double>(n) * theta1_mean;
    const double comp2 = theta2(spec, t);
    const double t3 = t - d3;
    const double comp3 = t3 > 0.0 ? theta3(spec, t3, e_d1, e_d2) : 1.0;
    b.components = {{"n_E_theta1", comp1}, {"theta2", comp2}, {"theta3", comp3}};
    b.value = b.valid ? clip01(comp1 + comp2 + comp3) : 1.0;
    return b;
}

TailBound bound_simplified(const BoundSpec& spec,
                           double eps,
                           const std::function<double(Index, const Observation&)>& delta1_fn,
                           double delta3,
                           const std::vector<Observation>& z_samples) {
    if (spec.growth != Growth::linear)
        throw ContractError("bound_simplified: requires linear growth");
    StabilityProfile p;
    p.provenance = ProfileProvenance::analytic;
    p.delta1 = delta1_fn;
    p.delta2 = [](Index, const Observation&) { return 0.0; };
    p.delta3 = [delta3](Index) { return delta3; };
    return bound_main(spec, eps, p, z_samples);
}

const char* to_string(Growth g) { return g == Growth::linear ? "linear" : "quadratic"; }

Growth growth_from_string(const std::string& s) {
    if (s == "linear") return Growth::linear;
    if (s == "quadratic") return Growth::quadratic;
    throw ConfigError("unknown growth class: " + s);
}

}  // namespace loocv
