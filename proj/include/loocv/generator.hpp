#pragma once

#include "loocv/core.hpp"
#include "loocv/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace loocv {

enum class GeneratorKind { uniform_sine, gaussian_linear, gaussian_sine, custom };

// Data-generating law with its declared distribution constants. The
// log-Sobolev constant sigma2_mu is supplied configuration, not something
// this library computes; second_moment is the analytic E[X^2] of the X
// marginal and is derived from the parameters.
//
// Laws (k = m = 1 throughout):
//   uniform_sine     X ~ Uniform(0,1),  Y = sin(10 X)            params: none
//   gaussian_linear  X ~ N(0,1),        Y | X ~ N(slope X, s^2)  params: {slope, s=1}
//   gaussian_sine    X ~ N(0,1),        Y | X ~ N(sin(10X), s^2) params: {s=1}
//   custom           X ~ N(mx, sx^2),   Y = c0 + c1 X + c2 sin(c3 X) + s Z
//                    params: {mx, sx, c0, c1, c2, c3, s}
//
// Draw order per observation is x first, then y-noise, so samples are
// bit-identical for identical (generator, n, seed).
class DataGenerator {
  public:
    DataGenerator(GeneratorKind kind, std::vector<double> params);
    DataGenerator(GeneratorKind kind, std::vector<double> params, double sigma2_mu);

    static DataGenerator uniform_sine();
    static DataGenerator gaussian_linear(double slope, double noise_sd = 1.0);
    static DataGenerator gaussian_sine(double noise_sd = 1.0);
    static DataGenerator custom(std::vector<double> params);

    GeneratorKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }

    double sigma2_mu() const { return sigma2_mu_; }
    void set_sigma2_mu(double v);

    // Analytic E[X^2] of the X marginal.
    double second_moment() const;
    // Analytic E|X| of the X marginal.
    double abs_first_moment() const;
    // Analytic marginal variances, used to scale restriction sets.
    double x_variance() const;
    double y_variance() const;

    Observation sample_observation(Rng& rng) const;
    std::string describe() const;

  private:
    void validate() const;
    double default_sigma2() const;

    GeneratorKind kind_;
    std::vector<double> params_;
    double sigma2_mu_;
};

// n i.i.d. draws; bit-identical across runs for identical (gen, n, seed).
Dataset sample_dataset(const DataGenerator& gen, Index n, std::uint64_t seed);
Dataset sample_dataset(const DataGenerator& gen, Index n, Rng& rng);

const char* to_string(GeneratorKind k);
GeneratorKind generator_kind_from_string(const std::string& s);

}  // namespace loocv
