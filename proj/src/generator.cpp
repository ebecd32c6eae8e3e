#include "loocv/generator.hpp"

#include <cmath>

namespace loocv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double sq(double v) { return v * v; }

}  // namespace

DataGenerator::DataGenerator(GeneratorKind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)), sigma2_mu_(0.0) {
    validate();
    sigma2_mu_ = default_sigma2();
}

DataGenerator::DataGenerator(GeneratorKind kind, std::vector<double> params, double sigma2_mu)
    : kind_(kind), params_(std::move(params)), sigma2_mu_(sigma2_mu) {
    validate();
    if (!(sigma2_mu_ > 0.0)) throw ConfigError("DataGenerator: sigma2_mu must be positive");
}

DataGenerator DataGenerator::uniform_sine() { return DataGenerator(GeneratorKind::uniform_sine, {}); }

DataGenerator DataGenerator::gaussian_linear(double slope, double noise_sd) {
    return DataGenerator(GeneratorKind::gaussian_linear, {slope, noise_sd});
}

DataGenerator DataGenerator::gaussian_sine(double noise_sd) {
    return DataGenerator(GeneratorKind::gaussian_sine, {noise_sd});
}

DataGenerator DataGenerator::custom(std::vector<double> params) {
    return DataGenerator(GeneratorKind::custom, std::move(params));
}

void DataGenerator::set_sigma2_mu(double v) {
    if (!(v > 0.0)) throw ConfigError("DataGenerator: sigma2_mu must be positive");
    sigma2_mu_ = v;
}

void DataGenerator::validate() const {
    switch (kind_) {
        case GeneratorKind::uniform_sine:
            if (!params_.empty()) throw ConfigError("uniform_sine takes no parameters");
            break;
        case GeneratorKind::gaussian_linear:
            if (params_.size() < 1 || params_.size() > 2)
                throw ConfigError("gaussian_linear expects params {slope[, noise_sd]}");
            if (params_.size() == 2 && !(params_[1] > 0.0))
                throw ConfigError("gaussian_linear: noise scale must be positive");
            break;
        case GeneratorKind::gaussian_sine:
            if (params_.size() > 1) throw ConfigError("gaussian_sine expects params {[noise_sd]}");
            if (params_.size() == 1 && !(params_[0] > 0.0))
                throw ConfigError("gaussian_sine: noise scale must be positive");
            break;
        case GeneratorKind::custom:
            if (params_.size() != 7)
                throw ConfigError("custom expects params {mx, sx, c0, c1, c2, c3, noise_sd}");
            if (!(params_[1] > 0.0)) throw ConfigError("custom: x scale must be positive");
            if (params_[6] < 0.0) throw ConfigError("custom: noise scale must be nonnegative");
            break;
    }
    for (double p : params_)
        if (!std::isfinite(p)) throw ConfigError("DataGenerator: non-finite parameter");
}

double DataGenerator::default_sigma2() const {
    switch (kind_) {
        case GeneratorKind::uniform_sine:
            // Not stated for Uniform(0,1); exposed as configuration with a
            // documented default of 1.
            return 1.0;
        case GeneratorKind::gaussian_linear: {
            // Joint law of (X, bX + sW) is Gaussian with covariance
            // [[1, b], [b, b^2 + s^2]]; its log-Sobolev constant is the top
            // eigenvalue. Reduces to 1 when b = 0, s = 1.
            const double b = params_[0];
            const double s = params_.size() == 2 ? params_[1] : 1.0;
            const double tr = 1.0 + sq(b) + sq(s);
            const double det = sq(s);
            return 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
        }
        case GeneratorKind::gaussian_sine:
        case GeneratorKind::custom:
            return 1.0;
    }
    return 1.0;
}

double DataGenerator::second_moment() const {
    switch (kind_) {
        case GeneratorKind::uniform_sine:
            return 1.0 / 3.0;
        case GeneratorKind::gaussian_linear:
        case GeneratorKind::gaussian_sine:
            return 1.0;
        case GeneratorKind::custom:
            return sq(params_[0]) + sq(params_[1]);
    }
    return 1.0;
}

double DataGenerator::abs_first_moment() const {
    switch (kind_) {
        case GeneratorKind::uniform_sine:
            return 0.5;
        case GeneratorKind::gaussian_linear:
        case GeneratorKind::gaussian_sine:
            return std::sqrt(2.0 / 3.14159265358979323846);
        case GeneratorKind::custom: {
            // E|X| for X ~ N(mx, sx^2).
            const double mu = params_[0], sd = params_[1];
            const double a = mu / sd;
            const double phi = std::exp(-0.5 * a * a) / std::sqrt(kTwoPi);
            const double Phi = 0.5 * std::erfc(-a / std::sqrt(2.0));
            return sd * (2.0 * phi + a * (2.0 * Phi - 1.0));
        }
    }
    return 0.0;
}

double DataGenerator::x_variance() const {
    switch (kind_) {
        case GeneratorKind::uniform_sine:
            return 1.0 / 12.0;
        case GeneratorKind::gaussian_linear:
        case GeneratorKind::gaussian_sine:
            return 1.0;
        case GeneratorKind::custom:
            return sq(params_[1]);
    }
    return 1.0;
}

double DataGenerator::y_variance() const {
    switch (kind_) {
        case GeneratorKind::uniform_sine:
            // Var(sin(10 U)), U ~ Uniform(0,1): E sin = (1 - cos 10)/10,
            // E sin^2 = 1/2 - sin(20)/40.
            {
                const double m1 = (1.0 - std::cos(10.0)) / 10.0;
                const double m2 = 0.5 - std::sin(20.0) / 40.0;
                return m2 - m1 * m1;
            }
        case GeneratorKind::gaussian_linear: {
            const double b = params_[0];
            const double s = params_.size() == 2 ? params_[1] : 1.0;
            return sq(b) + sq(s);
        }
        case GeneratorKind::gaussian_sine: {
            // Var(sin(10 X)) = (1 - e^{-200})/2 for X ~ N(0,1).
            const double s = params_.empty() ? 1.0 : params_[0];
            return 0.5 * (1.0 - std::exp(-200.0)) + sq(s);
        }
        case GeneratorKind::custom: {
            if (params_[4] != 0.0)
                throw ConfigError("custom: y variance is analytic only for c2 = 0");
            return sq(params_[3]) * sq(params_[1]) + sq(params_[6]);
        }
    }
    return 1.0;
}

Observation DataGenerator::sample_observation(Rng& rng) const {
    double x = 0.0, y = 0.0;
    switch (kind_) {
        case GeneratorKind::uniform_sine:
            x = rng.uniform01();
            y = std::sin(10.0 * x);
            break;
        case GeneratorKind::gaussian_linear: {
            const double s = params_.size() == 2 ? params_[1] : 1.0;
            x = rng.normal();
            y = params_[0] * x + s * rng.normal();
            break;
        }
        case GeneratorKind::gaussian_sine: {
            const double s = params_.empty() ? 1.0 : params_[0];
            x = rng.normal();
            y = std::sin(10.0 * x) + s * rng.normal();
            break;
        }
        case GeneratorKind::custom: {
            x = params_[0] + params_[1] * rng.normal();
            y = params_[2] + params_[3] * x + params_[4] * std::sin(params_[5] * x);
            if (params_[6] > 0.0) y += params_[6] * rng.normal();
            break;
        }
    }
    return Observation(x, y);
}

Dataset sample_dataset(const DataGenerator& gen, Index n, Rng& rng) {
    if (n < 2) throw ContractError("sample_dataset: n must be >= 2");
    MatrixXd xs(1, n), ys(1, n);
    for (Index i = 0; i < n; ++i) {
        const Observation z = gen.sample_observation(rng);
        xs(0, i) = z.x[0];
        ys(0, i) = z.y[0];
    }
    return Dataset(std::move(xs), std::move(ys));
}

Dataset sample_dataset(const DataGenerator& gen, Index n, std::uint64_t seed) {
    Rng rng(seed);
    return sample_dataset(gen, n, rng);
}

const char* to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::uniform_sine: return "uniform_sine";
        case GeneratorKind::gaussian_linear: return "gaussian_linear";
        case GeneratorKind::gaussian_sine: return "gaussian_sine";
        case GeneratorKind::custom: return "custom";
    }
    return "?";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
    if (s == "uniform_sine") return GeneratorKind::uniform_sine;
    if (s == "gaussian_linear") return GeneratorKind::gaussian_linear;
    if (s == "gaussian_sine") return GeneratorKind::gaussian_sine;
    if (s == "custom") return GeneratorKind::custom;
    throw ConfigError("unknown generator: " + s);
}

std::string DataGenerator::describe() const {
    std::string out = to_string(kind_);
    if (!params_.empty()) {
        out += "(";
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(params_[i]);
        }
        out += ")";
    }
    return out;
}

}  // namespace loocv
