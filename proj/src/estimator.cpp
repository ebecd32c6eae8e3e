#include "loocv/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace loocv {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

void copy_kept(const SampleRef& s, const double* src, ArrayXd& dst) {
    dst.resize(s.count());
    if (s.omit < 0) {
        dst = Eigen::Map<const ArrayXd>(src, s.n);
    } else {
        dst.head(s.omit) = Eigen::Map<const ArrayXd>(src, s.omit);
        dst.tail(s.n - s.omit - 1) = Eigen::Map<const ArrayXd>(src + s.omit + 1, s.n - s.omit - 1);
    }
}

}  // namespace

Estimator Estimator::empirical_mean() { return {EstimatorKind::empirical_mean, 0.0, 0.0, 0.0}; }
Estimator Estimator::kde(double h) { return {EstimatorKind::kde, h, 0.0, 0.0}; }
Estimator Estimator::ols_simple() { return {EstimatorKind::ols_simple, 0.0, 0.0, 0.0}; }
Estimator Estimator::ols_stabilized(double delta, double b) {
    return {EstimatorKind::ols_stabilized, 0.0, delta, b};
}
Estimator Estimator::nw_kernel_stabilized(double h, double delta) {
    return {EstimatorKind::nw_kernel_stabilized, h, delta, 0.0};
}

void Estimator::validate() const {
    const bool kernel = kind == EstimatorKind::kde || kind == EstimatorKind::nw_kernel_stabilized;
    const bool stabilized =
        kind == EstimatorKind::ols_stabilized || kind == EstimatorKind::nw_kernel_stabilized;
    if (kernel && !(bandwidth > 0.0)) throw ConfigError("estimator: bandwidth must be positive");
    if (stabilized && !(stabilizer > 0.0)) throw ConfigError("estimator: stabilizer must be positive");
    if (kind == EstimatorKind::ols_stabilized && !(truncation > 0.0))
        throw ConfigError("estimator: truncation level must be positive");
}

double gaussian_kernel_deriv_sup() { return gaussian_kernel(1.0); }

SampleRef sample_ref(const Dataset& d) {
    if (d.k() != 1 || d.m() != 1)
        throw ContractError("estimators are univariate: dataset must have k = m = 1");
    return {d.xs().data(), d.ys().data(), d.n(), -1};
}

SampleRef sample_ref(const DeletedView& v) {
    SampleRef s = sample_ref(*v.parent);
    s.omit = v.omitted_index;
    return s;
}

FittedEstimator fit_impl(const Estimator& est, const SampleRef& s) {
    est.validate();
    const Index cnt = s.count();
    if (cnt < 1) throw ContractError("fit: empty sample");

    FittedEstimator f;
    f.kind_ = est.kind;
    f.n_used_ = cnt;
    f.h_ = est.bandwidth;
    f.delta_ = est.stabilizer;

    switch (est.kind) {
        case EstimatorKind::empirical_mean: {
            double sum = 0.0;
            for (Index i = 0; i < s.n; ++i)
                if (i != s.omit) sum += s.x[i];
            f.mean_x_ = sum / static_cast<double>(cnt);
            break;
        }
        case EstimatorKind::kde: {
            copy_kept(s, s.x, f.cx_);
            break;
        }
        case EstimatorKind::nw_kernel_stabilized: {
            copy_kept(s, s.x, f.cx_);
            copy_kept(s, s.y, f.cy_);
            break;
        }
        case EstimatorKind::ols_simple:
        case EstimatorKind::ols_stabilized: {
            const bool truncate = est.kind == EstimatorKind::ols_stabilized;
            const double b = est.truncation;
            double sx = 0.0, sy = 0.0, syt = 0.0;
            for (Index i = 0; i < s.n; ++i) {
                if (i == s.omit) continue;
                sx += s.x[i];
                sy += s.y[i];
                if (truncate) syt += std::clamp(s.y[i], -b, b);
            }
            const double nc = static_cast<double>(cnt);
            const double xbar = sx / nc;
            const double ybar = sy / nc;
            const double ytbar = truncate ? syt / nc : ybar;
            double sxx = 0.0, sxy = 0.0;
            for (Index i = 0; i < s.n; ++i) {
                if (i == s.omit) continue;
                const double dx = s.x[i] - xbar;
                const double yi = truncate ? std::clamp(s.y[i], -b, b) : s.y[i];
                sxx += dx * dx;
                sxy += dx * (yi - ytbar);
            }
            if (truncate) {
                f.beta_ = sxy / (sxx + nc * est.stabilizer);
            } else {
                if (!(sxx > 0.0)) throw DegenerateDesignError("ols_simple: zero x variance");
                f.beta_ = sxy / sxx;
            }
            f.alpha_ = ybar - f.beta_ * xbar;
            break;
        }
    }
    return f;
}

FittedEstimator fit(const Estimator& est, const Dataset& d) { return fit_impl(est, sample_ref(d)); }
FittedEstimator fit(const Estimator& est, const DeletedView& v) { return fit_impl(est, sample_ref(v)); }

double FittedEstimator::operator()(double q) const {
    if (!std::isfinite(q)) throw ContractError("predict: non-finite query");
    switch (kind_) {
        case EstimatorKind::empirical_mean:
            return mean_x_;
        case EstimatorKind::ols_simple:
        case EstimatorKind::ols_stabilized:
            return alpha_ + beta_ * q;
        case EstimatorKind::kde: {
            const double s = (-0.5 * ((q - cx_) / h_).square()).exp().sum();
            return s * kInvSqrt2Pi / (static_cast<double>(n_used_) * h_);
        }
        case EstimatorKind::nw_kernel_stabilized: {
            // T(q) = sum K_h(q - x_j) y_j / (sum K_h(q - x_j) + n delta).
            // The common 1/h kernel factor is folded into the denominator.
            const ArrayXd k = (-0.5 * ((q - cx_) / h_).square()).exp();
            const double num = (k * cy_).sum();
            const double den = k.sum() + static_cast<double>(n_used_) * delta_ * h_ / kInvSqrt2Pi;
            return num / den;
        }
    }
    return 0.0;
}

double predict(const Estimator& est, const Dataset& d, double x) { return fit(est, d)(x); }
double predict(const Estimator& est, const DeletedView& v, double x) { return fit(est, v)(x); }

const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::empirical_mean: return "empirical_mean";
        case EstimatorKind::kde: return "kde";
        case EstimatorKind::ols_simple: return "ols_simple";
        case EstimatorKind::ols_stabilized: return "ols_stabilized";
        case EstimatorKind::nw_kernel_stabilized: return "nw_kernel_stabilized";
    }
    return "?";
}

EstimatorKind estimator_kind_from_string(const std::string& s) {
    if (s == "empirical_mean") return EstimatorKind::empirical_mean;
    if (s == "kde") return EstimatorKind::kde;
    if (s == "ols_simple") return EstimatorKind::ols_simple;
    if (s == "ols_stabilized") return EstimatorKind::ols_stabilized;
    if (s == "nw_kernel_stabilized") return EstimatorKind::nw_kernel_stabilized;
    throw ConfigError("unknown estimator: " + s);
}

}  // namespace loocv
