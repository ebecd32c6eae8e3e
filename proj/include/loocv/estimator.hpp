#pragma once

#include "loocv/core.hpp"

#include <string>

namespace loocv {

enum class EstimatorKind { empirical_mean, kde, ols_simple, ols_stabilized, nw_kernel_stabilized };

// Statistic T_n mapping a sample to a predictor x -> T(x), with
// hyperparameters. All five statistics are univariate and permutation
// symmetric. Stabilized variants add a (count * stabilizer) term to their
// denominators, where count is the number of points actually fitted, so a
// deleted fit of n-1 points uses (n-1) * delta.
struct Estimator {
    EstimatorKind kind = EstimatorKind::empirical_mean;
    double bandwidth = 0.1;   // kde, nw_kernel_stabilized
    double stabilizer = 0.01; // ols_stabilized, nw_kernel_stabilized
    double truncation = 1.0;  // ols_stabilized (y clamp level b)

    static Estimator empirical_mean();
    static Estimator kde(double h);
    static Estimator ols_simple();
    static Estimator ols_stabilized(double delta, double b);
    static Estimator nw_kernel_stabilized(double h, double delta);

    void validate() const;
};

// Gaussian kernel K(u) = exp(-u^2/2)/sqrt(2 pi) and its derivative bound.
template <typename Scalar>
Scalar gaussian_kernel(Scalar u) {
    return std::exp(Scalar(-0.5) * u * u) * Scalar(0.3989422804014326779399461);
}

// sup_u |K'(u)| = phi(1), attained at |u| = 1.
double gaussian_kernel_deriv_sup();

// Lightweight scalar sample view: the data of a Dataset or DeletedView
// with an optional masked index. Fitting never copies the parent through
// the view; kernel fits copy only the points they keep.
struct SampleRef {
    const double* x;
    const double* y;
    Index n;
    Index omit;  // -1 when nothing is masked

    Index count() const { return omit < 0 ? n : n - 1; }
};

SampleRef sample_ref(const Dataset& d);
SampleRef sample_ref(const DeletedView& v);

// A fitted predictor. Pure value; operator() is const and thread-safe.
class FittedEstimator {
  public:
    double operator()(double q) const;

    EstimatorKind kind() const { return kind_; }
    Index n_used() const { return n_used_; }

    // Fitted internals, exposed for the gradient module and tests.
    double mean_x() const { return mean_x_; }
    double intercept() const { return alpha_; }
    double slope() const { return beta_; }
    const ArrayXd& centers_x() const { return cx_; }
    const ArrayXd& centers_y() const { return cy_; }

    friend FittedEstimator fit_impl(const Estimator& est, const SampleRef& s);

  private:
    EstimatorKind kind_ = EstimatorKind::empirical_mean;
    Index n_used_ = 0;
    double h_ = 0.0, delta_ = 0.0;
    double mean_x_ = 0.0;        // empirical_mean
    double alpha_ = 0.0, beta_ = 0.0;  // ols variants
    ArrayXd cx_, cy_;            // kernel methods
};

FittedEstimator fit(const Estimator& est, const Dataset& d);
FittedEstimator fit(const Estimator& est, const DeletedView& v);

// T_D(x) in one call.
double predict(const Estimator& est, const Dataset& d, double x);
double predict(const Estimator& est, const DeletedView& v, double x);

const char* to_string(EstimatorKind k);
EstimatorKind estimator_kind_from_string(const std::string& s);

}  // namespace loocv
