#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace loocv {

using Eigen::ArrayXd;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Raised for invalid configuration (bad generator/estimator parameters,
// malformed config files). The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an operation's preconditions are violated (dimension
// mismatches, empty sample sets, out-of-range arguments).
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by ols_simple when the x design has zero variance.
struct DegenerateDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by analytic gradients at non-differentiable points (loss kinks).
struct KinkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One observation z = (x, y). The container supports general dimensions;
// the estimator library itself is univariate (k = m = 1).
struct Observation {
    VectorXd x;
    VectorXd y;

    Observation() = default;
    Observation(VectorXd x_, VectorXd y_);
    Observation(double x_, double y_);

    double x1() const { return x[0]; }
    double y1() const { return y[0]; }
};

// An ordered sample of n observations, stored columnwise: xs is k x n and
// ys is m x n. Observations keep insertion order; ties are legitimate.
class Dataset {
  public:
    Dataset(MatrixXd xs, MatrixXd ys);
    static Dataset from_observations(const std::vector<Observation>& obs);

    Index n() const { return xs_.cols(); }
    Index k() const { return xs_.rows(); }
    Index m() const { return ys_.rows(); }

    const MatrixXd& xs() const { return xs_; }
    const MatrixXd& ys() const { return ys_; }

    Observation observation(Index i) const { return {xs_.col(i), ys_.col(i)}; }

    // Scalar accessors for the univariate estimators.
    double x1(Index i) const { return xs_(0, i); }
    double y1(Index i) const { return ys_(0, i); }

    // Returns a copy with the observations reordered by `perm` (a
    // permutation of 0..n-1).
    Dataset permuted(const std::vector<Index>& perm) const;

    // Returns a copy with observation `omit` removed.
    Dataset without(Index omit) const;

  private:
    MatrixXd xs_;
    MatrixXd ys_;
};

// Non-owning view of a dataset with one observation masked out. Iteration
// yields the parent's observations except `omitted_index`, in order; the
// parent is never copied.
struct DeletedView {
    const Dataset* parent;
    Index omitted_index;

    DeletedView(const Dataset& d, Index i);
    Index n() const { return parent->n() - 1; }
};

// Euclidean norm of the flattened (k+m)*n coordinate vector.
double dataset_norm(const Dataset& d);

// Number of flattened coordinates, (k+m)*n.
inline Index coordinate_count(const Dataset& d) { return (d.k() + d.m()) * d.n(); }

// Coordinate clamp g_b(x) = max(min(x, b), -b) applied to every coordinate.
Dataset truncate_dataset(const Dataset& d, double b);

}  // namespace loocv
