#include "loocv/core.hpp"

#include <cmath>

namespace loocv {

namespace {

void check_finite(const MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw ContractError(std::string(what) + ": non-finite coordinate");
}

}  // namespace

Observation::Observation(VectorXd x_, VectorXd y_) : x(std::move(x_)), y(std::move(y_)) {
    if (!x.allFinite() || !y.allFinite()) throw ContractError("Observation: non-finite coordinate");
}

Observation::Observation(double x_, double y_) : x(1), y(1) {
    x[0] = x_;
    y[0] = y_;
    if (!std::isfinite(x_) || !std::isfinite(y_)) throw ContractError("Observation: non-finite coordinate");
}

Dataset::Dataset(MatrixXd xs, MatrixXd ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.cols() != ys_.cols()) throw ContractError("Dataset: x/y column count mismatch");
    if (xs_.cols() < 2) throw ContractError("Dataset: n must be >= 2");
    check_finite(xs_, "Dataset");
    check_finite(ys_, "Dataset");
}

Dataset Dataset::from_observations(const std::vector<Observation>& obs) {
    if (obs.size() < 2) throw ContractError("Dataset: n must be >= 2");
    const Index k = obs.front().x.size();
    const Index m = obs.front().y.size();
    MatrixXd xs(k, static_cast<Index>(obs.size()));
    MatrixXd ys(m, static_cast<Index>(obs.size()));
    for (Index i = 0; i < static_cast<Index>(obs.size()); ++i) {
        const auto& o = obs[static_cast<std::size_t>(i)];
        if (o.x.size() != k || o.y.size() != m) throw ContractError("Dataset: ragged observation dimensions");
        xs.col(i) = o.x;
        ys.col(i) = o.y;
    }
    return Dataset(std::move(xs), std::move(ys));
}

Dataset Dataset::permuted(const std::vector<Index>& perm) const {
    if (static_cast<Index>(perm.size()) != n()) throw ContractError("permuted: permutation size mismatch");
    MatrixXd xs(k(), n()), ys(m(), n());
    for (Index i = 0; i < n(); ++i) {
        xs.col(i) = xs_.col(perm[static_cast<std::size_t>(i)]);
        ys.col(i) = ys_.col(perm[static_cast<std::size_t>(i)]);
    }
    return Dataset(std::move(xs), std::move(ys));
}

Dataset Dataset::without(Index omit) const {
    if (omit < 0 || omit >= n()) throw ContractError("without: index out of range");
    if (n() < 3) throw ContractError("without: result would have n < 2");
    MatrixXd xs(k(), n() - 1), ys(m(), n() - 1);
    Index j = 0;
    for (Index i = 0; i < n(); ++i) {
        if (i == omit) continue;
        xs.col(j) = xs_.col(i);
        ys.col(j) = ys_.col(i);
        ++j;
    }
    return Dataset(std::move(xs), std::move(ys));
}

DeletedView::DeletedView(const Dataset& d, Index i) : parent(&d), omitted_index(i) {
    if (i < 0 || i >= d.n()) throw ContractError("DeletedView: index out of range");
}

double dataset_norm(const Dataset& d) {
    // Two-term hypot over the flattened blocks; Eigen's norm() is stable.
    const double nx = d.xs().norm();
    const double ny = d.ys().norm();
    return std::hypot(nx, ny);
}

Dataset truncate_dataset(const Dataset& d, double b) {
    if (!(b > 0.0)) throw ContractError("truncate_dataset: b must be positive");
    MatrixXd xs = d.xs().cwiseMax(-b).cwiseMin(b);
    MatrixXd ys = d.ys().cwiseMax(-b).cwiseMin(b);
    return Dataset(std::move(xs), std::move(ys));
}

}  // namespace loocv
