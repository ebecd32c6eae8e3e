#pragma once

#include "loocv/estimator.hpp"
#include "loocv/loss.hpp"

namespace loocv {

// Gradient of a scalar functional of the data with respect to every data
// coordinate, in observation-major order (the x block then the y block of
// observation 1, then observation 2, ...). For the univariate estimators
// the layout is [x_1, y_1, x_2, y_2, ...].
struct DataGradient {
    VectorXd per_coordinate;
    double norm = 0.0;
};

DataGradient make_gradient(VectorXd per_coordinate);

// Closed-form gradient of D -> T_D(q) (the prediction itself, no loss).
VectorXd grad_prediction(const Estimator& est, const Dataset& d, double q);

// Closed-form gradient of D -> L(T_D(x), y) (or D -> |T_D(x)| for
// identity_abs), assembled by chain rule. Throws KinkError when the loss
// is evaluated within 1e-12 of a kink.
DataGradient grad_analytic(const Estimator& est, const Loss& loss, const Dataset& d,
                           const Observation& z);

// Central finite differences, coordinate by coordinate; the oracle for
// grad_analytic. step must lie in [1e-8, 1e-3].
DataGradient grad_fd(const Estimator& est, const Loss& loss, const Dataset& d,
                     const Observation& z, double step);

}  // namespace loocv
