#pragma once

#include "loocv/core.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace loocv {

// absolute:     L(p, y) = |p - y|
// squared:      L(p, y) = (p - y)^2
// identity_abs: L(p)    = |p|   (density estimation; no target)
enum class LossKind { absolute, squared, identity_abs };

struct Loss {
    LossKind kind = LossKind::absolute;

    bool needs_target() const { return kind != LossKind::identity_abs; }

    double operator()(double prediction, std::optional<double> target) const {
        switch (kind) {
            case LossKind::absolute:
                if (!target) throw ContractError("absolute loss requires a target");
                return std::abs(prediction - *target);
            case LossKind::squared:
                if (!target) throw ContractError("squared loss requires a target");
                return (prediction - *target) * (prediction - *target);
            case LossKind::identity_abs:
                if (target) throw ContractError("identity_abs loss takes no target");
                return std::abs(prediction);
        }
        return 0.0;
    }

    // dL/dprediction. Throws KinkError within `kink_tol` of the
    // non-differentiable point of the absolute losses.
    double derivative(double prediction, std::optional<double> target, double kink_tol = 1e-12) const {
        switch (kind) {
            case LossKind::absolute: {
                if (!target) throw ContractError("absolute loss requires a target");
                const double r = prediction - *target;
                if (std::abs(r) < kink_tol) throw KinkError("absolute loss at kink");
                return r > 0.0 ? 1.0 : -1.0;
            }
            case LossKind::squared:
                if (!target) throw ContractError("squared loss requires a target");
                return 2.0 * (prediction - *target);
            case LossKind::identity_abs:
                if (target) throw ContractError("identity_abs loss takes no target");
                if (std::abs(prediction) < kink_tol) throw KinkError("identity_abs loss at kink");
                return prediction > 0.0 ? 1.0 : -1.0;
        }
        return 0.0;
    }
};

inline double loss_eval(const Loss& loss, double prediction, std::optional<double> target) {
    return loss(prediction, target);
}

const char* to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& s);

}  // namespace loocv
