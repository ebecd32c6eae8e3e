#include "loocv/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace loocv {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

double query_of(const Observation& z) { return z.x[0]; }

std::optional<double> target_of(const Loss& loss, const Observation& z) {
    if (loss.needs_target()) return z.y[0];
    return std::nullopt;
}

}  // namespace

DataGradient make_gradient(VectorXd per_coordinate) {
    DataGradient g;
    g.norm = per_coordinate.norm();
    g.per_coordinate = std::move(per_coordinate);
    return g;
}

VectorXd grad_prediction(const Estimator& est, const Dataset& d, double q) {
    const SampleRef s = sample_ref(d);
    const Index n = d.n();
    const double nc = static_cast<double>(n);
    VectorXd g = VectorXd::Zero(2 * n);

    switch (est.kind) {
        case EstimatorKind::empirical_mean: {
            for (Index j = 0; j < n; ++j) g[2 * j] = 1.0 / nc;
            break;
        }
        case EstimatorKind::kde: {
            // d/dx_j [ (1/(n h)) sum K((q - x_k)/h) ] = u_j K(u_j) / (n h^2).
            const double h = est.bandwidth;
            for (Index j = 0; j < n; ++j) {
                const double u = (q - s.x[j]) / h;
                g[2 * j] = u * gaussian_kernel(u) / (nc * h * h);
            }
            break;
        }
        case EstimatorKind::nw_kernel_stabilized: {
            const double h = est.bandwidth;
            const FittedEstimator f = fit(est, d);
            const double t = f(q);
            double esum = 0.0;
            ArrayXd e(n);
            for (Index j = 0; j < n; ++j) {
                const double u = (q - s.x[j]) / h;
                e[j] = std::exp(-0.5 * u * u);
                esum += e[j];
            }
            const double den = esum + nc * est.stabilizer * h / kInvSqrt2Pi;
            for (Index j = 0; j < n; ++j) {
                const double u = (q - s.x[j]) / h;
                g[2 * j] = e[j] * u / h * (s.y[j] - t) / den;
                g[2 * j + 1] = e[j] / den;
            }
            break;
        }
        case EstimatorKind::ols_simple:
        case EstimatorKind::ols_stabilized: {
            const bool truncate = est.kind == EstimatorKind::ols_stabilized;
            const double b = est.truncation;
            const FittedEstimator f = fit(est, d);
            const double beta = f.slope();
            double sx = 0.0, syt = 0.0;
            for (Index j = 0; j < n; ++j) {
                sx += s.x[j];
                syt += truncate ? std::clamp(s.y[j], -b, b) : s.y[j];
            }
            const double xbar = sx / nc;
            const double ytbar = syt / nc;
            double sxx = 0.0;
            for (Index j = 0; j < n; ++j) sxx += (s.x[j] - xbar) * (s.x[j] - xbar);
            const double den = truncate ? sxx + nc * est.stabilizer : sxx;
            for (Index j = 0; j < n; ++j) {
                const double xc = s.x[j] - xbar;
                const double ytj = truncate ? std::clamp(s.y[j], -b, b) : s.y[j];
                const double yc = ytj - ytbar;
                const double dbeta_dx = (yc - 2.0 * beta * xc) / den;
                const bool inside = !truncate || std::abs(s.y[j]) < b;
                const double dbeta_dy = inside ? xc / den : 0.0;
                g[2 * j] = (q - xbar) * dbeta_dx - beta / nc;
                g[2 * j + 1] = 1.0 / nc + (q - xbar) * dbeta_dy;
            }
            break;
        }
    }
    return g;
}

DataGradient grad_analytic(const Estimator& est, const Loss& loss, const Dataset& d,
                           const Observation& z) {
    const double q = query_of(z);
    const double pred = predict(est, d, q);
    const double dl = loss.derivative(pred, target_of(loss, z));
    VectorXd g = grad_prediction(est, d, q);
    g *= dl;
    return make_gradient(std::move(g));
}

DataGradient grad_fd(const Estimator& est, const Loss& loss, const Dataset& d,
                     const Observation& z, double step) {
    if (!(step >= 1e-8 && step <= 1e-3)) throw ContractError("grad_fd: step must be in [1e-8, 1e-3]");
    const double q = query_of(z);
    const std::optional<double> target = target_of(loss, z);
    const Index n = d.n();
    const Index k = d.k();
    const Index m = d.m();

    MatrixXd xs = d.xs();
    MatrixXd ys = d.ys();
    auto eval = [&]() {
        const Dataset dd(xs, ys);
        return loss(predict(est, dd, q), target);
    };

    VectorXd g((k + m) * n);
    Index c = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index r = 0; r < k; ++r, ++c) {
            const double keep = xs(r, i);
            xs(r, i) = keep + step;
            const double up = eval();
            xs(r, i) = keep - step;
            const double down = eval();
            xs(r, i) = keep;
            g[c] = (up - down) / (2.0 * step);
        }
        for (Index r = 0; r < m; ++r, ++c) {
            const double keep = ys(r, i);
            ys(r, i) = keep + step;
            const double up = eval();
            ys(r, i) = keep - step;
            const double down = eval();
            ys(r, i) = keep;
            g[c] = (up - down) / (2.0 * step);
        }
    }
    return make_gradient(std::move(g));
}

}  // namespace loocv
