#include "loocv/loo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace loocv {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

// Downdated sums are recomputed from scratch when they fall below this
// fraction of a cancellation-free reference sum. At 1e-8 (the first cut)
// the worst-case rounding of a downdate is ~1e-16/1e-8 = 1e-8 relative,
// which can break the 1e-10 naive-equivalence contract; 1e-6 keeps the
// downdate error below ~1e-10 with margin.
constexpr double kDowndateGuard = 1e-6;

double fold_loss(const Loss& loss, double pred, double y) {
    return loss.needs_target() ? loss(pred, y) : loss(pred, std::nullopt);
}

LooResult finalize(std::vector<double> losses, LooMethod method) {
    LooResult r;
    r.method = method;
    double sum = 0.0;
    for (double v : losses) sum += v;
    r.loo_estimate = sum / static_cast<double>(losses.size());
    r.per_fold_losses = std::move(losses);
    return r;
}

// Two-pass moments of the sample with index `omit` removed; the loop order
// matches fit_impl exactly so recomputed folds agree with loo_naive.
struct OlsMoments {
    double xbar, ybar, ytbar, sxx, sxy;
};

OlsMoments ols_moments_without(const SampleRef& s, bool truncate, double b) {
    const double nc = static_cast<double>(s.count());
    double sx = 0.0, sy = 0.0, syt = 0.0;
    for (Index i = 0; i < s.n; ++i) {
        if (i == s.omit) continue;
        sx += s.x[i];
        sy += s.y[i];
        if (truncate) syt += std::clamp(s.y[i], -b, b);
    }
    OlsMoments m{sx / nc, sy / nc, 0.0, 0.0, 0.0};
    m.ytbar = truncate ? syt / nc : m.ybar;
    for (Index i = 0; i < s.n; ++i) {
        if (i == s.omit) continue;
        const double dx = s.x[i] - m.xbar;
        const double yi = truncate ? std::clamp(s.y[i], -b, b) : s.y[i];
        m.sxx += dx * dx;
        m.sxy += dx * (yi - m.ytbar);
    }
    return m;
}

std::vector<double> loo_fast_ols(const Estimator& est, const Loss& loss, const Dataset& d) {
    const bool truncate = est.kind == EstimatorKind::ols_stabilized;
    const double b = est.truncation;
    const Index n = d.n();
    const double* xs = d.xs().data();
    const double* ys = d.ys().data();

    double sx = 0.0, sy = 0.0, syt = 0.0, sxx = 0.0, sxyt = 0.0;
    double ax = 0.0, ay = 0.0;  // cancellation-free references
    for (Index i = 0; i < n; ++i) {
        const double yt = truncate ? std::clamp(ys[i], -b, b) : ys[i];
        sx += xs[i];
        sy += ys[i];
        syt += yt;
        sxx += xs[i] * xs[i];
        sxyt += xs[i] * yt;
        ax += std::abs(xs[i]);
        ay += std::abs(ys[i]);
    }
    const double cxx_full = sxx - sx * sx / static_cast<double>(n);
    double cxy_ref = 0.0;
    {
        const double xbar = sx / static_cast<double>(n);
        const double ytbar = syt / static_cast<double>(n);
        for (Index i = 0; i < n; ++i) {
            const double yt = truncate ? std::clamp(ys[i], -b, b) : ys[i];
            cxy_ref += std::abs((xs[i] - xbar) * (yt - ytbar));
        }
    }

    std::vector<double> losses(static_cast<std::size_t>(n));
    const double nc = static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) {
        const double yt_i = truncate ? std::clamp(ys[i], -b, b) : ys[i];
        const double sx_d = sx - xs[i];
        const double sy_d = sy - ys[i];
        const double syt_d = syt - yt_i;
        const double sxx_d = sxx - xs[i] * xs[i];
        const double sxyt_d = sxyt - xs[i] * yt_i;
        double xbar = sx_d / nc;
        double ybar = sy_d / nc;
        double ytbar = syt_d / nc;
        double cxx = sxx_d - sx_d * sx_d / nc;
        double cxy = sxyt_d - sx_d * syt_d / nc;

        const bool shaky = cxx < kDowndateGuard * cxx_full ||
                           std::abs(cxy) < kDowndateGuard * cxy_ref ||
                           std::abs(sx_d) < kDowndateGuard * ax ||
                           std::abs(sy_d) < kDowndateGuard * ay;
        if (shaky) {
            SampleRef s{xs, ys, n, i};
            const OlsMoments m = ols_moments_without(s, truncate, b);
            xbar = m.xbar;
            ybar = m.ybar;
            ytbar = m.ytbar;
            cxx = m.sxx;
            cxy = m.sxy;
        }

        double beta;
        if (truncate) {
            beta = cxy / (cxx + nc * est.stabilizer);
        } else {
            if (!(cxx > 0.0)) throw FoldError(i, "ols_simple: zero x variance in deleted design");
            beta = cxy / cxx;
        }
        const double pred = (ybar - beta * xbar) + beta * xs[i];
        losses[static_cast<std::size_t>(i)] = fold_loss(loss, pred, ys[i]);
    }
    return losses;
}

std::vector<double> loo_fast_kernel(const Estimator& est, const Loss& loss, const Dataset& d) {
    const Index n = d.n();
    const bool nw = est.kind == EstimatorKind::nw_kernel_stabilized;
    const double h = est.bandwidth;
    Eigen::Map<const ArrayXd> xs(d.xs().data(), n);
    Eigen::Map<const ArrayXd> ys(d.ys().data(), n);

    std::vector<double> losses(static_cast<std::size_t>(n));
    ArrayXd kern(n);
    for (Index i = 0; i < n; ++i) {
        kern = (-0.5 * ((xs[i] - xs) / h).square()).exp();
        kern[i] = 0.0;  // self term masked before the reduction
        double pred;
        if (nw) {
            const double num = (kern * ys).sum();
            const double den =
                kern.sum() + static_cast<double>(n - 1) * est.stabilizer * h / kInvSqrt2Pi;
            pred = num / den;
        } else {
            pred = kern.sum() * kInvSqrt2Pi / (static_cast<double>(n - 1) * h);
        }
        losses[static_cast<std::size_t>(i)] = fold_loss(loss, pred, ys[i]);
    }
    return losses;
}

std::vector<double> loo_fast_mean(const Loss& loss, const Dataset& d) {
    const Index n = d.n();
    const double* xs = d.xs().data();
    const double* ys = d.ys().data();
    double sx = 0.0, ax = 0.0;
    for (Index i = 0; i < n; ++i) {
        sx += xs[i];
        ax += std::abs(xs[i]);
    }
    std::vector<double> losses(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        double sd = sx - xs[i];
        if (std::abs(sd) < kDowndateGuard * ax) {
            sd = 0.0;
            for (Index j = 0; j < n; ++j)
                if (j != i) sd += xs[j];
        }
        const double pred = sd / static_cast<double>(n - 1);
        losses[static_cast<std::size_t>(i)] = fold_loss(loss, pred, ys[i]);
    }
    return losses;
}

}  // namespace

LooResult loo_naive(const Estimator& est, const Loss& loss, const Dataset& d) {
    const Index n = d.n();
    std::vector<double> losses(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        try {
            const FittedEstimator f = fit(est, DeletedView(d, i));
            losses[static_cast<std::size_t>(i)] = fold_loss(loss, f(d.x1(i)), d.y1(i));
        } catch (const FoldError&) {
            throw;
        } catch (const std::exception& e) {
            throw FoldError(i, e.what());
        }
    }
    return finalize(std::move(losses), LooMethod::naive);
}

LooResult loo_fast(const Estimator& est, const Loss& loss, const Dataset& d) {
    est.validate();
    sample_ref(d);  // univariate check
    std::vector<double> losses;
    switch (est.kind) {
        case EstimatorKind::empirical_mean:
            losses = loo_fast_mean(loss, d);
            break;
        case EstimatorKind::kde:
        case EstimatorKind::nw_kernel_stabilized:
            losses = loo_fast_kernel(est, loss, d);
            break;
        case EstimatorKind::ols_simple:
        case EstimatorKind::ols_stabilized:
            losses = loo_fast_ols(est, loss, d);
            break;
    }
    return finalize(std::move(losses), LooMethod::fast);
}

RiskOracleResult risk_oracle(const Estimator& est, const Loss& loss, const Dataset& d,
                             const DataGenerator& gen, long m, Rng& rng) {
    if (m < 2) throw ContractError("risk_oracle: M must be >= 2");
    const FittedEstimator f = fit(est, d);
    ArrayXd losses(m);
    for (long j = 0; j < m; ++j) {
        const Observation z = gen.sample_observation(rng);
        losses[j] = fold_loss(loss, f(z.x[0]), z.y[0]);
    }
    RiskOracleResult r;
    r.mc_samples = m;
    r.risk = losses.sum() / static_cast<double>(m);
    const double var = (losses - r.risk).square().sum() / static_cast<double>(m - 1);
    r.std_error = std::sqrt(var / static_cast<double>(m));
    return r;
}

RiskOracleResult risk_oracle(const Estimator& est, const Loss& loss, const Dataset& d,
                             const DataGenerator& gen, long m, std::uint64_t seed) {
    Rng rng(seed);
    return risk_oracle(est, loss, d, gen, m, rng);
}

double mean_loss_over_observations(const FittedEstimator& f, const Loss& loss, const Dataset& d) {
    double sum = 0.0;
    for (Index i = 0; i < d.n(); ++i) sum += fold_loss(loss, f(d.x1(i)), d.y1(i));
    return sum / static_cast<double>(d.n());
}

const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::absolute: return "absolute";
        case LossKind::squared: return "squared";
        case LossKind::identity_abs: return "identity_abs";
    }
    return "?";
}

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "absolute") return LossKind::absolute;
    if (s == "squared") return LossKind::squared;
    if (s == "identity_abs") return LossKind::identity_abs;
    throw ConfigError("unknown loss: " + s);
}

}  // namespace loocv
