#include "loocv/loo.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace loocv;

namespace {

Dataset scalar_dataset(const std::vector<double>& xs, const std::vector<double>& ys) {
    MatrixXd mx(1, static_cast<Index>(xs.size())), my(1, static_cast<Index>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx(0, static_cast<Index>(i)) = xs[i];
        my(0, static_cast<Index>(i)) = ys[i];
    }
    return Dataset(std::move(mx), std::move(my));
}

void check_fold_match(const LooResult& a, const LooResult& b, double tol) {
    REQUIRE(a.per_fold_losses.size() == b.per_fold_losses.size());
    for (std::size_t i = 0; i < a.per_fold_losses.size(); ++i) {
        const double x = a.per_fold_losses[i], y = b.per_fold_losses[i];
        CHECK(std::abs(x - y) <= tol * std::max({std::abs(x), std::abs(y), 1e-30}));
    }
}

}  // namespace

TEST_SUITE_BEGIN("loo");

TEST_CASE("collinear data gives zero LOO loss for ols") {
    const Dataset d = scalar_dataset({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    const LooResult r = loo_naive(Estimator::ols_simple(), Loss{LossKind::absolute}, d);
    CHECK(r.loo_estimate == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("empirical mean two-point hand computation") {
    // x = {0, 2}: deleted means {2, 0}; y = x so losses are {2, 2}
    const Dataset d = scalar_dataset({0.0, 2.0}, {0.0, 2.0});
    const LooResult r = loo_naive(Estimator::empirical_mean(), Loss{LossKind::absolute}, d);
    CHECK(r.per_fold_losses[0] == doctest::Approx(2.0));
    CHECK(r.per_fold_losses[1] == doctest::Approx(2.0));
    CHECK(r.loo_estimate == doctest::Approx(2.0));
}

TEST_CASE("kde two identical points: each fold is phi(0)") {
    const Dataset d = scalar_dataset({0.0, 0.0}, {0.0, 0.0});
    const LooResult r = loo_naive(Estimator::kde(1.0), Loss{LossKind::identity_abs}, d);
    CHECK(r.loo_estimate == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    const LooResult f = loo_fast(Estimator::kde(1.0), Loss{LossKind::identity_abs}, d);
    check_fold_match(r, f, 1e-10);
}

TEST_CASE("deleted mean downdate hand value") {
    // x = {1,2,3}, fold 1 (0-based fold 0): mean of {2,3} = 2.5
    const Dataset d = scalar_dataset({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
    const LooResult f = loo_fast(Estimator::empirical_mean(), Loss{LossKind::absolute}, d);
    CHECK(f.per_fold_losses[0] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("fast path matches naive refits across estimators and losses") {
    const DataGenerator gen = DataGenerator::gaussian_linear(1.5);
    const std::vector<Estimator> ests = {Estimator::empirical_mean(), Estimator::kde(0.3),
                                         Estimator::ols_simple(), Estimator::ols_stabilized(0.05, 1.5),
                                         Estimator::nw_kernel_stabilized(0.3, 0.05)};
    const std::vector<LossKind> losses = {LossKind::absolute, LossKind::squared,
                                          LossKind::identity_abs};
    Rng rng(101);
    for (const Estimator& est : ests) {
        for (LossKind lk : losses) {
            for (Index n : {3, 10, 50}) {
                for (int t = 0; t < 8; ++t) {
                    const Dataset d = sample_dataset(gen, n, rng);
                    const LooResult naive = loo_naive(est, Loss{lk}, d);
                    const LooResult fast = loo_fast(est, Loss{lk}, d);
                    check_fold_match(naive, fast, 1e-10);
                    CHECK(fast.loo_estimate ==
                          doctest::Approx(std::accumulate(fast.per_fold_losses.begin(),
                                                          fast.per_fold_losses.end(), 0.0) /
                                          static_cast<double>(n))
                              .epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("fast path survives an extreme outlier (downdate conditioning)") {
    Rng rng(7);
    std::vector<double> xs, ys;
    for (int i = 0; i < 20; ++i) {
        xs.push_back(rng.normal());
        ys.push_back(2.0 * xs.back() + rng.normal());
    }
    xs.push_back(1e6);
    ys.push_back(5.0);
    const Dataset d = scalar_dataset(xs, ys);
    for (const Estimator& est : {Estimator::empirical_mean(), Estimator::ols_simple(),
                                 Estimator::ols_stabilized(0.05, 2.0)}) {
        const LooResult naive = loo_naive(est, Loss{LossKind::absolute}, d);
        const LooResult fast = loo_fast(est, Loss{LossKind::absolute}, d);
        check_fold_match(naive, fast, 1e-10);
    }
}

TEST_CASE("permuting the dataset permutes per-fold losses identically") {
    Rng rng(301);
    const DataGenerator gen = DataGenerator::gaussian_sine();
    const Dataset d = sample_dataset(gen, 14, rng);
    std::vector<Index> perm(14);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::swap(perm[0], perm[9]);
    std::swap(perm[3], perm[11]);
    const Dataset p = d.permuted(perm);
    const Estimator est = Estimator::nw_kernel_stabilized(0.4, 0.05);
    const LooResult rd = loo_fast(est, Loss{LossKind::absolute}, d);
    const LooResult rp = loo_fast(est, Loss{LossKind::absolute}, p);
    CHECK(rd.loo_estimate == doctest::Approx(rp.loo_estimate).epsilon(1e-12));
    for (Index i = 0; i < 14; ++i)
        CHECK(rp.per_fold_losses[static_cast<std::size_t>(i)] ==
              doctest::Approx(rd.per_fold_losses[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])])
                  .epsilon(1e-12));
}

TEST_CASE("fold failure carries the fold index") {
    // deleting index 2 leaves x = {1, 1}: zero variance
    const Dataset d = scalar_dataset({1.0, 1.0, 3.0}, {0.0, 1.0, 2.0});
    try {
        loo_naive(Estimator::ols_simple(), Loss{LossKind::absolute}, d);
        FAIL("expected FoldError");
    } catch (const FoldError& e) {
        CHECK(e.fold == 2);
    }
    CHECK_THROWS_AS(loo_fast(Estimator::ols_simple(), Loss{LossKind::absolute}, d), FoldError);
}

TEST_CASE("risk oracle: constant-zero predictor against constant targets") {
    // all-zero y makes the stabilized NW predictor identically zero
    const Dataset d = scalar_dataset({-0.5, 0.2, 0.7}, {0.0, 0.0, 0.0});
    // custom generator with y = 1 exactly
    const DataGenerator gen = DataGenerator::custom({0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0});
    const RiskOracleResult r = risk_oracle(Estimator::nw_kernel_stabilized(0.5, 0.1),
                                           Loss{LossKind::absolute}, d, gen, 2000, std::uint64_t{3});
    CHECK(r.risk == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.std_error == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("risk oracle is deterministic given the seed") {
    Rng rng(55);
    const DataGenerator gen = DataGenerator::gaussian_linear(5.0);
    const Dataset d = sample_dataset(gen, 64, rng);
    const RiskOracleResult a =
        risk_oracle(Estimator::ols_simple(), Loss{LossKind::absolute}, d, gen, 5000, std::uint64_t{9});
    const RiskOracleResult b =
        risk_oracle(Estimator::ols_simple(), Loss{LossKind::absolute}, d, gen, 5000, std::uint64_t{9});
    CHECK(a.risk == b.risk);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("doubling M shrinks the oracle standard error by about sqrt(2)") {
    const DataGenerator gen = DataGenerator::gaussian_linear(2.0);
    const Dataset d = sample_dataset(gen, 32, std::uint64_t{8});
    double ratio_sum = 0.0;
    const int reseeds = 100;
    for (int s = 0; s < reseeds; ++s) {
        const auto a = risk_oracle(Estimator::ols_simple(), Loss{LossKind::absolute}, d, gen, 2000,
                                   static_cast<std::uint64_t>(1000 + s));
        const auto b = risk_oracle(Estimator::ols_simple(), Loss{LossKind::absolute}, d, gen, 4000,
                                   static_cast<std::uint64_t>(5000 + s));
        ratio_sum += a.std_error / b.std_error;
    }
    const double mean_ratio = ratio_sum / reseeds;
    CHECK(mean_ratio > 1.30);
    CHECK(mean_ratio < 1.55);
}

TEST_CASE("oracle self-consistency at the linear-regression configuration") {
    const DataGenerator gen = DataGenerator::gaussian_linear(5.0);
    const Dataset d = sample_dataset(gen, 512, std::uint64_t{77});
    const auto a = risk_oracle(Estimator::ols_simple(), Loss{LossKind::absolute}, d, gen, 100000,
                               std::uint64_t{1});
    const auto b = risk_oracle(Estimator::ols_simple(), Loss{LossKind::absolute}, d, gen, 100000,
                               std::uint64_t{2});
    const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    CHECK(std::abs(a.risk - b.risk) <= 4.0 * se);
}

TEST_SUITE_END();
