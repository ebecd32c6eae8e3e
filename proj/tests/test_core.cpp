#include "loocv/estimator.hpp"
#include "loocv/generator.hpp"
#include "loocv/loss.hpp"

#include <doctest.h>

#include <algorithm>
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

std::vector<Index> random_permutation(Index n, Rng& rng) {
    std::vector<Index> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
        const Index j = static_cast<Index>(rng.next() % static_cast<std::uint64_t>(i + 1));
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
}

const std::vector<Estimator> kAllEstimators = {
    Estimator::empirical_mean(), Estimator::kde(0.4), Estimator::ols_simple(),
    Estimator::ols_stabilized(0.05, 1.5), Estimator::nw_kernel_stabilized(0.3, 0.05)};

}  // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("dataset norm matches hand values") {
    // {(3,4), (0,0)} flattens to (3,4,0,0)
    CHECK(dataset_norm(scalar_dataset({3.0, 0.0}, {4.0, 0.0})) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(dataset_norm(scalar_dataset({0.0, 0.0}, {0.0, 0.0})) == 0.0);
}

TEST_CASE("dataset norm equals direct sum-of-squares recomputation") {
    Rng rng(11);
    const DataGenerator gen = DataGenerator::gaussian_linear(2.0);
    for (int t = 0; t < 20; ++t) {
        const Dataset d = sample_dataset(gen, 37, rng);
        double ss = 0.0;
        for (Index i = 0; i < d.n(); ++i) ss += d.x1(i) * d.x1(i) + d.y1(i) * d.y1(i);
        CHECK(dataset_norm(d) == doctest::Approx(std::sqrt(ss)).epsilon(1e-12));
    }
}

TEST_CASE("dataset invariants") {
    CHECK_THROWS_AS(scalar_dataset({1.0}, {2.0}), ContractError);
    MatrixXd bad(1, 2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Dataset(bad, MatrixXd::Zero(1, 2)), ContractError);
    CHECK_THROWS_AS(Observation(1.0, std::numeric_limits<double>::infinity()), ContractError);
}

TEST_CASE("sampling is bit-identical for identical (gen, n, seed)") {
    const DataGenerator gen = DataGenerator::gaussian_sine();
    const Dataset a = sample_dataset(gen, 100, std::uint64_t{42});
    const Dataset b = sample_dataset(gen, 100, std::uint64_t{42});
    CHECK(a.xs() == b.xs());
    CHECK(a.ys() == b.ys());
    const Dataset c = sample_dataset(gen, 100, std::uint64_t{43});
    CHECK(a.xs() != c.xs());
}

TEST_CASE("uniform_sine y values lie in the sine range") {
    Rng rng(5);
    const Dataset d = sample_dataset(DataGenerator::uniform_sine(), 2, rng);
    for (Index i = 0; i < d.n(); ++i) {
        CHECK(d.y1(i) >= -1.0);
        CHECK(d.y1(i) <= 1.0);
        CHECK(d.y1(i) == doctest::Approx(std::sin(10.0 * d.x1(i))).epsilon(1e-15));
    }
}

TEST_CASE("gaussian_linear residuals are standard normal") {
    const DataGenerator gen = DataGenerator::gaussian_linear(5.0);
    const Dataset d = sample_dataset(gen, 20000, std::uint64_t{7});
    double s = 0.0, ss = 0.0;
    for (Index i = 0; i < d.n(); ++i) {
        const double r = d.y1(i) - 5.0 * d.x1(i);
        s += r;
        ss += r * r;
    }
    const double mean = s / static_cast<double>(d.n());
    const double var = ss / static_cast<double>(d.n()) - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("generator parameter validation") {
    CHECK_THROWS_AS(DataGenerator::gaussian_linear(5.0, 0.0), ConfigError);
    CHECK_THROWS_AS(DataGenerator::gaussian_linear(5.0, -1.0), ConfigError);
    CHECK_THROWS_AS(DataGenerator::custom({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(DataGenerator(GeneratorKind::uniform_sine, {}, -1.0), ConfigError);
    CHECK_NOTHROW(DataGenerator::custom({0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0}));
}

TEST_CASE("generator declared constants") {
    CHECK(DataGenerator::uniform_sine().second_moment() == doctest::Approx(1.0 / 3.0));
    CHECK(DataGenerator::gaussian_linear(5.0).second_moment() == 1.0);
    // slope 0 with unit noise is the standard 2d Gaussian
    CHECK(DataGenerator::gaussian_linear(0.0).sigma2_mu() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(DataGenerator::gaussian_linear(5.0).y_variance() == doctest::Approx(26.0));
}

TEST_CASE("predict: hand-checked values") {
    const Dataset d = scalar_dataset({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
    CHECK(predict(Estimator::empirical_mean(), d, 99.0) == doctest::Approx(2.0).epsilon(1e-15));

    // kde on a single retained point: phi(0) = 1/sqrt(2 pi)
    const Dataset two = scalar_dataset({0.0, 5.0}, {0.0, 0.0});
    const double v = predict(Estimator::kde(1.0), DeletedView(two, 1), 0.0);
    CHECK(v == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));

    // collinear data: the fitted line is the identity
    const Dataset line = scalar_dataset({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    CHECK(predict(Estimator::ols_simple(), line, 10.0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("loss evaluation") {
    CHECK(loss_eval(Loss{LossKind::absolute}, 3.0, 5.0) == 2.0);
    CHECK(loss_eval(Loss{LossKind::squared}, 3.0, 5.0) == 4.0);
    CHECK(loss_eval(Loss{LossKind::identity_abs}, -0.7, std::nullopt) == doctest::Approx(0.7));
    CHECK_THROWS_AS(loss_eval(Loss{LossKind::absolute}, 1.0, std::nullopt), ContractError);
    CHECK_THROWS_AS(loss_eval(Loss{LossKind::identity_abs}, 1.0, 2.0), ContractError);
}

TEST_CASE("ols degenerate design errors; stabilized variant does not") {
    const Dataset d = scalar_dataset({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0});
    CHECK_THROWS_AS(predict(Estimator::ols_simple(), d, 0.0), DegenerateDesignError);
    CHECK_NOTHROW(predict(Estimator::ols_stabilized(0.01, 10.0), d, 0.0));
}

TEST_CASE("permutation invariance of every estimator") {
    Rng rng(23);
    const DataGenerator gen = DataGenerator::gaussian_sine();
    for (const Estimator& est : kAllEstimators) {
        for (int t = 0; t < 10; ++t) {
            const Dataset d = sample_dataset(gen, 16, rng);
            const Dataset p = d.permuted(random_permutation(16, rng));
            const double q = rng.normal();
            CHECK(predict(est, d, q) == doctest::Approx(predict(est, p, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("deleted view equals materialized deletion") {
    Rng rng(31);
    const DataGenerator gen = DataGenerator::gaussian_linear(1.0);
    for (const Estimator& est : kAllEstimators) {
        const Dataset d = sample_dataset(gen, 12, rng);
        for (Index i = 0; i < d.n(); ++i) {
            const double q = rng.normal();
            const double via_view = predict(est, DeletedView(d, i), q);
            const double via_copy = predict(est, d.without(i), q);
            CHECK(via_view == doctest::Approx(via_copy).epsilon(1e-12));
        }
    }
}

TEST_CASE("stabilized NW prediction obeys the denominator bound") {
    Rng rng(47);
    const DataGenerator gen = DataGenerator::gaussian_sine();
    const double delta = 0.02;
    const Estimator est = Estimator::nw_kernel_stabilized(0.1, delta);
    for (int t = 0; t < 50; ++t) {
        const Dataset d = sample_dataset(gen, 24, rng);
        double abs_y_sum = 0.0;
        for (Index i = 0; i < d.n(); ++i) abs_y_sum += std::abs(d.y1(i));
        const double q = 3.0 * rng.normal();
        CHECK(std::abs(predict(est, d, q)) <=
              abs_y_sum / (static_cast<double>(d.n()) * delta) + 1e-12);
    }
}

TEST_CASE("truncate_dataset clamps coordinates") {
    const Dataset d = scalar_dataset({-5.0, 0.3, 7.0}, {0.0, 0.0, 0.0});
    const Dataset t = truncate_dataset(d, 1.0);
    CHECK(t.x1(0) == -1.0);
    CHECK(t.x1(1) == 0.3);
    CHECK(t.x1(2) == 1.0);
    // b above every coordinate magnitude: identity
    const Dataset u = truncate_dataset(d, 10.0);
    CHECK(u.xs() == d.xs());
    CHECK(u.ys() == d.ys());
    CHECK_THROWS_AS(truncate_dataset(d, 0.0), ContractError);
}

TEST_CASE("rng substreams are reproducible and tag-separated") {
    Rng a = substream(99, {1, 2, 3});
    Rng b = substream(99, {1, 2, 3});
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng c = substream(99, {1, 2, 4});
    CHECK(c.next() != substream(99, {1, 2, 3}).next());
}

TEST_SUITE_END();
