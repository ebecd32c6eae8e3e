#include "loocv/bounds.hpp"

#include "loocv/generator.hpp"
#include "loocv/restriction.hpp"

#include <doctest.h>

#include <cmath>

using namespace loocv;

namespace {

BoundSpec linear_spec(double sigma2, double m2, double lip, Index n) {
    BoundSpec s;
    s.sigma2_mu = sigma2;
    s.second_moment = m2;
    s.growth = Growth::linear;
    s.lipschitz_const = lip;
    s.n = n;
    return s;
}

std::vector<Observation> z_set(const DataGenerator& gen, int count, std::uint64_t seed) {
    std::vector<Observation> zs;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) zs.push_back(gen.sample_observation(rng));
    return zs;
}

}  // namespace

TEST_SUITE_BEGIN("bounds");

TEST_CASE("theta1 hand values and limits") {
    const BoundSpec spec = linear_spec(1.0, 1.0, 1.0, 8);
    // delta2 = 0, C1 = 1, delta1 = 1, t = 2: exp(-4/8)
    CHECK(theta1(spec, 2.0, 1.0, 0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    // t -> 0+ gives 1
    CHECK(theta1(spec, 1e-12, 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    // no randomness: both deltas zero
    CHECK(theta1(spec, 1.0, 0.0, 0.0) == 0.0);
    // monotone in t when the linear branch is active
    const double a = theta1(spec, 1.0, 0.1, 2.0);
    const double b = theta1(spec, 2.0, 0.1, 2.0);
    CHECK(b < a);
}

TEST_CASE("theta2 hand values, limits, and the quadratic-to-linear limit") {
    // linear: C1 = 1, L = 1, n = 8, t = 1: exp(-8/8)
    CHECK(theta2(linear_spec(1.0, 1.0, 1.0, 8), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(theta2(linear_spec(1.0, 1.0, 1.0, 8), 1e-12) == doctest::Approx(1.0).epsilon(1e-9));

    BoundSpec q = linear_spec(1.0, 2.0, 1.0, 16);
    q.growth = Growth::quadratic;
    q.c_l = 0.7;
    q.c_q = 1e-9;
    const double quad = theta2(q, 0.3);
    const double lin = theta2(linear_spec(1.0, 2.0, 0.7, 16), 0.3);
    CHECK(quad == doctest::Approx(lin).epsilon(1e-6));
}

TEST_CASE("theta3 is theta1 at the expectation arguments") {
    const BoundSpec spec = linear_spec(2.0, 1.5, 1.0, 32);
    CHECK(theta3(spec, 0.4, 0.2, 0.0) == theta1(spec, 0.4, 0.2, 0.0));
    // C1 scaled by 4 with the Gaussian branch active and e_delta2 = 0:
    // the exponent scales by 1/4, so bound^(1/4) matches
    BoundSpec spec4 = spec;
    spec4.sigma2_mu = 8.0;
    const double b1 = theta3(spec, 0.4, 0.2, 0.0);
    const double b4 = theta3(spec4, 0.4, 0.2, 0.0);
    CHECK(std::pow(b1, 0.25) == doctest::Approx(b4).epsilon(1e-12));
}

TEST_CASE("quadconc_bound is the same formula as theta1") {
    const BoundSpec spec = linear_spec(1.7, 2.3, 1.0, 64);
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const double tt = 0.01 + rng.uniform01() * 3.0;
        const double d1 = rng.uniform01();
        const double d2 = rng.uniform01() * 0.2;
        const double a = theta1(spec, tt, d1, d2);
        const double b = quadconc_bound(spec, tt, d1, d2);
        CHECK(std::abs(a - b) <= 1e-15 * std::max(a, b));
    }
    // branch crossover: exponents are equal at t* = d1^2/d2 + d2 n (m2 + 16 s2)
    const double d1 = 0.3, d2 = 0.05;
    const double tstar = d1 * d1 / d2 + d2 * 64.0 * (2.3 + 16.0 * 1.7);
    const double g = std::exp(-tstar * tstar /
                              (8.0 * 1.7 * (d1 * d1 + d2 * d2 * 64.0 * (2.3 + 16.0 * 1.7))));
    const double l = std::exp(-tstar / (8.0 * 1.7 * d2));
    CHECK(g == doctest::Approx(l).epsilon(1e-9));
}

TEST_CASE("branch consistency: returned value is the max of both branches") {
    const BoundSpec spec = linear_spec(1.1, 0.9, 1.0, 128);
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const double tt = 0.01 + rng.uniform01() * 5.0;
        const double d1 = rng.uniform01();
        const double d2 = 0.001 + rng.uniform01() * 0.3;
        const double bracket = d1 * d1 + d2 * d2 * 128.0 * (0.9 + 16.0 * 1.1);
        const double gaussian = std::exp(-tt * tt / (8.0 * 1.1 * bracket));
        const double linear = std::exp(-tt / (8.0 * 1.1 * d2));
        CHECK(theta1(spec, tt, d1, d2) == doctest::Approx(std::max(gaussian, linear)).epsilon(1e-15));
    }
}

TEST_CASE("subexp_mean_bound hand values and branch order") {
    // lambda = 1, eps = 1, n = 4: both branches equal exp(-2)
    CHECK(subexp_mean_bound(1.0, 4, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    // eps < lambda: the Gaussian branch dominates
    const double eps = 0.25, lambda = 1.0;
    const double gauss = std::exp(-eps * eps * 16.0 / 2.0);
    const double expo = std::exp(-eps * 16.0 / 2.0);
    CHECK(gauss > expo);
    CHECK(subexp_mean_bound(lambda, 16, eps) == doctest::Approx(gauss).epsilon(1e-15));
}

TEST_CASE("restricted sub-Gaussian constant") {
    const double c = 12288.0 * std::exp(2.0);
    CHECK(restriction_universal_constant() == doctest::Approx(c).epsilon(1e-12));
    CHECK(restricted_sg_constant(2.0, 1.0) == doctest::Approx(2.0 * c).epsilon(1e-9));
    // halving mu_A adds exactly c log(2) sigma2
    const double full = restricted_sg_constant(1.0, 0.5);
    const double half = restricted_sg_constant(1.0, 0.25);
    CHECK(half - full == doctest::Approx(c * std::log(2.0)).epsilon(1e-9));
    CHECK_THROWS_AS(restricted_sg_constant(1.0, 0.0), ContractError);
}

TEST_CASE("bound_main: value in [0,1], nonincreasing in eps, valid flag") {
    const DataGenerator gen = DataGenerator::gaussian_linear(0.0);
    const auto zs = z_set(gen, 128, 11);
    StabilityProfile p;
    p.delta1 = [](Index n, const Observation&) { return 1.0 / std::sqrt(double(n)); };
    p.delta2 = [](Index, const Observation&) { return 0.0; };
    p.delta3 = [](Index n) { return 0.5 / double(n - 1); };
    const BoundSpec spec = linear_spec(1.0, 1.0, 1.0, 256);

    double prev = 2.0;
    for (double eps : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
        const TailBound b = bound_main(spec, eps, p, zs);
        CHECK(b.value <= 1.0);
        CHECK(b.value >= 0.0);
        CHECK(b.value <= prev + 1e-15);
        prev = b.value;
        CHECK(b.valid == (eps > 3.0 * p.delta3(256)));
    }
    // precondition failure: eps == 3 delta3 is not valid and clips to 1
    const TailBound at = bound_main(spec, 3.0 * p.delta3(256), p, zs);
    CHECK_FALSE(at.valid);
    CHECK(at.value == 1.0);
}

TEST_CASE("bound_main equals bound_simplified when delta2 = 0, delta3 = 0") {
    const DataGenerator gen = DataGenerator::uniform_sine();
    const auto zs = z_set(gen, 64, 13);
    // z-dependent delta1 exercises the Monte Carlo expectations
    const auto d1 = [](Index n, const Observation& z) {
        return (0.5 + 0.25 * std::abs(z.x[0])) / std::sqrt(double(n));
    };
    StabilityProfile p;
    p.delta1 = d1;
    p.delta2 = [](Index, const Observation&) { return 0.0; };
    p.delta3 = [](Index) { return 0.0; };
    const BoundSpec spec = linear_spec(1.3, 1.0 / 3.0, 2.0, 512);
    for (double eps : {0.05, 0.2, 0.8}) {
        const TailBound a = bound_main(spec, eps, p, zs);
        const TailBound b = bound_simplified(spec, eps, d1, 0.0, zs);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
        CHECK(a.valid == b.valid);
    }
}

TEST_CASE("bound_simplified first component degenerates to n theta1 for constant delta1") {
    const DataGenerator gen = DataGenerator::uniform_sine();
    const auto zs = z_set(gen, 32, 17);
    const double d1 = 0.125;
    const BoundSpec spec = linear_spec(1.0, 1.0 / 3.0, 1.0, 64);
    const double eps = 0.3;
    const TailBound b =
        bound_simplified(spec, eps, [d1](Index, const Observation&) { return d1; }, 0.0, zs);
    // with delta1 constant the z-average collapses to the pointwise theta1
    // at the bound's internal split t = eps/3
    CHECK(b.components[0].second ==
          doctest::Approx(64.0 * theta1(spec, eps / 3.0, d1, 0.0)).epsilon(1e-15));
}

TEST_CASE("doubling n strengthens the simplified bound at the mean configuration") {
    const DataGenerator gen = DataGenerator::gaussian_linear(0.0);
    const auto zs = z_set(gen, 64, 19);
    const double eps = 1.0;
    const auto bound_at = [&](Index n) {
        const BoundSpec spec = linear_spec(1.0, 1.0, 1.0, n);
        const auto d1 = [](Index nn, const Observation&) { return 1.0 / std::sqrt(double(nn)); };
        const double d3 = 2.0 * gen.abs_first_moment() / double(n - 1);
        return bound_simplified(spec, eps, d1, d3, zs);
    };
    const TailBound b1 = bound_at(512);
    const TailBound b2 = bound_at(1024);
    CHECK(b1.valid);
    CHECK(b2.valid);
    CHECK(b1.value < 1.0);
    // log-value drops by at least ~0.9 x the dominant exponent increment
    // (the n prefactor of the first component eats log 2 of it)
    CHECK(std::log(b2.value) < std::log(b1.value) - 0.85 * (eps * eps / 9.0 / 8.0) * 512.0);
}

TEST_CASE("empirical dominance of bound_main at informative epsilons") {
    // mean + absolute loss on the standard 2d Gaussian: sigma2 = 1 exactly,
    // delta1 = 1/sqrt(n) exactly; checked where the bound is below 1
    const DataGenerator gen = DataGenerator::gaussian_linear(0.0);
    const auto zs = z_set(gen, 256, 23);
    StabilityProfile p;
    p.delta1 = [](Index n, const Observation&) { return 1.0 / std::sqrt(double(n)); };
    p.delta2 = [](Index, const Observation&) { return 0.0; };
    const double eabs = gen.abs_first_moment();
    p.delta3 = [eabs](Index n) { return 2.0 * eabs / double(n - 1); };

    const Index n = 512;
    const int reps = 300;
    const Estimator est = Estimator::empirical_mean();
    const Loss loss{LossKind::absolute};
    for (double eps : {0.5, 1.0}) {
        const BoundSpec spec = linear_spec(1.0, 1.0, 1.0, n);
        const TailBound b = bound_main(spec, eps, p, zs);
        const double two_sided = std::min(1.0, 2.0 * b.value);
        if (two_sided >= 1.0) continue;
        int exceed = 0;
        for (int t = 0; t < reps; ++t) {
            Rng rng = substream(929, {static_cast<std::uint64_t>(t)});
            const Dataset d = sample_dataset(gen, n, rng);
            const LooResult lo = loo_fast(est, loss, d);
            const RiskOracleResult r = risk_oracle(est, loss, d, gen, 4000, rng);
            if (std::abs(r.risk - lo.loo_estimate) > eps) ++exceed;
        }
        const double freq = double(exceed) / reps;
        const double se = std::sqrt(std::max(freq * (1.0 - freq), 1e-12) / reps);
        CHECK(freq <= two_sided + 3.0 * se);
    }
}

TEST_CASE("k_epsilon membership hand cases and permutation symmetry") {
    MatrixXd xs(1, 2), ys(1, 2);
    xs << -1.0, 1.0;
    ys << -1.0, 1.0;
    const Dataset d(xs, ys);
    // centered second moment is exactly 1: member for any eps
    CHECK(k_epsilon_membership(d, 1e-9));

    MatrixXd xs2(1, 3), ys2(1, 3);
    xs2 << 2.0, 2.0, 2.0;
    ys2 << -1.0, 0.0, 1.0;
    CHECK_FALSE(k_epsilon_membership(Dataset(xs2, ys2), 0.9));

    Rng rng(41);
    const DataGenerator gen = DataGenerator::gaussian_linear(0.0);
    const Dataset big = sample_dataset(gen, 32, rng);
    std::vector<Index> perm(32);
    std::iota(perm.begin(), perm.end(), Index{0});
    for (int t = 0; t < 100; ++t) {
        for (Index i = 31; i > 0; --i)
            std::swap(perm[std::size_t(i)], perm[rng.next() % std::uint64_t(i + 1)]);
        CHECK(k_epsilon_membership(big, 0.5) == k_epsilon_membership(big.permuted(perm), 0.5));
    }
}

TEST_SUITE_END();
