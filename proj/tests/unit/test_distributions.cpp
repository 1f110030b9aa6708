#include <cmath>
#include <vector>

#include "closetest/distributions.hpp"
#include "closetest/errors.hpp"
#include "closetest/statistic.hpp"
#include "doctest.h"
#include "stat_helpers.hpp"

using namespace closetest;

namespace {

DiscreteDistribution random_distribution(std::size_t k, RngStream& rng) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (double& v : w) {
        v = -std::log(1.0 - rng.next_double());  // Exp(1)
        sum += v;
    }
    for (double& v : w) v /= sum;
    return DiscreteDistribution(std::move(w));
}

}  // namespace

TEST_SUITE_BEGIN("distributions");

TEST_CASE("constructor validates and renormalizes") {
    CHECK_THROWS_AS(DiscreteDistribution({0.5, -0.1, 0.6}), DomainError);
    CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.4}), DomainError);
    CHECK_THROWS_AS(DiscreteDistribution(std::vector<double>{}), DimensionError);

    // A deviation below 1e-12 is absorbed.
    DiscreteDistribution d({0.5, 0.5 + 5e-13});
    double sum = d.prob(1) + d.prob(2);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("tv_distance matches hand values") {
    DiscreteDistribution u4 = DiscreteDistribution::uniform(4);
    CHECK(tv_distance(u4, u4) == 0.0);

    DiscreteDistribution a({1.0, 0.0});
    DiscreteDistribution b({0.0, 1.0});
    CHECK(tv_distance(a, b) == 1.0);

    DiscreteDistribution p({0.7, 0.3});
    DiscreteDistribution q({0.4, 0.6});
    CHECK(tv_distance(p, q) == doctest::Approx(0.3).epsilon(1e-14));

    CHECK_THROWS_AS(tv_distance(u4, p), DimensionError);
}

TEST_CASE("tv_distance properties on random pairs") {
    RngStream rng(2024, 0);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t k = 2 + rng.next_below(12);
        DiscreteDistribution p = random_distribution(k, rng);
        DiscreteDistribution q = random_distribution(k, rng);
        double d = tv_distance(p, q);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(d == tv_distance(q, p));
        CHECK(tv_distance(p, p) == 0.0);
        // Flattening preserves the distance.
        double flat = tv_distance(flatten_distribution(p), flatten_distribution(q));
        CHECK(flat == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("flatten_distribution splits every mass in four") {
    DiscreteDistribution point({1.0});
    DiscreteDistribution flat = flatten_distribution(point);
    REQUIRE(flat.size() == 4);
    for (std::uint32_t s = 1; s <= 4; ++s) CHECK(flat.prob(s) == 0.25);

    DiscreteDistribution half({0.5, 0.5});
    DiscreteDistribution flat8 = flatten_distribution(half);
    REQUIRE(flat8.size() == 8);
    for (std::uint32_t s = 1; s <= 8; ++s) CHECK(flat8.prob(s) == 0.125);

    RngStream rng(77, 0);
    for (int rep = 0; rep < 50; ++rep) {
        DiscreteDistribution p = random_distribution(3 + rng.next_below(20), rng);
        DiscreteDistribution f = flatten_distribution(p);
        CHECK(f.size() == 4 * p.size());
        double sum = 0.0;
        for (double v : f.probs()) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.max_prob() == doctest::Approx(p.max_prob() / 4.0).epsilon(1e-14));
        CHECK(f.max_prob() <= 0.25 + 1e-15);
    }
}

TEST_CASE("flatten_samples maps into the right sub-blocks") {
    RngStream rng(5, 0);
    SampleBatch empty;
    CHECK(flatten_samples(empty, rng).n() == 0);

    SampleBatch ones;
    ones.symbols.assign(100000, 1);
    SampleBatch flat = flatten_samples(ones, rng);
    REQUIRE(flat.n() == ones.n());
    std::vector<std::int64_t> counts(4, 0);
    for (std::uint32_t s : flat.symbols) {
        REQUIRE(s >= 1);
        REQUIRE(s <= 4);
        ++counts[s - 1];
    }
    for (std::int64_t c : counts) {
        CHECK(static_cast<double>(c) / 1e5 == doctest::Approx(0.25).epsilon(0.04));
    }
}

TEST_CASE("flattened sampling is indistinguishable from sampling the flattened law") {
    // Chi-square goodness of fit of flatten_samples(samples of p) against
    // flatten_distribution(p), 1e5 draws, significance 1e-3.
    DiscreteDistribution p({0.4, 0.3, 0.15, 0.1, 0.05});
    DiscreteDistribution flat = flatten_distribution(p);
    RngStream rng(20240810, 0);
    const std::size_t draws = 100000;
    SampleBatch base = sample_categorical(p, draws, rng);
    SampleBatch mapped = flatten_samples(base, rng);
    CountTable table = histogram(mapped, flat.size());

    double stat = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        double expected = flat.probs()[i] * static_cast<double>(draws);
        double diff = static_cast<double>(table.counts[i]) - expected;
        stat += diff * diff / expected;
    }
    double pvalue = testhelpers::chi_square_pvalue(stat, static_cast<int>(flat.size()) - 1);
    CHECK(pvalue >= 1e-3);
}

TEST_CASE("sample_categorical edge cases and frequencies") {
    RngStream rng(9, 9);
    DiscreteDistribution p({1.0, 0.0, 0.0});
    CHECK(sample_categorical(p, 0, rng).n() == 0);
    SampleBatch five = sample_categorical(p, 5, rng);
    CHECK(five.symbols == std::vector<std::uint32_t>{1, 1, 1, 1, 1});

    DiscreteDistribution u = DiscreteDistribution::uniform(10);
    SampleBatch big = sample_categorical(u, 100000, rng);
    CountTable counts = histogram(big, 10);
    for (std::int64_t c : counts.counts) {
        CHECK(static_cast<double>(c) / 1e5 == doctest::Approx(0.1).epsilon(0.1));
    }
}

TEST_CASE("sample_binomial matches its law's moments") {
    RngStream rng(31337, 0);
    for (int i = 0; i < 100; ++i) CHECK(sample_binomial(50, 0.0, rng) == 0);
    for (int i = 0; i < 100; ++i) CHECK(sample_binomial(50, 1.0, rng) == 50);

    auto summary = testhelpers::run_mc(
        100000, [&] { return static_cast<double>(sample_binomial(16, 0.25, rng)); });
    CHECK(summary.mean == doctest::Approx(4.0).epsilon(0.0125));  // 4 +/- 0.05
    // Var = n p (1-p) = 3.
    CHECK(summary.stddev * summary.stddev == doctest::Approx(3.0).epsilon(0.05));

    // Bernoulli-sum path (n * p > 30).
    auto large = testhelpers::run_mc(
        20000, [&] { return static_cast<double>(sample_binomial(200, 0.3, rng)); });
    CHECK(large.mean == doctest::Approx(60.0).epsilon(0.01));
    CHECK(large.stddev * large.stddev == doctest::Approx(42.0).epsilon(0.08));

    CHECK_THROWS_AS(sample_binomial(10, 1.5, rng), DomainError);
    CHECK_THROWS_AS(sample_binomial(-1, 0.5, rng), DomainError);
}

TEST_CASE("sample_poisson matches its law's moments") {
    RngStream rng(555, 1);
    for (int i = 0; i < 100; ++i) CHECK(sample_poisson(0.0, rng) == 0);

    auto small = testhelpers::run_mc(
        100000, [&] { return static_cast<double>(sample_poisson(4.0, rng)); });
    CHECK(small.mean == doctest::Approx(4.0).epsilon(0.01));
    CHECK(small.stddev * small.stddev == doctest::Approx(4.0).epsilon(0.05));

    // Halving path (lambda > 30).
    auto large = testhelpers::run_mc(
        20000, [&] { return static_cast<double>(sample_poisson(64.0, rng)); });
    CHECK(large.mean == doctest::Approx(64.0).epsilon(0.01));
    CHECK(large.stddev * large.stddev == doctest::Approx(64.0).epsilon(0.08));

    CHECK_THROWS_AS(sample_poisson(-1.0, rng), DomainError);
}

TEST_SUITE_END();
