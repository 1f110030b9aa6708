#pragma once

#include <cstdint>
#include <optional>

#include "closetest/distributions.hpp"
#include "closetest/statistic.hpp"

namespace closetest {

struct TestParams {
    std::size_t k = 1;      // domain size of the input distributions
    double epsilon = 0.5;   // distance parameter, in (0, 1]
    double delta = 0.1;     // error probability, in (0, 1]
};

// Everything needed to run one test: the per-batch sample size n, the
// flattened domain size 4k, the expectation-gap floor and the decision
// threshold (half the floor).
struct TestPlan {
    TestParams params;
    std::int64_t n = 0;
    std::size_t effective_k = 0;
    double delta_star_value = 0.0;
    double threshold = 0.0;
};

enum class Decision { Equal, Far };

struct Verdict {
    Decision decision = Decision::Equal;
    double z_value = 0.0;
    double threshold = 0.0;
    TestPlan plan;
};

// Expectation-gap floor (1/12) min(eps, (eps^2/3)(n/k), (eps^2/11) sqrt(n/k)).
// Callers working on a flattened domain pass the effective k (= 4 * original).
double delta_star(std::int64_t n, std::size_t k, double epsilon);

// Smallest n >= 16 with exp(-n * delta_star(n, 4k, eps)^2 / 72) <= delta,
// found by doubling then binary search.  Non-increasing in epsilon and delta,
// non-decreasing in k.
std::int64_t required_samples(const TestParams& params);

// Binds n (supplied or derived), the flattened domain, the gap floor and the
// threshold delta_star/2 into a plan.
TestPlan make_plan(const TestParams& params, std::optional<std::int64_t> n_override = {});

// Runs one end-to-end test: flattens both 2n-sample batches onto [4k] (the
// p batch first, then the q batch, consuming `rng` sequentially), splits
// deterministically, computes Z, and decides Far iff Z >= threshold.
Verdict run_test(const TestPlan& plan, const SampleBatch& samples_p, const SampleBatch& samples_q,
                 RngStream& rng);

const char* to_string(Decision decision);

}  // namespace closetest
