#include "closetest/tester.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "closetest/errors.hpp"

namespace closetest {

namespace {

void check_params(const TestParams& params) {
    if (params.k < 1) throw DomainError("TestParams: k must be >= 1");
    if (!(params.epsilon > 0.0 && params.epsilon <= 1.0)) {
        throw DomainError("TestParams: epsilon must be in (0, 1]");
    }
    if (!(params.delta > 0.0 && params.delta <= 1.0)) {
        throw DomainError("TestParams: delta must be in (0, 1]");
    }
}

// n * delta_star(n, 4k, eps)^2 >= 72 ln(1/delta)  <=>  the McDiarmid failure
// probability exp(-n delta_star^2 / 72) is at most delta.
bool concentration_satisfied(std::int64_t n, const TestParams& params) {
    const double ds = delta_star(n, 4 * params.k, params.epsilon);
    return static_cast<double>(n) * ds * ds >= 72.0 * std::log(1.0 / params.delta);
}

}  // namespace

const char* to_string(Decision decision) {
    return decision == Decision::Far ? "far" : "equal";
}

double delta_star(std::int64_t n, std::size_t k, double epsilon) {
    if (n < 16) throw DomainError("delta_star: n must be >= 16");
    if (k < 1) throw DomainError("delta_star: k must be >= 1");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("delta_star: epsilon must be in (0, 1]");
    const double ratio = static_cast<double>(n) / static_cast<double>(k);
    const double eps_sq = epsilon * epsilon;
    return (1.0 / 12.0) *
           std::min({epsilon, (eps_sq / 3.0) * ratio, (eps_sq / 11.0) * std::sqrt(ratio)});
}

std::int64_t required_samples(const TestParams& params) {
    check_params(params);
    std::int64_t lo = 16;
    if (concentration_satisfied(lo, params)) return lo;
    std::int64_t hi = lo;
    while (!concentration_satisfied(hi, params)) hi *= 2;
    // Invariant: lo fails, hi satisfies.
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (concentration_satisfied(mid, params)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

TestPlan make_plan(const TestParams& params, std::optional<std::int64_t> n_override) {
    check_params(params);
    if (n_override && *n_override < 16) throw DomainError("make_plan: n override must be >= 16");
    TestPlan plan;
    plan.params = params;
    plan.n = n_override ? *n_override : required_samples(params);
    plan.effective_k = 4 * params.k;
    plan.delta_star_value = delta_star(plan.n, plan.effective_k, params.epsilon);
    plan.threshold = plan.delta_star_value / 2.0;
    return plan;
}

Verdict run_test(const TestPlan& plan, const SampleBatch& samples_p, const SampleBatch& samples_q,
                 RngStream& rng) {
    const std::size_t want = 2 * static_cast<std::size_t>(plan.n);
    if (samples_p.n() != want || samples_q.n() != want) {
        throw DimensionError("run_test: need exactly 2n = " + std::to_string(want) +
                             " samples per side, got " + std::to_string(samples_p.n()) + " and " +
                             std::to_string(samples_q.n()));
    }
    const SampleBatch flat_p = flatten_samples(samples_p, rng);
    const SampleBatch flat_q = flatten_samples(samples_q, rng);
    const FourWaySplit split = split_samples(flat_p, flat_q, plan.effective_k);

    Verdict verdict;
    verdict.plan = plan;
    verdict.threshold = plan.threshold;
    verdict.z_value = compute_z(split);
    verdict.decision = verdict.z_value >= plan.threshold ? Decision::Far : Decision::Equal;
    return verdict;
}

}  // namespace closetest
