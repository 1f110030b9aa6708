#include <benchmark/benchmark.h>

#include "closetest/distributions.hpp"
#include "closetest/gap_oracle.hpp"
#include "closetest/statistic.hpp"
#include "closetest/tester.hpp"

namespace {

using namespace closetest;

void BM_exact_gap_binomial(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_gap_binomial(n, 0.05, 0.20));
    }
}
BENCHMARK(BM_exact_gap_binomial)->Arg(16)->Arg(64)->Arg(128)->Arg(256);

void BM_exact_gap_poisson(benchmark::State& state) {
    const double mu = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_gap_poisson(mu, 0.5 * mu));
    }
}
BENCHMARK(BM_exact_gap_poisson)->Arg(4)->Arg(16)->Arg(32);

void BM_zolotarev_gap_binomial(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    auto u = make_binomial_cf(n, 0.05);
    auto v = make_binomial_cf(n, 0.20);
    for (auto _ : state) {
        benchmark::DoNotOptimize(zolotarev_gap(u, v));
    }
}
BENCHMARK(BM_zolotarev_gap_binomial)->Arg(16)->Arg(128);

void BM_sample_categorical(benchmark::State& state) {
    DiscreteDistribution p = DiscreteDistribution::uniform(state.range(0));
    RngStream rng(1, 0);
    for (auto _ : state) {
        SampleBatch batch = sample_categorical(p, 10000, rng);
        benchmark::DoNotOptimize(batch.symbols.data());
    }
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_sample_categorical)->Arg(100)->Arg(10000);

void BM_compute_z(benchmark::State& state) {
    const std::size_t k = static_cast<std::size_t>(state.range(0));
    DiscreteDistribution p = DiscreteDistribution::uniform(k);
    RngStream rng(2, 0);
    SampleBatch a = sample_categorical(p, 200000, rng);
    SampleBatch b = sample_categorical(p, 200000, rng);
    FourWaySplit split = split_samples(a, b, k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_z(split));
    }
}
BENCHMARK(BM_compute_z)->Arg(400)->Arg(4000);

void BM_required_samples(benchmark::State& state) {
    TestParams params{static_cast<std::size_t>(state.range(0)), 0.5, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(required_samples(params));
    }
}
BENCHMARK(BM_required_samples)->Arg(100)->Arg(1000000);

}  // namespace

BENCHMARK_MAIN();
