#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "closetest/distributions.hpp"
#include "closetest/gap_oracle.hpp"
#include "closetest/tester.hpp"

namespace closetest {

// Runs `fn(i)` for i in [0, total).  Results must be written to
// caller-owned, index-addressed storage so the outcome is independent of
// scheduling; aggregation happens after the loop in index order.
void parallel_for(std::int64_t total, unsigned threads, const std::function<void(std::int64_t)>& fn);

struct ExperimentSpec {
    DiscreteDistribution p;
    DiscreteDistribution q;
    TestPlan plan;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
};

struct ExperimentResult {
    double far_rate = 0.0;
    std::int64_t far_count = 0;
    std::int64_t trials = 0;
    double z_mean = 0.0;
    double z_stddev = 0.0;
    std::chrono::duration<double> wall_time{0.0};
    std::optional<std::vector<double>> per_trial_z;
};

struct ExperimentOptions {
    unsigned threads = 0;        // 0 = hardware concurrency
    bool keep_per_trial = true;  // retain the per-trial Z vector
};

// Runs `trials` independent end-to-end tests; trial i draws from
// RngStream(seed, i), so results are bit-reproducible and independent of the
// thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options = {});

struct ConcentrationProfile {
    std::vector<double> bin_edges;        // size bins + 1
    std::vector<std::int64_t> bin_counts;  // size bins
    double z_mean = 0.0;
    double z_stddev = 0.0;
    double deviation = 0.0;          // delta_star / 3
    double tail_probability = 0.0;   // empirical P[|Z - mean| > deviation]
    double mcdiarmid_bound = 0.0;    // exp(-n delta_star^2 / 72)
    std::int64_t trials = 0;
};

// Empirical distribution of Z with the measured deviation tail next to the
// bounded-difference concentration bound it must respect.
ConcentrationProfile concentration_profile(const ExperimentSpec& spec,
                                           const ExperimentOptions& options = {});

// ---- Grid verification -------------------------------------------------------

struct GridSelection {
    bool binomial_bounds = true;
    bool poisson_bounds = true;
    bool cf_arguments = true;
    bool facts = true;
    bool zolotarev = true;
    bool csum = true;
    bool nonnegativity = true;
};

struct GridConfig {
    GridSelection selection;
    std::vector<std::int64_t> binomial_grid_n = {16, 24, 32, 64, 128};
    int prob_steps = 25;  // p, q in {0, 1, ..., prob_steps} / 100
    std::vector<std::int64_t> poisson_grid_n = {16, 32, 64, 128};
    std::vector<std::int64_t> argument_grid_n = {16, 64};
    int argument_prob_steps = 5;  // p, q in {0, 5, ..., 5*argument_prob_steps} / 100
    int argument_t_points = 200;
    int zolotarev_pairs = 100;
    std::uint64_t zolotarev_seed = 20240801;
    int csum_vectors = 1000;
    double binomial_bound_tolerance = 1e-10;
    double poisson_bound_tolerance = 1e-9;
    double zolotarev_tolerance = 1e-6;
    BoundCoefficients binomial_coeffs = kBinomialBoundCoefficients;
    BoundCoefficients poisson_coeffs = kPoissonBoundCoefficients;
    unsigned threads = 0;
};

struct GridRow {
    std::string check;
    std::vector<double> inputs;
    double lhs = 0.0;    // quantity being bounded
    double rhs = 0.0;    // bound it is checked against
    double margin = 0.0;
    bool ok = false;
};

struct VerificationReport {
    std::vector<GridRow> rows;

    std::size_t violation_count() const;
    std::vector<const GridRow*> violations() const;
};

// Runs every grid invariant (gap lower bounds, argument-bound inequalities, modulus
// facts, Zolotarev cross-validation, the csum inequality) and reports one row
// per grid point.
VerificationReport verify_grids(const GridConfig& config = {});

// ---- Statistics helpers --------------------------------------------------------

// Exact upper tail P[Bin(trials, rate) >= count].
double binomial_upper_tail(std::int64_t trials, double rate, std::int64_t count);

// ---- CSV emission ---------------------------------------------------------------

// One row per trial: trial,z,decision.  Deterministic order.
void write_experiment_csv(const ExperimentResult& result, double threshold,
                          const std::string& path);

// One row per grid point: check,i1,i2,i3,i4,lhs,rhs,margin,ok.
void write_verification_csv(const VerificationReport& report, const std::string& path);

}  // namespace closetest
