#pragma once

#include <cstdint>
#include <vector>

#include "closetest/rng.hpp"

namespace closetest {

// Dense probability vector over the domain {1, ..., k}.  Entries must be
// nonnegative and sum to 1 within 1e-12; the constructor renormalizes away
// deviations below that tolerance and rejects anything larger.
class DiscreteDistribution {
  public:
    explicit DiscreteDistribution(std::vector<double> probs);

    static DiscreteDistribution uniform(std::size_t k);

    std::size_t size() const { return probs_.size(); }

    // Probability of 1-based symbol s.
    double prob(std::uint32_t symbol) const;

    const std::vector<double>& probs() const { return probs_; }

    double max_prob() const;

    static constexpr double kNormalizationTolerance = 1e-12;

  private:
    std::vector<double> probs_;
};

// A batch of i.i.d. samples; symbols are 1-based.
struct SampleBatch {
    std::vector<std::uint32_t> symbols;

    std::size_t n() const { return symbols.size(); }
};

// Total variation distance (1/2) * sum_i |p_i - q_i|.
double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Splits every symbol i of [k] into 4 sub-symbols 4i-3..4i of [4k], each
// carrying a quarter of the mass.  Preserves total variation distance and
// divides the max entry by 4, so the result always has max entry <= 1/4.
DiscreteDistribution flatten_distribution(const DiscreteDistribution& p);

// Maps each sample of a batch over [k] uniformly at random to one of its 4
// sub-symbols in [4k].  Composing sample_categorical(p) with this is
// distributed identically to sampling flatten_distribution(p) directly.
SampleBatch flatten_samples(const SampleBatch& batch, RngStream& rng);

// n i.i.d. draws from p (inverse-CDF on the cumulative table).
SampleBatch sample_categorical(const DiscreteDistribution& p, std::size_t n, RngStream& rng);

// Exact Bin(n, p) draw: CDF inversion when n*min(p,1-p) is small, otherwise
// a sum of Bernoulli trials.  No normal approximation anywhere.
std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng);

// Exact Poisson(lambda) draw: CDF inversion for small lambda, otherwise
// recursive halving (Poisson(l) = Poisson(l/2) + Poisson(l/2)).
std::int64_t sample_poisson(double lambda, RngStream& rng);

}  // namespace closetest
