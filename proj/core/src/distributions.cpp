#include "closetest/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "closetest/errors.hpp"

namespace closetest {

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DimensionError("DiscreteDistribution: domain must be nonempty");
    double sum = 0.0;
    for (double v : probs_) {
        if (!(v >= 0.0)) throw DomainError("DiscreteDistribution: negative or NaN entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
        throw DomainError("DiscreteDistribution: entries sum to " + std::to_string(sum) +
                          ", outside tolerance of 1");
    }
    if (sum != 1.0) {
        for (double& v : probs_) v /= sum;
    }
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t k) {
    if (k == 0) throw DimensionError("uniform: domain must be nonempty");
    return DiscreteDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

double DiscreteDistribution::prob(std::uint32_t symbol) const {
    if (symbol < 1 || symbol > probs_.size()) {
        throw RangeError("DiscreteDistribution::prob: symbol " + std::to_string(symbol) +
                         " outside 1.." + std::to_string(probs_.size()));
    }
    return probs_[symbol - 1];
}

double DiscreteDistribution::max_prob() const {
    return *std::max_element(probs_.begin(), probs_.end());
}

double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.size() != q.size()) {
        throw DimensionError("tv_distance: domain sizes differ (" + std::to_string(p.size()) +
                             " vs " + std::to_string(q.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p.probs()[i] - q.probs()[i]);
    return 0.5 * sum;
}

DiscreteDistribution flatten_distribution(const DiscreteDistribution& p) {
    std::vector<double> out(4 * p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double quarter = p.probs()[i] * 0.25;
        out[4 * i] = out[4 * i + 1] = out[4 * i + 2] = out[4 * i + 3] = quarter;
    }
    return DiscreteDistribution(std::move(out));
}

SampleBatch flatten_samples(const SampleBatch& batch, RngStream& rng) {
    SampleBatch out;
    out.symbols.reserve(batch.symbols.size());
    for (std::uint32_t s : batch.symbols) {
        std::uint32_t offset = static_cast<std::uint32_t>(rng.next_below(4));
        out.symbols.push_back(4 * (s - 1) + 1 + offset);
    }
    return out;
}

SampleBatch sample_categorical(const DiscreteDistribution& p, std::size_t n, RngStream& rng) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p.probs()[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    SampleBatch out;
    out.symbols.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.next_double();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out.symbols.push_back(static_cast<std::uint32_t>(it - cdf.begin()) + 1);
    }
    return out;
}

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
    if (n < 0) throw DomainError("sample_binomial: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_binomial: p must be in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);

    double np = static_cast<double>(n) * p;
    if (np <= 30.0) {
        // CDF inversion via the pmf recurrence; (1-p)^n >= e^{-60} here, so
        // the starting term never underflows.
        double u = rng.next_double();
        double pmf = std::pow(1.0 - p, static_cast<double>(n));
        double cdf = pmf;
        std::int64_t x = 0;
        double ratio = p / (1.0 - p);
        while (u > cdf && x < n) {
            pmf *= ratio * static_cast<double>(n - x) / static_cast<double>(x + 1);
            ++x;
            cdf += pmf;
        }
        return x;
    }

    std::int64_t count = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (rng.next_double() < p) ++count;
    }
    return count;
}

std::int64_t sample_poisson(double lambda, RngStream& rng) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("sample_poisson: lambda must be finite and >= 0");
    }
    if (lambda == 0.0) return 0;
    if (lambda > 30.0) {
        // Infinite divisibility: an exact split into two independent halves.
        double half = lambda * 0.5;
        return sample_poisson(half, rng) + sample_poisson(half, rng);
    }
    double u = rng.next_double();
    double pmf = std::exp(-lambda);
    double cdf = pmf;
    std::int64_t x = 0;
    // The loop terminates with probability 1; the guard covers the tail mass
    // lost to rounding when u is extremely close to 1.
    while (u > cdf && x < 1000000) {
        ++x;
        pmf *= lambda / static_cast<double>(x);
        cdf += pmf;
    }
    return x;
}

}  // namespace closetest
