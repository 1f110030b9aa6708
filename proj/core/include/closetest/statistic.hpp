#pragma once

#include <cstdint>
#include <vector>

#include "closetest/distributions.hpp"

namespace closetest {

// Occurrence counts of each symbol of {1, ..., k} in a batch of n samples.
struct CountTable {
    std::vector<std::int64_t> counts;  // index i holds the count of symbol i+1
    std::int64_t n = 0;                // total sample count; equals sum(counts)

    std::size_t k() const { return counts.size(); }
    std::int64_t count(std::uint32_t symbol) const { return counts.at(symbol - 1); }
};

// The four count tables feeding the test statistic: two disjoint halves of
// the p-samples (x, xprime) and two of the q-samples (y, yprime).
struct FourWaySplit {
    CountTable x;
    CountTable xprime;
    CountTable y;
    CountTable yprime;

    std::size_t k() const { return x.k(); }
    std::int64_t n() const { return x.n; }
};

enum class BatchId { X, XPrime, Y, YPrime };

CountTable histogram(const SampleBatch& batch, std::size_t k);

// Deterministic first-half/second-half split of two batches of even length;
// callers wanting a randomized split shuffle upstream.
FourWaySplit split_samples(const SampleBatch& from_p, const SampleBatch& from_q, std::size_t k);

// The renormalized statistic
//   Z = (1/n) * sum_i (|x_i - y_i| + |x'_i - y'_i| - |x_i - x'_i| - |y_i - y'_i|).
// The sum is accumulated in integer arithmetic and divided by n once.
double compute_z(const FourWaySplit& split);

// Moves the sample at position `index` (1-based, in the canonical
// sorted-by-symbol order of the chosen batch) to `new_symbol` and returns
// |Z(modified) - Z(original)| computed from the integer numerators.  The
// sharp per-sample bound is 4/n: the moved count enters two absolute
// differences, each 1-Lipschitz, at both the old and the new symbol.
double bounded_difference_audit(const FourWaySplit& split, BatchId which_batch,
                                std::int64_t index, std::uint32_t new_symbol);

}  // namespace closetest
