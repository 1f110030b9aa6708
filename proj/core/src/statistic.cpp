#include "closetest/statistic.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "closetest/errors.hpp"

namespace closetest {

namespace {

CountTable histogram_range(const std::vector<std::uint32_t>& symbols, std::size_t begin,
                           std::size_t end, std::size_t k) {
    CountTable table;
    table.counts.assign(k, 0);
    table.n = static_cast<std::int64_t>(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        std::uint32_t s = symbols[i];
        if (s < 1 || s > k) {
            throw RangeError("histogram: symbol " + std::to_string(s) + " outside 1.." +
                             std::to_string(k));
        }
        ++table.counts[s - 1];
    }
    return table;
}

std::int64_t z_numerator(const FourWaySplit& split) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < split.k(); ++i) {
        std::int64_t x = split.x.counts[i];
        std::int64_t xp = split.xprime.counts[i];
        std::int64_t y = split.y.counts[i];
        std::int64_t yp = split.yprime.counts[i];
        sum += std::llabs(x - y) + std::llabs(xp - yp) - std::llabs(x - xp) - std::llabs(y - yp);
    }
    return sum;
}

void check_split(const FourWaySplit& split) {
    const std::size_t k = split.x.k();
    if (split.xprime.k() != k || split.y.k() != k || split.yprime.k() != k) {
        throw DimensionError("FourWaySplit: tables have differing domain sizes");
    }
    const std::int64_t n = split.x.n;
    if (split.xprime.n != n || split.y.n != n || split.yprime.n != n) {
        throw DimensionError("FourWaySplit: tables have differing sample counts");
    }
}

}  // namespace

CountTable histogram(const SampleBatch& batch, std::size_t k) {
    if (k == 0) throw DimensionError("histogram: domain must be nonempty");
    return histogram_range(batch.symbols, 0, batch.symbols.size(), k);
}

FourWaySplit split_samples(const SampleBatch& from_p, const SampleBatch& from_q, std::size_t k) {
    if (from_p.n() % 2 != 0 || from_q.n() % 2 != 0) {
        throw DimensionError("split_samples: batches must have even length");
    }
    if (from_p.n() != from_q.n()) {
        throw DimensionError("split_samples: batches must have equal length");
    }
    const std::size_t n = from_p.n() / 2;
    FourWaySplit split;
    split.x = histogram_range(from_p.symbols, 0, n, k);
    split.xprime = histogram_range(from_p.symbols, n, 2 * n, k);
    split.y = histogram_range(from_q.symbols, 0, n, k);
    split.yprime = histogram_range(from_q.symbols, n, 2 * n, k);
    return split;
}

double compute_z(const FourWaySplit& split) {
    check_split(split);
    if (split.n() < 1) throw DegenerateInputError("compute_z: n must be >= 1");
    return static_cast<double>(z_numerator(split)) / static_cast<double>(split.n());
}

double bounded_difference_audit(const FourWaySplit& split, BatchId which_batch,
                                std::int64_t index, std::uint32_t new_symbol) {
    check_split(split);
    if (split.n() < 1) throw DegenerateInputError("bounded_difference_audit: n must be >= 1");
    if (index < 1 || index > split.n()) {
        throw RangeError("bounded_difference_audit: index " + std::to_string(index) +
                         " outside 1.." + std::to_string(split.n()));
    }
    if (new_symbol < 1 || new_symbol > split.k()) {
        throw RangeError("bounded_difference_audit: symbol " + std::to_string(new_symbol) +
                         " outside 1.." + std::to_string(split.k()));
    }

    FourWaySplit modified = split;
    CountTable* table = nullptr;
    switch (which_batch) {
        case BatchId::X: table = &modified.x; break;
        case BatchId::XPrime: table = &modified.xprime; break;
        case BatchId::Y: table = &modified.y; break;
        case BatchId::YPrime: table = &modified.yprime; break;
    }

    // Find the symbol holding the index-th sample in sorted-by-symbol order.
    std::int64_t cumulative = 0;
    std::size_t old_pos = 0;
    for (std::size_t i = 0; i < table->counts.size(); ++i) {
        cumulative += table->counts[i];
        if (index <= cumulative) {
            old_pos = i;
            break;
        }
    }

    const std::int64_t before = z_numerator(split);
    --table->counts[old_pos];
    ++table->counts[new_symbol - 1];
    const std::int64_t after = z_numerator(modified);
    return static_cast<double>(std::llabs(after - before)) / static_cast<double>(split.n());
}

}  // namespace closetest
