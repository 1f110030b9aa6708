#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "closetest/distributions.hpp"
#include "closetest/rng.hpp"

namespace testhelpers {

// Builds a pair (p, q) over k symbols with every entry <= 1/4 and
// tv_distance(p, q) equal to target_tv up to rounding.  Even symbols only
// gain mass and odd symbols only lose it, so the total mass moved equals the
// tv distance exactly.  Odd entries are drawn richer than even ones to leave
// room for targets up to ~0.55 even at k = 8.  k must be even and >= 8.
inline std::pair<closetest::DiscreteDistribution, closetest::DiscreteDistribution>
separated_pair(std::size_t k, double target_tv, closetest::RngStream& rng) {
    if (k < 8 || k % 2 != 0) throw std::invalid_argument("separated_pair: k must be even, >= 8");
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> base(k);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            base[i] = (i % 2 == 0) ? 0.5 + 0.5 * rng.next_double() : 0.9 + 0.8 * rng.next_double();
            sum += base[i];
        }
        bool capped = false;
        for (double& v : base) {
            v /= sum;
            if (v > 0.23) capped = true;
        }
        if (capped) continue;

        std::vector<double> moved = base;
        double remaining = target_tv;
        // Drain odd donors into even receivers, not necessarily pairwise.
        std::size_t receiver = 0;
        for (std::size_t donor = 1; donor < k && remaining > 0.0; donor += 2) {
            double available = moved[donor];
            while (available > 1e-15 && remaining > 0.0 && receiver < k) {
                double room = 0.245 - moved[receiver];
                if (room <= 1e-15) {
                    receiver += 2;
                    continue;
                }
                double shift = std::min({available, room, remaining});
                moved[donor] -= shift;
                moved[receiver] += shift;
                available -= shift;
                remaining -= shift;
            }
        }
        if (remaining > 1e-12) continue;

        closetest::DiscreteDistribution p(base);
        closetest::DiscreteDistribution q(moved);
        return {std::move(p), std::move(q)};
    }
    throw std::runtime_error("separated_pair: could not reach the target tv distance");
}

}  // namespace testhelpers
