#include "closetest/rng.hpp"

#include <stdexcept>

namespace closetest {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

std::array<std::uint32_t, 4> RngStream::next_block() {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_id_),
        static_cast<std::uint32_t>(stream_id_ >> 32),
    };
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);

    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    ++block_;
    return ctr;
}

std::uint64_t RngStream::next_u64() {
    if (buf_pos_ >= 2) {
        buf_ = next_block();
        buf_pos_ = 0;
    }
    std::uint64_t lo = buf_[2 * buf_pos_];
    std::uint64_t hi = buf_[2 * buf_pos_ + 1];
    ++buf_pos_;
    return lo | (hi << 32);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("RngStream::next_below: bound must be >= 1");
    if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
    // Rejection sampling on the largest multiple of bound below 2^64.
    std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
    for (;;) {
        std::uint64_t v = next_u64();
        if (limit == 0 || v < limit) return v % bound;
    }
}

}  // namespace closetest
