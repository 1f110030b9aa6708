#pragma once

#include <array>
#include <cstdint>

namespace closetest {

// Counter-based random stream (Philox4x32-10).  A stream is identified by
// (seed, stream_id); equal identifiers reproduce the exact same sequence of
// draws, and distinct stream ids give statistically independent sequences
// under the same seed, so parallel workers can each own stream_id = worker
// index without coordination.
//
// The 64-bit seed forms the Philox key and the 64-bit stream id occupies the
// upper half of the 128-bit counter block; the lower half counts blocks.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53 random bits.
    double next_double();

    // Uniform integer in [0, bound), bound >= 1.  Unbiased (rejection).
    std::uint64_t next_below(std::uint64_t bound);

  private:
    std::array<std::uint32_t, 4> next_block();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 2;  // in units of u64 lanes; 2 == empty
};

}  // namespace closetest
