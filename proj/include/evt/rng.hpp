#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace evt {

// Identifies one logical random stream: replication r of a run with a
// given master seed uses stream_id = r, so results do not depend on how
// replications are scheduled across threads.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

// Distinct per-purpose substreams of the same SeedSpec stay independent
// (the generation stream is unaffected by how many alternative-index
// draws happen, and vice versa).
enum class StreamPurpose : std::uint32_t {
  DataGeneration = 0,
  AlternativeDraw = 1,
  Generic = 2,
};

// Philox-4x32-10 counter-based generator (Salmon et al., "Parallel
// random numbers: as easy as 1, 2, 3", SC'11).  Stateless block
// function: 128-bit counter plus 64-bit key in, 128 bits out.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round != 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t prod0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t prod1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(prod0);
      const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(prod1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Buffered stream view over Philox blocks.  The key carries the master
// seed with the purpose folded into its high word; the counter carries
// the stream id (high half) and a per-stream draw counter (low half).
class RandomStream {
 public:
  RandomStream(const SeedSpec& seed, StreamPurpose purpose)
      : key_{static_cast<std::uint32_t>(seed.master_seed),
             static_cast<std::uint32_t>(seed.master_seed >> 32) ^
                 ((static_cast<std::uint32_t>(purpose) + 1u) * 0x85EBCA6Bu)},
        stream_lo_(static_cast<std::uint32_t>(seed.stream_id)),
        stream_hi_(static_cast<std::uint32_t>(seed.stream_id >> 32)) {}

  std::uint64_t next_bits() {
    if (have_spare_bits_) {
      have_spare_bits_ = false;
      return spare_bits_;
    }
    const auto out = Philox4x32::block(
        {static_cast<std::uint32_t>(draw_),
         static_cast<std::uint32_t>(draw_ >> 32), stream_lo_, stream_hi_},
        key_);
    ++draw_;
    spare_bits_ = (std::uint64_t{out[3]} << 32) | out[2];
    have_spare_bits_ = true;
    return (std::uint64_t{out[1]} << 32) | out[0];
  }

  // Uniform on the open interval (0,1): 53 random bits centered in
  // their bin, so 0 and 1 are unreachable.
  double next_uniform() {
    return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // buffered.
  double next_normal() {
    if (have_spare_normal_) {
      have_spare_normal_ = false;
      return spare_normal_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_normal_ = radius * std::sin(angle);
    have_spare_normal_ = true;
    return radius * std::cos(angle);
  }

  // Unbiased draw from {0, ..., n-1} by rejection.
  std::uint64_t next_uint_below(std::uint64_t n) {
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    std::uint64_t r = next_bits();
    while (r < min) r = next_bits();
    return r % n;
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t draw_ = 0;
  std::uint64_t spare_bits_ = 0;
  double spare_normal_ = 0.0;
  bool have_spare_bits_ = false;
  bool have_spare_normal_ = false;
};

}  // namespace evt
