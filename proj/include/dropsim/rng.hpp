#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dropsim {

/// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as
/// 1, 2, 3"). A stream is keyed by (run seed, stream index); draws are a
/// pure function of (key, counter), so ensembles are reproducible no
/// matter how trajectories are scheduled across threads.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  std::uint32_t next_u32() {
    if (idx_ == 4) {
      block_ = generate(ctr_, key_);
      if (++ctr_[0] == 0) ++ctr_[1];
      idx_ = 0;
    }
    return block_[idx_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t hi = next_u32() >> 5;  // 27 bits
    const std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  Key key_;
  Block ctr_;
  Block block_{};
  int idx_ = 4;
};

/// Standard normal by Box-Muller.
inline double standard_normal(Philox& rng) {
  constexpr double kTwoPi = 6.283185307179586476925;
  double u1 = rng.uniform();
  while (u1 <= 0.0) u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace dropsim
