#pragma once

#include <array>
#include <cstdint>

namespace proxflow {

/// Counter-based PRNG (Philox4x32-10). A generator is addressed by a 64-bit
/// seed (the key) and a 64-bit stream id; blocks are indexed by a 64-bit
/// counter. Identical (seed, stream) pairs reproduce identical sequences on
/// every platform, which is what makes the data generators byte-reproducible.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream) : key0_(static_cast<std::uint32_t>(seed)), key1_(static_cast<std::uint32_t>(seed >> 32)), stream_(stream) {}

  /// Raw 4x32-bit block for a given counter value (stateless).
  std::array<std::uint32_t, 4> block(std::uint64_t counter) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller on consecutive uniforms.
  double normal();

 private:
  std::uint32_t key0_, key1_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;  // empty
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace proxflow
