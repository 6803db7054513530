#pragma once

#include <array>
#include <cstdint>

namespace rndiff {

// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit counter
// and a 64-bit key to 128 pseudo-random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// SplitMix64 finalizer, used to derive independent seeds from (seed, tag).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Stream id for the return drawn at calendar step `step` of path `path`.
// Paths are limited to 2^32 per step.
constexpr std::uint64_t substream(std::uint64_t step, std::uint64_t path) {
  return (step << 32) | (path & 0xffffffffULL);
}

// Counter-based generator: (seed, stream) selects an independent sequence and
// the block index walks it. Copying a CounterRng forks the sequence; two
// generators with equal (seed, stream) always produce identical output.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Standard normal via Box-Muller; both variates of each pair are used.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rndiff
