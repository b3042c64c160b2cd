#pragma once

#include <cmath>
#include <cstdint>

namespace kitchen {

// Counter-based pseudorandom numbers built on the splitmix64 finalizer.
// Every draw is a pure function of (seed, counter), so parallel consumers
// can be given independent child seeds and replayed in any order.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// n-th output (0-based) of the splitmix64 stream seeded with `seed`.
constexpr std::uint64_t stream_at(std::uint64_t seed, std::uint64_t n) {
  return mix64(seed + (n + 1) * kGolden);
}

// Documented child-seed derivation: child k of a master seed is the k-th
// stream output. Used for task sequences and per-env streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  return stream_at(master, k);
}

class Rng {
 public:
  Rng() = default;
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return stream_at(seed_, counter_++); }

  // Uniform in [lo, hi], multiply-shift bounded draw.
  std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    return lo + static_cast<std::uint64_t>(
                    (static_cast<unsigned __int128>(next_u64()) * span) >> 64);
  }

  int uniform_int(int lo, int hi) {
    return static_cast<int>(uniform_u64(0, static_cast<std::uint64_t>(hi - lo))) + lo;
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (two draws per sample).
  double gaussian() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

  // Independent stream tied to (this seed, tag).
  Rng child(std::uint64_t tag) const { return Rng(derive_seed(seed_, tag)); }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace kitchen
