#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

namespace toysae {

// SplitMix64 (Steele/Lea/Flood finalizer, gamma = golden ratio).  Chosen so
// streams are reproducible from the algorithm description alone: the k-th
// output of seed s is mix64(s + (k+1)*GAMMA).
inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kSplitMixGamma;
    return mix64(state_);
  }

  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  // strictly inside (0,1): top 53 bits, centered on the dyadic grid
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller; caches the second variate
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  // uniform integer in [0, n) by rejection; avoids modulo bias and keeps the
  // draw sequence platform-independent
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  // independent child stream: double-mix so related (seed, key) pairs decouple
  SplitMix64 derive(std::uint64_t key) const {
    return SplitMix64(mix64(mix64(state_ + kSplitMixGamma * (key + 1)) ^
                            0x5851f42d4c957f2dULL));
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// documented cell-seed hash for sweeps: fold each field through mix64
inline std::uint64_t cell_seed(std::uint64_t master, double p, std::uint64_t n_s,
                               std::uint64_t n_d, std::uint64_t replicate) {
  std::uint64_t p_bits;
  static_assert(sizeof(p_bits) == sizeof(p));
  std::memcpy(&p_bits, &p, sizeof(p));
  std::uint64_t h = mix64(master ^ 0x243f6a8885a308d3ULL);
  h = mix64(h + kSplitMixGamma * p_bits);
  h = mix64(h + kSplitMixGamma * n_s);
  h = mix64(h + kSplitMixGamma * n_d);
  h = mix64(h + kSplitMixGamma * (replicate + 1));
  return h;
}

}  // namespace toysae
