#ifndef COVERLOCK_RNG_HPP
#define COVERLOCK_RNG_HPP

#include <cmath>
#include <cstdint>

namespace coverlock {

// SplitMix64 finalizer; the workhorse behind the counter-based streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic counter-based stream: the t-th output is a hash of
// (key, t), so streams keyed by (seed, n, replication, attempt) can be
// consumed in any parallel schedule and still reproduce bit-identically.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0) {
    key_ = mix64(seed);
    key_ = mix64(key_ ^ a);
    key_ = mix64(key_ ^ b);
    key_ = mix64(key_ ^ c);
  }

  std::uint64_t next_u64() { return mix64(key_ ^ (0x9e3779b97f4a7c15ULL * ++counter_)); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via the Box-Muller pair; no rejection, so the draw
  // count per call is fixed.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // in (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace coverlock

#endif  // COVERLOCK_RNG_HPP
