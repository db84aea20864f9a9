#ifndef SVTREG_RNG_HPP
#define SVTREG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace svtreg {

// SplitMix64 generator (Steele, Lea, Flood 2014) with Box-Muller normals.
// Substreams are derived by mixing the base seed with the stream index, so
// per-replication streams are reproducible regardless of thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    r.next();  // burn the mixer once so nearby seeds decorrelate
    return r;
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace svtreg

#endif
