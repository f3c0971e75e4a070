#ifndef MARTLAB_RNG_HPP
#define MARTLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace martlab {

// splitmix64 finalizer; good enough avalanche for keying per-path streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based stream keyed by (seed, stream). Each simulated path owns its
// own stream, so ensembles are byte-identical no matter how paths are
// scheduled across threads. Not cryptographic; plenty for Monte Carlo.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed + 0x9e3779b97f4a7c15ULL * mix64(stream + 1))),
        ctr_(0),
        spare_(0.0),
        has_spare_(false) {}

  std::uint64_t next_u64() {
    ctr_ += 0x9e3779b97f4a7c15ULL;
    return mix64(ctr_ ^ key_);
  }

  // uniform on (0,1]; never returns 0 so log() below is safe
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal, Box-Muller with cached spare
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Knuth multiplication method; fine for the small means used here
  unsigned next_poisson(double mean) {
    double limit = std::exp(-mean);
    unsigned k = 0;
    double p = next_unit();
    while (p > limit) {
      ++k;
      p *= next_unit();
    }
    return k;
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
  double spare_;
  bool has_spare_;
};

}  // namespace martlab

#endif
