#pragma once

#include <cmath>
#include <cstdint>

namespace netmimo::rng {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used both as the stream
/// generator's output function and as the hash for substream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Decorrelated substream key from (seed, a, b), e.g. (base seed, snr index,
/// trial) in the sweep harness or (channel seed, user, attempt) in sampling.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed ^ 0xD1B54A32D192ED03ULL);
  h = mix64(h ^ mix64(a + 0x8CB92BA72F3D8DD7ULL));
  h = mix64(h ^ mix64(b + 0xA24BAED4963EE407ULL));
  return h;
}

/// Counter-based SplitMix64 stream. The sequence is a pure function of the
/// seed and is identical on every platform with IEEE doubles; gaussians come
/// from Box-Muller over the stream's uniforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return mix64(state_++); }

  /// Uniform double in (0, 1].
  double next_double() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are generated together and the
  /// second value is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace netmimo::rng
