#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fibdd {

/// splitmix64 mixing step; used to derive independent per-point seeds so that
/// sweep results do not depend on execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

/// Deterministic RNG: mt19937_64 output is pinned by the standard, and the
/// Gaussian transform is done here rather than with std::normal_distribution
/// (whose algorithm is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; one fresh pair per call.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double gaussian(double sigma) { return sigma * gaussian(); }

  /// N(0, sigma) restricted to |x| <= bound, by rejection.
  double truncated_gaussian(double sigma, double bound) {
    for (;;) {
      const double x = gaussian(sigma);
      if (std::abs(x) <= bound) return x;
    }
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace fibdd
