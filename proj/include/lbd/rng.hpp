#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace lbd {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Deterministic random stream. Distributions are implemented on top of the
/// raw 64-bit engine output so that draws are reproducible bit-for-bit across
/// standard library implementations; every (seed, path) pair owns an
/// independent stream, which is what makes batch generation order-free.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

  /// Derive a child stream from a seed and a path of identifiers,
  /// e.g. stream(seed, {kChemTrain, system, run}).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = detail::splitmix64(seed);
    for (std::uint64_t p : path) h = detail::splitmix64(h ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    return Rng(h);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double log_uniform(double lo, double hi) { return lo * std::exp(uniform() * std::log(hi / lo)); }

  /// Standard normal via Box-Muller. No state is cached between calls, so the
  /// draw sequence depends only on the number of prior calls.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

 private:
  std::mt19937_64 engine_;
};

/// Stream-path tags; keeps (seed, purpose) collisions impossible by construction.
namespace stream_tag {
inline constexpr std::uint64_t kChemRates = 0x11;
inline constexpr std::uint64_t kChemMixing = 0x12;
inline constexpr std::uint64_t kChemInit = 0x13;
inline constexpr std::uint64_t kChemConfound = 0x14;
inline constexpr std::uint64_t kChemTrain = 0x15;
inline constexpr std::uint64_t kChemNoise = 0x16;
inline constexpr std::uint64_t kChemTest = 0x17;
inline constexpr std::uint64_t kChemPlan = 0x18;
inline constexpr std::uint64_t kRoboParams = 0x21;
inline constexpr std::uint64_t kRoboInterface = 0x22;
inline constexpr std::uint64_t kRoboTargets = 0x23;
inline constexpr std::uint64_t kRoboTrain = 0x24;
}  // namespace stream_tag

}  // namespace lbd
