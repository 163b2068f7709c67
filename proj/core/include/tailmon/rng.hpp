#pragma once

#include <cstdint>
#include <random>

namespace tailmon {

/// splitmix64 step, used to derive well-mixed stream keys.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic key for per-row random streams, mixing a base seed with
/// two coordinates (e.g. symbol index, date index).
std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b);

/// Seeded random source with platform-stable output. All variates are
/// produced by inverse-CDF transforms of the mt19937_64 bit stream, so a
/// given seed yields the same sequence on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in (0, 1), never exactly 0 or 1.
  double uniform01();

  /// Standard normal via quantile inversion.
  double normal();

  /// Student-t with nu degrees of freedom via quantile inversion.
  double student_t(double nu);

  /// Uniform integer in [0, n) without modulo bias (Lemire reduction).
  std::uint64_t index(std::uint64_t n);

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tailmon
