#include "tailmon/rng.hpp"

#include "tailmon/stats.hpp"

namespace tailmon {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  s ^= a + 0x9e3779b97f4a7c15ULL;
  k ^= splitmix64(s);
  s ^= b + 0xc2b2ae3d27d4eb4fULL;
  k ^= splitmix64(s);
  return k;
}

double Rng::uniform01() {
  // 53-bit mantissa; resample the (measure-zero) exact 0.
  for (;;) {
    const double u =
        static_cast<double>(gen_() >> 11) * 0x1.0p-53;  // in [0, 1)
    if (u > 0.0) return u;
  }
}

double Rng::normal() { return norm_quantile(uniform01()); }

double Rng::student_t(double nu) { return student_t_quantile(uniform01(), nu); }

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t x = gen_();
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(n)) >>
      64);
}

}  // namespace tailmon
