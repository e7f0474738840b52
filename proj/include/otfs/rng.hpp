#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace otfs {

using Engine = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seed of the independent substream owned by (trial, stream) under `master`.
/// Pure function of its arguments, so trials can run in any order on any worker.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial,
                                       std::uint64_t stream) noexcept {
  std::uint64_t s = detail::splitmix64(master);
  s = detail::splitmix64(s ^ trial);
  return detail::splitmix64(s ^ (stream * 0xD1B54A32D192ED03ULL));
}

inline Engine substream(std::uint64_t master, std::uint64_t trial, std::uint64_t stream) {
  return Engine(substream_seed(master, trial, stream));
}

/// Circularly-symmetric complex Gaussian CN(0, variance).
template <class Rng>
std::complex<double> complex_gaussian(Rng& rng, double variance = 1.0) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace otfs
