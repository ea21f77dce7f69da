#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

#include "macwt/errors.hpp"

namespace macwt {

/// SplitMix64 finalizer. Used to derive independent child seeds from a
/// parent seed so that no object ever draws from ambient randomness.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed `stream` of `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(parent) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 output is fixed by the standard; the distributions in <random>
/// are not, so sampling is done by hand on top of the raw engine.
using Engine = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection (no modulo bias).
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

/// Inverse-CDF draw from a probability vector.
inline std::size_t sample_index(Engine& rng, std::span<const double> pmf) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) continue;
    last_nonzero = i;
    acc += pmf[i];
    if (u < acc) return i;
  }
  return last_nonzero;
}

/// Exponential with the given mean (inverse CDF).
inline double sample_exponential(Engine& rng, double mean) {
  return -mean * std::log1p(-uniform01(rng));
}

}  // namespace macwt
