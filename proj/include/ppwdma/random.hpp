// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ppwdma {

using RandomStream = std::mt19937_64;

/// splitmix64 finaliser; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the sub-stream identified by (master, tags...). Depends only on
/// the values, never on the order in which streams are requested.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix64(master);
  for (auto t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

inline RandomStream make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  return RandomStream(derive_seed(master, tags));
}

/// Circularly-symmetric complex Gaussian CN(0, variance).
inline std::complex<double> complex_gaussian(RandomStream& rng, double variance) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = std::sqrt(0.5 * variance);
  const double re = normal(rng);
  const double im = normal(rng);
  return {s * re, s * im};
}

inline double uniform(RandomStream& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace ppwdma
