// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

// Cylindrical Bessel functions J_n, Y_n and the Hankel function of the second
// kind for integer orders 0..2 and positive real arguments.
//
// Small arguments use the ascending series; arguments at or above
// kAsymptoticCrossover use the Hankel asymptotic expansion. At the crossover
// the series loses about four digits to cancellation and the truncated
// asymptotic remainder is of order e^{-2x}, so both sides stay well inside
// 1e-10 absolute error.

#pragma once

#include <complex>

namespace ppwdma::specfun {

inline constexpr double kAsymptoticCrossover = 13.0;

class BesselOrder {
 public:
  /// Throws DomainError unless value is 0, 1 or 2.
  explicit BesselOrder(int value);

  int value() const noexcept { return value_; }

 private:
  int value_;
};

struct BesselPair {
  double j;
  double y;
};

/// J_n(x) and Y_n(x). Throws DomainError for x <= 0 or non-finite x.
BesselPair bessel_jy(BesselOrder order, double x);

/// H2_n(x) = J_n(x) - j Y_n(x).
std::complex<double> hankel2(BesselOrder order, double x);

}  // namespace ppwdma::specfun
