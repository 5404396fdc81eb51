// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppwdma/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ppwdma/errors.hpp"

namespace ppwdma::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr int kMaxTerms = 300;

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// digamma at a positive integer: psi(m) = H_{m-1} - gamma
double digamma_int(int m) {
  double h = 0.0;
  for (int i = 1; i < m; ++i) h += 1.0 / i;
  return h - kEulerGamma;
}

BesselPair ascending_series(int n, double x) {
  const double half = 0.5 * x;
  const double q = -half * half;

  double term = std::pow(half, n) / factorial(n);
  double j_sum = 0.0;
  double y_tail = 0.0;
  double psi_a = digamma_int(1);
  double psi_b = digamma_int(n + 1);
  for (int k = 0; k < kMaxTerms; ++k) {
    j_sum += term;
    y_tail += (psi_a + psi_b) * term;
    const double next = term * q / ((k + 1.0) * (n + k + 1.0));
    psi_a += 1.0 / (k + 1);
    psi_b += 1.0 / (n + k + 1);
    if (std::abs(next) * (std::abs(psi_a) + std::abs(psi_b) + 1.0) < 1e-18 && k > 1) break;
    term = next;
  }

  double y_head = 0.0;
  for (int k = 0; k < n; ++k) {
    y_head += factorial(n - k - 1) / factorial(k) * std::pow(half, 2 * k - n);
  }

  const double y = -y_head / kPi + (2.0 / kPi) * std::log(half) * j_sum - y_tail / kPi;
  return {j_sum, y};
}

BesselPair hankel_asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double last = 1.0;
  for (int m = 1; m < kMaxTerms; ++m) {
    const double odd = 2.0 * m - 1.0;
    a *= (mu - odd * odd) / (m * 8.0 * x);
    const double mag = std::abs(a);
    if (mag > last) break;  // series has started to diverge
    // P takes the even terms, Q the odd ones, each with alternating sign
    const double sign = ((m / 2) % 2 == 0) ? 1.0 : -1.0;
    if (m % 2 == 0) {
      p += sign * a;
    } else {
      q += sign * a;
    }
    if (mag < 1e-17) break;
    last = mag;
  }
  const double chi = x - (0.5 * n + 0.25) * kPi;
  const double amp = std::sqrt(2.0 / (kPi * x));
  const double c = std::cos(chi);
  const double s = std::sin(chi);
  return {amp * (p * c - q * s), amp * (p * s + q * c)};
}

}  // namespace

BesselOrder::BesselOrder(int value) : value_(value) {
  if (value < 0 || value > 2) {
    throw DomainError("Bessel order must be 0, 1 or 2, got " + std::to_string(value));
  }
}

BesselPair bessel_jy(BesselOrder order, double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("bessel_jy requires finite x > 0");
  }
  return x < kAsymptoticCrossover ? ascending_series(order.value(), x)
                                  : hankel_asymptotic(order.value(), x);
}

std::complex<double> hankel2(BesselOrder order, double x) {
  const auto [j, y] = bessel_jy(order, x);
  return {j, -y};
}

}  // namespace ppwdma::specfun
