// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "oracles/reference_values.hpp"
#include "ppwdma/errors.hpp"
#include "ppwdma/specfun.hpp"

using ppwdma::specfun::BesselOrder;
using ppwdma::specfun::bessel_jy;
using ppwdma::specfun::hankel2;

namespace {

double wronskian_defect(double x) {
  const auto b0 = bessel_jy(BesselOrder(0), x);
  const auto b1 = bessel_jy(BesselOrder(1), x);
  return std::abs(b1.j * b0.y - b0.j * b1.y - 2.0 / (std::numbers::pi * x));
}

}  // namespace

TEST_CASE("Bessel values agree with the high-precision table") {
  for (const auto& row : ppwdma::oracle::kBesselTable) {
    CAPTURE(row.x);
    const double j[3] = {row.j0, row.j1, row.j2};
    const double y[3] = {row.y0, row.y1, row.y2};
    for (int n = 0; n < 3; ++n) {
      const auto got = bessel_jy(BesselOrder(n), row.x);
      CHECK(std::abs(got.j - j[n]) <= 1e-10);
      // Y_n diverges near zero; compare relatively there.
      CHECK(std::abs(got.y - y[n]) <= 1e-10 * std::max(1.0, std::abs(y[n])));
    }
  }
}

TEST_CASE("unit argument") {
  const auto b = bessel_jy(BesselOrder(0), 1.0);
  CHECK(b.j == doctest::Approx(0.7651977).epsilon(1e-7));
  CHECK(b.y == doctest::Approx(0.0882570).epsilon(1e-6));
  CHECK(wronskian_defect(1.0) <= 1e-12);
}

TEST_CASE("Wronskian holds across both evaluation regimes") {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) worst = std::max(worst, wronskian_defect(0.1 + 49.9 * i / 999.0));
  CHECK(worst <= 1e-10);
  // Either side of the series / asymptotic crossover.
  const double c = ppwdma::specfun::kAsymptoticCrossover;
  CHECK(wronskian_defect(std::nextafter(c, 0.0)) <= 1e-10);
  CHECK(wronskian_defect(c) <= 1e-10);
}

TEST_CASE("three-term recurrence links orders 0, 1, 2") {
  auto defect = [](double x) {
    const auto b0 = bessel_jy(BesselOrder(0), x);
    const auto b1 = bessel_jy(BesselOrder(1), x);
    const auto b2 = bessel_jy(BesselOrder(2), x);
    return std::max(std::abs(b2.j - (2.0 * b1.j / x - b0.j)),
                    std::abs(b2.y - (2.0 * b1.y / x - b0.y)));
  };
  CHECK(defect(2.0) < 1e-12);
  for (double x = 0.5; x <= 50.0; x += 0.37) {
    CAPTURE(x);
    CHECK(defect(x) <= 1e-10);
  }
}

TEST_CASE("Hankel function of the second kind") {
  for (double x : {0.3, 1.0, 7.5, 12.99, 13.0, 40.0}) {
    for (int n = 0; n < 3; ++n) {
      const auto b = bessel_jy(BesselOrder(n), x);
      const auto h = hankel2(BesselOrder(n), x);
      CHECK(h.real() == b.j);
      CHECK(h.imag() == -b.y);
      CHECK(std::conj(h) == std::complex<double>(b.j, b.y));
    }
  }
  const double x = 100.0;
  const double envelope = std::sqrt(2.0 / (std::numbers::pi * x));
  CHECK(std::abs(hankel2(BesselOrder(0), x)) == doctest::Approx(envelope).epsilon(0.01));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(BesselOrder(3), ppwdma::DomainError);
  CHECK_THROWS_AS(BesselOrder(-1), ppwdma::DomainError);
  CHECK_THROWS_AS(bessel_jy(BesselOrder(0), 0.0), ppwdma::DomainError);
  CHECK_THROWS_AS(bessel_jy(BesselOrder(1), -2.0), ppwdma::DomainError);
  CHECK_THROWS_AS(hankel2(BesselOrder(2), std::numeric_limits<double>::quiet_NaN()),
                  ppwdma::DomainError);
  CHECK_THROWS_AS(hankel2(BesselOrder(0), std::numeric_limits<double>::infinity()),
                  ppwdma::DomainError);
}
