// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppwdma/em_model.hpp"

#include <cmath>
#include <string>

#include "ppwdma/errors.hpp"
#include "ppwdma/specfun.hpp"

namespace ppwdma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cd kJ{0.0, 1.0};

struct Separation {
  double rho;
  double psi;
};

Separation separation(const Point3& a, const Point3& b, const char* what) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double rho = std::hypot(dx, dy);
  if (!(rho > 0.0)) {
    throw DomainError(std::string(what) + ": coincident points");
  }
  return {rho, std::atan2(dy, dx)};
}

int exact_sqrt(int n) {
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : -1;
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(std::string(what) + " must be finite and positive");
  }
}

}  // namespace

void DmaGeometry::validate() const {
  require_positive(plate_height, "plate height");
  for (const auto& p : elements) {
    if (p.z != 0.0) throw DomainError("element positions must lie on z = 0");
  }
  for (const auto& p : feeds) {
    if (p.z != 0.0) throw DomainError("feed positions must lie on z = 0");
  }
  for (std::size_t n = 0; n < elements.size(); ++n) {
    for (std::size_t j = n + 1; j < elements.size(); ++j) {
      if (elements[n].x == elements[j].x && elements[n].y == elements[j].y) {
        throw DomainError("duplicate element position");
      }
    }
    for (const auto& f : feeds) {
      if (elements[n].x == f.x && elements[n].y == f.y) {
        throw DomainError("feed coincides with an element");
      }
    }
  }
}

DmaGeometry DmaGeometry::uniform_grid(int n_elements, int n_feeds, double aperture,
                                      double plate_height) {
  const int side = exact_sqrt(n_elements);
  const int feed_side = exact_sqrt(n_feeds);
  if (side <= 0 || feed_side <= 0) {
    throw DomainError("element and feed counts must be positive perfect squares");
  }
  require_positive(aperture, "aperture");

  DmaGeometry geom;
  geom.plate_height = plate_height;
  const double pitch = aperture / side;
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      geom.elements.push_back({(ix + 0.5) * pitch - 0.5 * aperture,
                               (iy + 0.5) * pitch - 0.5 * aperture, 0.0});
    }
  }
  const double feed_pitch = aperture / feed_side;
  for (int iy = 0; iy < feed_side; ++iy) {
    for (int ix = 0; ix < feed_side; ++ix) {
      geom.feeds.push_back({(ix + 0.5) * feed_pitch - 0.5 * aperture,
                            (iy + 0.5) * feed_pitch - 0.5 * aperture, 0.0});
    }
  }
  geom.validate();
  return geom;
}

void LorentzianParams::validate() const {
  if (resonance_freq.size() != resonance_strength.size()) {
    throw ContractError("resonance frequency and strength vectors differ in length");
  }
  for (Eigen::Index n = 0; n < resonance_freq.size(); ++n) {
    require_positive(resonance_freq[n], "resonance frequency");
    if (!(std::abs(resonance_strength[n]) >= kAlphaMin)) {
      throw DomainError("resonance strength below alpha_min");
    }
  }
}

WaveNumber WaveNumber::at(double frequency_hz) {
  require_positive(frequency_hz, "frequency");
  return {frequency_hz, 2.0 * kPi * frequency_hz / kSpeedOfLight};
}

double damping_c(double frequency, double plate_height) {
  require_positive(frequency, "frequency");
  require_positive(plate_height, "plate height");
  const double c = kSpeedOfLight;
  return 8.0 * kPi * kPi * frequency * frequency * frequency / (3.0 * c * c * c) +
         kPi * kPi * frequency * frequency / (2.0 * plate_height * c * c);
}

cd polarizability(double alpha0, double f0, double frequency, double plate_height) {
  if (!(std::abs(alpha0) >= kAlphaMin)) {
    throw DomainError("resonance strength below alpha_min");
  }
  require_positive(f0, "resonance frequency");
  const double f0sq = f0 * f0;
  const cd den{f0sq - frequency * frequency, alpha0 * f0sq * damping_c(frequency, plate_height)};
  return alpha0 * f0sq / den;
}

cd inverse_polarizability(double alpha0, double f0, double frequency, double plate_height) {
  if (!(std::abs(alpha0) >= kAlphaMin)) {
    throw DomainError("resonance strength below alpha_min");
  }
  require_positive(f0, "resonance frequency");
  const double f0sq = f0 * f0;
  return {(f0sq - frequency * frequency) / (alpha0 * f0sq), damping_c(frequency, plate_height)};
}

cd green_waveguide(const Point3& rn, const Point3& rj, const WaveNumber& k, double plate_height) {
  require_positive(plate_height, "plate height");
  const auto [rho, psi] = separation(rn, rj, "green_waveguide");
  const double kr = k.k * rho;
  const cd h0 = specfun::hankel2(specfun::BesselOrder(0), kr);
  const cd h2 = specfun::hankel2(specfun::BesselOrder(2), kr);
  return -(kJ * k.k * k.k / (8.0 * plate_height)) * (h0 - std::cos(2.0 * psi) * h2);
}

cd green_freespace(const Point3& rn, const Point3& rj, const WaveNumber& k) {
  const auto [rho, psi] = separation(rn, rj, "green_freespace");
  const double kr = k.k * rho;
  const double c = std::cos(psi);
  const cd bracket = (3.0 / (kr * kr) + 3.0 * kJ / kr - 1.0) * (c * c) +
                     (1.0 - kJ / kr - 1.0 / (kr * kr));
  return bracket * k.k * k.k * std::exp(-kJ * kr) / (2.0 * kPi * rho);
}

CouplingMatrix interaction_matrix(const DmaGeometry& geom, const WaveNumber& k) {
  const int n = geom.element_count();
  CouplingMatrix g = CouplingMatrix::zero(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const cd v = green_waveguide(geom.elements[a], geom.elements[b], k, geom.plate_height) +
                   green_freespace(geom.elements[a], geom.elements[b], k);
      g.entries(a, b) = v;
      g.entries(b, a) = v;
    }
  }
  return g;
}

Eigen::MatrixXcd excitation_matrix(const DmaGeometry& geom, const WaveNumber& k) {
  const double beta = k.k;
  Eigen::MatrixXcd hf(geom.element_count(), geom.feed_count());
  for (int n = 0; n < geom.element_count(); ++n) {
    for (int i = 0; i < geom.feed_count(); ++i) {
      const auto [d, psi] = separation(geom.elements[n], geom.feeds[i], "excitation_matrix");
      hf(n, i) = (kJ * beta / 4.0) * specfun::hankel2(specfun::BesselOrder(1), beta * d) *
                 std::sin(psi);
    }
  }
  return hf;
}

AnalogBeamformer::AnalogBeamformer(Eigen::MatrixXcd inverse, Eigen::MatrixXcd w_rf,
                                   Eigen::PartialPivLU<Eigen::MatrixXcd> lu, double rcond)
    : inverse_(std::move(inverse)), w_rf_(std::move(w_rf)), lu_(std::move(lu)), rcond_(rcond) {}

Eigen::MatrixXcd AnalogBeamformer::solve(const Eigen::MatrixXcd& rhs) const {
  return lu_.solve(rhs);
}

double AnalogBeamformer::identity_residual() const {
  const auto n = w_rf_.rows();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  return (inverse_ * w_rf_ - eye).norm() / eye.norm();
}

AnalogBeamformer analog_beamformer(const LorentzianParams& params, const CouplingMatrix& g,
                                   double frequency, double plate_height) {
  params.validate();
  const int n = params.size();
  if (g.entries.rows() != n || g.entries.cols() != n) {
    throw ContractError("coupling matrix size does not match element count");
  }

  Eigen::MatrixXcd inverse = -g.entries;
  for (int i = 0; i < n; ++i) {
    inverse(i, i) += inverse_polarizability(params.resonance_strength[i],
                                            params.resonance_freq[i], frequency, plate_height);
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(inverse);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw SingularityError("A^-1 - G is numerically singular", 1.0 / rcond);
  }

  Eigen::MatrixXcd w_rf;
  if (g.is_zero()) {
    // Uncoupled panel: W_RF is the polarizability matrix itself.
    w_rf = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      w_rf(i, i) = polarizability(params.resonance_strength[i], params.resonance_freq[i],
                                  frequency, plate_height);
    }
  } else {
    w_rf = lu.solve(Eigen::MatrixXcd::Identity(n, n));
  }
  return {std::move(inverse), std::move(w_rf), std::move(lu), rcond};
}

PanelPhysics PanelPhysics::build(DmaGeometry geometry, std::vector<double> frequencies,
                                 Eigen::VectorXd resonance_freq, bool coupled) {
  geometry.validate();
  if (resonance_freq.size() != geometry.element_count()) {
    throw ContractError("one resonance frequency per element is required");
  }
  PanelPhysics p;
  p.geometry = std::move(geometry);
  p.frequencies = std::move(frequencies);
  p.resonance_freq = std::move(resonance_freq);
  for (double f : p.frequencies) {
    const auto k = WaveNumber::at(f);
    p.coupling.push_back(coupled ? interaction_matrix(p.geometry, k)
                                 : CouplingMatrix::zero(p.element_count()));
    p.excitation.push_back(excitation_matrix(p.geometry, k));
  }
  return p;
}

PanelPhysics PanelPhysics::without_coupling() const {
  PanelPhysics p = *this;
  for (auto& g : p.coupling) g = CouplingMatrix::zero(element_count());
  return p;
}

std::vector<AnalogBeamformer> PanelPhysics::beamformers(const Eigen::VectorXd& alpha0) const {
  const LorentzianParams params{resonance_freq, alpha0};
  std::vector<AnalogBeamformer> out;
  out.reserve(frequencies.size());
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    out.push_back(analog_beamformer(params, coupling[k], frequencies[k], geometry.plate_height));
  }
  return out;
}

}  // namespace ppwdma
