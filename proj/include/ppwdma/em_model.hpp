// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

// Coupled-dipole model of a parallel-plate-waveguide dynamic metasurface.
//
// Each slot element is an x-directed magnetic dipole with a Lorentzian
// polarizability. Dipole moments follow m = (A^-1 - G)^-1 H_f i, where A is
// the diagonal polarizability matrix, G the element-to-element interaction
// (guided + free-space) and H_f maps feed currents to the incident field.

#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace ppwdma {

using cd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kFreeSpaceImpedance = 120.0 * std::numbers::pi;

/// Smallest admissible |alpha_0|; A^-1 and the Jacobian divide by alpha_0.
inline constexpr double kAlphaMin = 1e-12;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// One PPW-DMA panel in local coordinates (aperture centre at the origin, z = 0).
struct DmaGeometry {
  std::vector<Point3> elements;
  std::vector<Point3> feeds;
  double plate_height = 0.0;

  int element_count() const { return static_cast<int>(elements.size()); }
  int feed_count() const { return static_cast<int>(feeds.size()); }

  /// Throws DomainError on off-plane points, duplicate elements,
  /// element/feed overlap or h <= 0.
  void validate() const;

  /// sqrt(N) x sqrt(N) elements with pitch L/sqrt(N) covering an L x L
  /// aperture, and a centred sqrt(Nf) x sqrt(Nf) feed grid with pitch
  /// L/sqrt(Nf). N and Nf must be perfect squares.
  static DmaGeometry uniform_grid(int n_elements, int n_feeds, double aperture,
                                  double plate_height);
};

struct LorentzianParams {
  Eigen::VectorXd resonance_freq;      // f_0,n [Hz]
  Eigen::VectorXd resonance_strength;  // alpha_0,n

  int size() const { return static_cast<int>(resonance_freq.size()); }
  void validate() const;
};

/// Free-space (and TEM guided) wavenumber at one frequency.
struct WaveNumber {
  double frequency = 0.0;
  double k = 0.0;

  static WaveNumber at(double frequency_hz);
};

/// Complex-symmetric, zero-diagonal interaction matrix G at one frequency.
struct CouplingMatrix {
  Eigen::MatrixXcd entries;

  static CouplingMatrix zero(int n) { return {Eigen::MatrixXcd::Zero(n, n)}; }
  bool is_zero() const { return entries.isZero(0.0); }
};

/// W_RF = (A^-1 - G)^-1 at one frequency. Keeps the LU factorization of
/// (A^-1 - G) so further solves against it reuse the same factors.
class AnalogBeamformer {
 public:
  AnalogBeamformer() = default;
  AnalogBeamformer(Eigen::MatrixXcd inverse, Eigen::MatrixXcd w_rf,
                   Eigen::PartialPivLU<Eigen::MatrixXcd> lu, double rcond);

  const Eigen::MatrixXcd& matrix() const { return w_rf_; }
  /// (A^-1 - G), i.e. W_RF^-1 without any further inversion.
  const Eigen::MatrixXcd& inverse() const { return inverse_; }
  double reciprocal_condition() const { return rcond_; }

  /// Solves (A^-1 - G) x = rhs with the cached factors.
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;

  /// ||(A^-1 - G) W_RF - I||_F / ||I||_F
  double identity_residual() const;

 private:
  Eigen::MatrixXcd inverse_;
  Eigen::MatrixXcd w_rf_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double rcond_ = 0.0;
};

/// Radiation damping C(f) = 8 pi^2 f^3 / (3 c^3) + pi^2 f^2 / (2 h c^2)  [m^-3].
double damping_c(double frequency, double plate_height);

/// Lorentzian polarizability alpha_0 f_0^2 / (f_0^2 - f^2 + j alpha_0 f_0^2 C(f)).
cd polarizability(double alpha0, double f0, double frequency, double plate_height);

/// 1 / polarizability, evaluated directly: (f_0^2 - f^2) / (alpha_0 f_0^2) + j C(f).
cd inverse_polarizability(double alpha0, double f0, double frequency, double plate_height);

/// Guided dipole-dipole kernel between two x-directed dipoles inside the PPW.
cd green_waveguide(const Point3& rn, const Point3& rj, const WaveNumber& k, double plate_height);

/// x-to-x free-space magnetic dipole kernel, doubled for the ground-plane image.
cd green_freespace(const Point3& rn, const Point3& rj, const WaveNumber& k);

CouplingMatrix interaction_matrix(const DmaGeometry& geom, const WaveNumber& k);

/// N x Nf matrix with [H_f]_{n,i} = (j beta / 4) H2_1(beta |r_n - p_i|) sin(psi_{n,i}).
Eigen::MatrixXcd excitation_matrix(const DmaGeometry& geom, const WaveNumber& k);

/// Builds W_RF at frequency f from the Lorentzian parameters and coupling G.
/// Throws SingularityError if (A^-1 - G) is numerically singular.
AnalogBeamformer analog_beamformer(const LorentzianParams& params, const CouplingMatrix& g,
                                   double frequency, double plate_height);

/// Everything about one panel that does not depend on the tunable alpha_0:
/// subcarrier frequencies, resonance frequencies and per-subcarrier G, H_f.
struct PanelPhysics {
  DmaGeometry geometry;
  std::vector<double> frequencies;
  Eigen::VectorXd resonance_freq;
  std::vector<CouplingMatrix> coupling;
  std::vector<Eigen::MatrixXcd> excitation;

  int element_count() const { return geometry.element_count(); }
  int feed_count() const { return geometry.feed_count(); }
  int subcarrier_count() const { return static_cast<int>(frequencies.size()); }

  /// With `coupled == false` every G is zero (the uncoupled design model).
  static PanelPhysics build(DmaGeometry geometry, std::vector<double> frequencies,
                            Eigen::VectorXd resonance_freq, bool coupled = true);

  PanelPhysics without_coupling() const;

  /// One W_RF per subcarrier for the given resonance strengths.
  std::vector<AnalogBeamformer> beamformers(const Eigen::VectorXd& alpha0) const;
};

}  // namespace ppwdma
