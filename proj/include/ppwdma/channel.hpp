// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

// Downlink channel synthesis: far-field steering from the dipole array,
// projection onto a thin-wire UE dipole, then pathloss, tapped-delay-line
// fading across subcarriers and relative-variance CSI errors.

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ppwdma/em_model.hpp"
#include "ppwdma/random.hpp"

namespace ppwdma {

/// UE location seen from one DMA centre, plus its dipole orientation and length.
struct UePose {
  double distance = 1.0;      // R_u [m]
  double theta = 0.0;         // elevation from +z [rad]
  double phi = 0.0;           // azimuth [rad]
  double orient_theta = 0.0;  // dipole polar angle
  double orient_phi = 0.0;    // dipole azimuth
  double length = 0.015;      // l_u [m]

  void validate() const;

  Eigen::Vector3d direction() const;    // s_hat
  Eigen::Vector3d theta_hat() const;
  Eigen::Vector3d phi_hat() const;
  Eigen::Vector3d orientation() const;  // d_hat

  /// Pose of a UE at `relative` (UE minus DMA centre).
  static UePose from_relative(const Eigen::Vector3d& relative, double orient_theta,
                              double orient_phi, double length);
};

struct SteeringPair {
  Eigen::VectorXcd theta;
  Eigen::VectorXcd phi;
};

/// Subcarrier-major container of per-(b, u, k) channel vectors.
class ChannelTensor {
 public:
  ChannelTensor() = default;
  ChannelTensor(int bs, int ues, int subcarriers, int elements);

  int bs_count() const { return bs_; }
  int ue_count() const { return ues_; }
  int subcarrier_count() const { return subcarriers_; }
  int element_count() const { return elements_; }

  Eigen::VectorXcd& at(int b, int u, int k) { return data_[index(b, u, k)]; }
  const Eigen::VectorXcd& at(int b, int u, int k) const { return data_[index(b, u, k)]; }

  bool all_finite() const;

 private:
  std::size_t index(int b, int u, int k) const {
    return (static_cast<std::size_t>(b) * ues_ + u) * subcarriers_ + k;
  }

  int bs_ = 0;
  int ues_ = 0;
  int subcarriers_ = 0;
  int elements_ = 0;
  std::vector<Eigen::VectorXcd> data_;
};

/// True channels and one CSI-corrupted copy of them.
struct ChannelSet {
  ChannelTensor true_channels;
  ChannelTensor noisy_channels;
};

struct FadingModel {
  int tap_count = 4;
  std::vector<double> tap_powers;       // sums to one
  double pathloss_ref = 1e-3;           // PL_0, linear
  double pathloss_exponent = 2.5;
  bool per_element = false;             // i.i.d. fading per element instead of one scalar per (b,u,k)

  /// Exponential power-delay profile, `decay_db` per tap, unit total power.
  static FadingModel exponential(int taps, double decay_db = 3.0);
  void validate() const;
};

struct CsiErrorModel {
  double delta = 0.2;  // error variance relative to |h|^2
};

/// Far-field theta/phi steering vectors of the dipole array toward `pose`.
SteeringPair steering_vectors(const DmaGeometry& geom, const UePose& pose, const WaveNumber& k);

/// Polarization-projected channel l_u (gamma_theta h_theta + gamma_phi h_phi).
Eigen::VectorXcd ue_channel(const Eigen::VectorXcd& h_theta, const Eigen::VectorXcd& h_phi,
                            const UePose& pose);

/// Replaces the 1/(2 pi R) spreading of `deterministic` (one vector per
/// subcarrier) by sqrt(PL_0 R^-exponent) and multiplies by the frequency
/// response of a random tapped delay line.
std::vector<Eigen::VectorXcd> augment_channel(const std::vector<Eigen::VectorXcd>& deterministic,
                                              double distance, const FadingModel& model,
                                              RandomStream& rng);

/// K-point frequency response of one tapped-delay-line draw.
std::vector<cd> fading_response(int subcarriers, const FadingModel& model, RandomStream& rng);

/// h + e with e_n ~ CN(0, delta |h_n|^2).
Eigen::VectorXcd corrupt_csi(const Eigen::VectorXcd& h, double delta, RandomStream& rng);

/// Everything one BS contributes on one subcarrier.
struct BsLink {
  std::vector<Eigen::VectorXcd> channels;   // h_{b,u}, one per UE
  Eigen::MatrixXcd w_rf;                    // N x N
  Eigen::MatrixXcd excitation;              // N x Nf
  std::vector<Eigen::VectorXcd> precoders;  // v_{b,u}, one per UE
};

/// y_u = sum_b sum_q h_{b,u}^H W_RF,b H_f,b v_{b,q} s_q + n_u for every UE.
Eigen::VectorXcd received_signal(const std::vector<BsLink>& links, const Eigen::VectorXcd& symbols,
                                 const Eigen::VectorXcd& noise);

}  // namespace ppwdma
