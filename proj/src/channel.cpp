// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppwdma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ppwdma/errors.hpp"

namespace ppwdma {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cd kJ{0.0, 1.0};
}  // namespace

void UePose::validate() const {
  if (!std::isfinite(distance) || distance <= 0.0) throw DomainError("UE distance must be positive");
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("UE elevation must lie in [0, pi]");
  if (!std::isfinite(length) || length <= 0.0) throw DomainError("UE dipole length must be positive");
}

Eigen::Vector3d UePose::direction() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Eigen::Vector3d UePose::theta_hat() const {
  return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
}

Eigen::Vector3d UePose::phi_hat() const { return {-std::sin(phi), std::cos(phi), 0.0}; }

Eigen::Vector3d UePose::orientation() const {
  return {std::sin(orient_theta) * std::cos(orient_phi), std::sin(orient_theta) * std::sin(orient_phi),
          std::cos(orient_theta)};
}

UePose UePose::from_relative(const Eigen::Vector3d& relative, double orient_theta,
                             double orient_phi, double length) {
  UePose pose;
  pose.distance = relative.norm();
  if (!(pose.distance > 0.0)) throw DomainError("UE coincides with the DMA centre");
  pose.theta = std::acos(std::clamp(relative.z() / pose.distance, -1.0, 1.0));
  pose.phi = std::atan2(relative.y(), relative.x());
  pose.orient_theta = orient_theta;
  pose.orient_phi = orient_phi;
  pose.length = length;
  return pose;
}

ChannelTensor::ChannelTensor(int bs, int ues, int subcarriers, int elements)
    : bs_(bs), ues_(ues), subcarriers_(subcarriers), elements_(elements),
      data_(static_cast<std::size_t>(bs) * ues * subcarriers, Eigen::VectorXcd::Zero(elements)) {}

bool ChannelTensor::all_finite() const {
  for (const auto& v : data_) {
    if (!v.allFinite()) return false;
  }
  return true;
}

FadingModel FadingModel::exponential(int taps, double decay_db) {
  if (taps < 1) throw DomainError("tap count must be at least one");
  FadingModel m;
  m.tap_count = taps;
  m.tap_powers.resize(taps);
  for (int l = 0; l < taps; ++l) m.tap_powers[l] = std::pow(10.0, -decay_db * l / 10.0);
  const double total = std::accumulate(m.tap_powers.begin(), m.tap_powers.end(), 0.0);
  for (auto& p : m.tap_powers) p /= total;
  return m;
}

void FadingModel::validate() const {
  if (tap_count < 1 || static_cast<int>(tap_powers.size()) != tap_count) {
    throw DomainError("fading tap profile does not match tap count");
  }
  const double total = std::accumulate(tap_powers.begin(), tap_powers.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("fading tap powers must sum to one");
  if (!(pathloss_exponent > 0.0)) throw DomainError("pathloss exponent must be positive");
  if (!(pathloss_ref > 0.0)) throw DomainError("pathloss reference must be positive");
}

SteeringPair steering_vectors(const DmaGeometry& geom, const UePose& pose, const WaveNumber& k) {
  pose.validate();
  const double beta = k.k;
  const double amp = kFreeSpaceImpedance * beta * beta / (2.0 * kPi * pose.distance);
  const cd common = amp * std::exp(-kJ * (beta * pose.distance));
  const Eigen::Vector3d s = pose.direction();
  const double sin_phi = std::sin(pose.phi);
  const double cos_phi_cos_theta = std::cos(pose.phi) * std::cos(pose.theta);

  const int n = geom.element_count();
  SteeringPair out{Eigen::VectorXcd(n), Eigen::VectorXcd(n)};
  for (int i = 0; i < n; ++i) {
    const auto& r = geom.elements[i];
    const cd entry = common * std::exp(kJ * (beta * (s.x() * r.x + s.y() * r.y + s.z() * r.z)));
    out.theta[i] = entry * sin_phi;
    out.phi[i] = entry * cos_phi_cos_theta;
  }
  return out;
}

Eigen::VectorXcd ue_channel(const Eigen::VectorXcd& h_theta, const Eigen::VectorXcd& h_phi,
                            const UePose& pose) {
  pose.validate();
  if (h_theta.size() != h_phi.size()) throw ContractError("steering vectors differ in length");
  const Eigen::Vector3d d = pose.orientation();
  const double gamma_theta = d.dot(pose.theta_hat());
  const double gamma_phi = d.dot(pose.phi_hat());
  return pose.length * (gamma_theta * h_theta + gamma_phi * h_phi);
}

std::vector<cd> fading_response(int subcarriers, const FadingModel& model, RandomStream& rng) {
  std::vector<cd> taps(model.tap_count);
  for (int l = 0; l < model.tap_count; ++l) taps[l] = complex_gaussian(rng, model.tap_powers[l]);
  std::vector<cd> g(subcarriers, cd{0.0, 0.0});
  for (int k = 0; k < subcarriers; ++k) {
    for (int l = 0; l < model.tap_count; ++l) {
      g[k] += taps[l] * std::exp(-kJ * (2.0 * kPi * l * k / subcarriers));
    }
  }
  return g;
}

std::vector<Eigen::VectorXcd> augment_channel(const std::vector<Eigen::VectorXcd>& deterministic,
                                              double distance, const FadingModel& model,
                                              RandomStream& rng) {
  if (!std::isfinite(distance) || distance <= 0.0) throw DomainError("BS-UE distance must be positive");
  model.validate();
  const int subcarriers = static_cast<int>(deterministic.size());
  const double gain = std::sqrt(model.pathloss_ref * std::pow(distance, -model.pathloss_exponent));
  const double spreading = 2.0 * kPi * distance;

  std::vector<Eigen::VectorXcd> out(deterministic.size());
  if (!model.per_element) {
    const auto g = fading_response(subcarriers, model, rng);
    for (int k = 0; k < subcarriers; ++k) out[k] = (gain * spreading * g[k]) * deterministic[k];
    return out;
  }

  const Eigen::Index n = subcarriers > 0 ? deterministic.front().size() : 0;
  for (int k = 0; k < subcarriers; ++k) out[k] = gain * spreading * deterministic[k];
  for (Eigen::Index e = 0; e < n; ++e) {
    const auto g = fading_response(subcarriers, model, rng);
    for (int k = 0; k < subcarriers; ++k) out[k][e] *= g[k];
  }
  return out;
}

Eigen::VectorXcd corrupt_csi(const Eigen::VectorXcd& h, double delta, RandomStream& rng) {
  if (!(delta >= 0.0)) throw DomainError("CSI error variance must be non-negative");
  Eigen::VectorXcd out = h;
  for (Eigen::Index n = 0; n < h.size(); ++n) {
    out[n] += complex_gaussian(rng, delta * std::norm(h[n]));
  }
  return out;
}

Eigen::VectorXcd received_signal(const std::vector<BsLink>& links, const Eigen::VectorXcd& symbols,
                                 const Eigen::VectorXcd& noise) {
  const Eigen::Index ues = symbols.size();
  if (noise.size() != ues) throw ContractError("noise and symbol vectors differ in length");

  Eigen::VectorXcd y = noise;
  for (const auto& link : links) {
    if (static_cast<Eigen::Index>(link.channels.size()) != ues ||
        static_cast<Eigen::Index>(link.precoders.size()) != ues) {
      throw ContractError("per-BS channel/precoder count does not match UE count");
    }
    const auto n = link.w_rf.rows();
    if (link.w_rf.cols() != n || link.excitation.rows() != n) {
      throw ContractError("W_RF and H_f shapes disagree");
    }
    // x_b = W_RF H_f V s
    Eigen::VectorXcd feed_currents = Eigen::VectorXcd::Zero(link.excitation.cols());
    for (Eigen::Index q = 0; q < ues; ++q) {
      if (link.precoders[q].size() != link.excitation.cols()) {
        throw ContractError("precoder length does not match feed count");
      }
      feed_currents += link.precoders[q] * symbols[q];
    }
    const Eigen::VectorXcd moments = link.w_rf * (link.excitation * feed_currents);
    for (Eigen::Index u = 0; u < ues; ++u) {
      if (link.channels[u].size() != n) throw ContractError("channel length does not match N");
      y[u] += link.channels[u].dot(moments);  // conjugates the channel
    }
  }
  return y;
}

}  // namespace ppwdma
