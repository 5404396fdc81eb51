// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

// Random problem instances and brute-force oracles shared by the unit and
// acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ppwdma/harness.hpp"
#include "ppwdma/optimizer.hpp"
#include "ppwdma/random.hpp"

namespace ppwdma::testing {

struct GradientInstance {
  World world;
  ChannelTensor xi;
  std::vector<BsVariables> vars;
  std::vector<std::vector<AnalogBeamformer>> beamformers;
  std::vector<EffectiveChannels> effective;
  RateTerms terms;
  double noise_var = 0.0;
};

inline std::vector<const PanelPhysics*> physics_of(const World& w) {
  return std::vector<const PanelPhysics*>(w.config.bs_count, w.coupled.get());
}

/// Random precoders (P/2 per BS) and alpha_0 on a freshly built world.
inline GradientInstance random_instance(const ScenarioConfig& cfg, std::uint64_t seed,
                                        double pmax_dbm) {
  GradientInstance g;
  g.world = build_scenario(cfg, seed, 0);
  g.xi = sample_csi(g.world, 0);
  g.noise_var = cfg.noise_variance();
  auto rng = make_stream(seed, {0xfeedULL});
  const double p = dbm_to_watts(pmax_dbm);
  for (int b = 0; b < cfg.bs_count; ++b) {
    Eigen::VectorXd alpha(cfg.elements);
    for (auto& a : alpha) a = uniform(rng, 1e-3, 1e-1);
    BsVariables v(cfg.ue_count, cfg.subcarriers, cfg.feeds, alpha);
    for (auto& x : v.precoders) {
      for (auto& e : x) e = complex_gaussian(rng, 1.0);
    }
    const double scale = std::sqrt(0.5 * p / v.power());
    for (auto& x : v.precoders) x *= scale;
    g.beamformers.push_back(g.world.coupled->beamformers(alpha));
    g.effective.push_back(effective_channels(g.xi, b, g.beamformers.back(), *g.world.coupled));
    g.vars.push_back(std::move(v));
  }
  g.terms = rate_terms(g.effective, g.vars, g.noise_var);
  return g;
}

/// Sum rate with W_RF rebuilt from the alpha_0 in `vars`.
inline double rate_with_alpha(const GradientInstance& g, const std::vector<BsVariables>& vars) {
  std::vector<std::vector<AnalogBeamformer>> bfs;
  for (const auto& v : vars) bfs.push_back(g.world.coupled->beamformers(v.alpha0));
  return rate_terms(g.xi, vars, bfs, physics_of(g.world), g.noise_var).sum_rate;
}

/// Sum rate for new precoders with the instance's W_RF held fixed.
inline double rate_with_precoders(const GradientInstance& g, const std::vector<BsVariables>& vars) {
  return rate_terms(g.effective, vars, g.noise_var).sum_rate;
}

/// ||analytic - central FD|| / ||central FD|| over every precoder entry of BS b.
inline double precoder_fd_error(const GradientInstance& g, int b) {
  const auto& v = g.vars[b];
  double rms = std::sqrt(v.power() / (v.precoders.size() * v.precoders.front().size()));
  const double h = 1e-6 * rms;
  double num = 0.0;
  double den = 0.0;
  for (int u = 0; u < v.ues; ++u) {
    for (int k = 0; k < v.subcarriers; ++k) {
      const Eigen::VectorXcd analytic = grad_precoder(g.terms, g.effective[b], b, u, k);
      for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        cd fd;
        for (const cd dir : {cd{1.0, 0.0}, cd{0.0, 1.0}}) {
          auto plus = g.vars;
          auto minus = g.vars;
          plus[b].precoder(u, k)[i] += h * dir;
          minus[b].precoder(u, k)[i] -= h * dir;
          const double d = (rate_with_precoders(g, plus) - rate_with_precoders(g, minus)) / (2 * h);
          fd += d * dir;
        }
        num += std::norm(analytic[i] - fd);
        den += std::norm(fd);
      }
    }
  }
  return std::sqrt(num / den);
}

/// Same for alpha_0 of BS b (W_RF rebuilt at every probe). The step is
/// 1e-3 |alpha|: smaller steps amplify round-off from the W_RF solves.
inline double alpha_fd_error(const GradientInstance& g, int b, JacobianMode mode = JacobianMode::kDerived) {
  const Eigen::VectorXd analytic =
      grad_alpha(g.terms, g.xi, g.vars[b], g.beamformers[b], *g.world.coupled, b, mode);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index l = 0; l < analytic.size(); ++l) {
    const double h = 1e-3 * std::abs(g.vars[b].alpha0[l]);
    auto plus = g.vars;
    auto minus = g.vars;
    plus[b].alpha0[l] += h;
    minus[b].alpha0[l] -= h;
    const double fd = (rate_with_alpha(g, plus) - rate_with_alpha(g, minus)) / (2 * h);
    num += (analytic[l] - fd) * (analytic[l] - fd);
    den += fd * fd;
  }
  return std::sqrt(num / den);
}

inline double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

/// Random point of the power ball near `center`: gaussian step of relative
/// size `scale`, pulled back onto the sphere if it leaves the ball.
inline std::vector<Eigen::VectorXcd> feasible_perturbation(const std::vector<Eigen::VectorXcd>& center,
                                                           double p_max, double scale,
                                                           RandomStream& rng) {
  double norm2 = 0.0;
  for (const auto& x : center) norm2 += x.squaredNorm();
  const double step = scale * std::sqrt(std::max(norm2, p_max * 1e-6) / (center.size() * center.front().size()));
  auto out = center;
  double p = 0.0;
  for (auto& x : out) {
    for (auto& e : x) e += step * complex_gaussian(rng, 1.0);
    p += x.squaredNorm();
  }
  if (p > p_max) {
    const double s = std::sqrt(p_max / p);
    for (auto& x : out) x *= s;
  }
  return out;
}

}  // namespace ppwdma::testing
