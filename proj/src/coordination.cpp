// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppwdma/coordination.hpp"

#include <cmath>
#include <string>

#include "ppwdma/errors.hpp"

namespace ppwdma {

void ControlMessage::validate(int ues, int subcarriers) const {
  const std::size_t expected = static_cast<std::size_t>(ues) * ues * subcarriers;
  if (payload.size() != expected) {
    throw ProtocolError("BS " + std::to_string(sender) + " sent " +
                        std::to_string(payload.size()) + " scalars, expected " +
                        std::to_string(expected));
  }
  for (const auto& c : payload) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw ProtocolError("BS " + std::to_string(sender) + " sent a non-finite scalar");
    }
  }
}

void ExchangeLog::record(int iteration, const std::vector<ControlMessage>& messages, int bs_count) {
  RoundRecord r;
  r.iteration = iteration;
  r.messages = static_cast<std::int64_t>(messages.size());
  for (const auto& m : messages) r.scalars += static_cast<std::int64_t>(m.payload.size());
  r.bytes = r.scalars * kBytesPerScalar;
  const std::int64_t others = bs_count - 1;
  r.link_transfers = topology_ == Topology::kStar ? r.messages * (1 + others) : r.messages * others;
  rounds_.push_back(r);
}

std::int64_t ExchangeLog::total_messages() const {
  std::int64_t n = 0;
  for (const auto& r : rounds_) n += r.messages;
  return n;
}

std::int64_t ExchangeLog::total_scalars() const {
  std::int64_t n = 0;
  for (const auto& r : rounds_) n += r.scalars;
  return n;
}

std::int64_t ExchangeLog::total_bytes() const {
  std::int64_t n = 0;
  for (const auto& r : rounds_) n += r.bytes;
  return n;
}

std::int64_t ExchangeLog::total_link_transfers() const {
  std::int64_t n = 0;
  for (const auto& r : rounds_) n += r.link_transfers;
  return n;
}

std::vector<ControlMessage> broadcast_round(const std::vector<BsState>& states,
                                            const std::vector<EffectiveChannels>& effective,
                                            int iteration, ExchangeLog& log) {
  if (states.empty()) throw ProtocolError("no BS joined the round");
  if (effective.size() != states.size()) throw ProtocolError("missing effective channels for a BS");
  std::vector<ControlMessage> messages;
  messages.reserve(states.size());
  for (std::size_t b = 0; b < states.size(); ++b) {
    if (states[b].index != static_cast<int>(b)) {
      throw ProtocolError("BS " + std::to_string(b) + " missing from the round");
    }
    if (states[b].surrogate.iteration != iteration) {
      throw ProtocolError("BS " + std::to_string(b) + " is not at iteration " +
                          std::to_string(iteration));
    }
    ControlMessage m;
    m.sender = static_cast<int>(b);
    m.iteration = iteration;
    m.payload = local_contributions(effective[b], states[b].vars);
    m.objective_share = states[b].surrogate.objective;
    messages.push_back(std::move(m));
  }
  log.record(iteration, messages, static_cast<int>(states.size()));
  return messages;
}

RateTerms assemble_globals(const std::vector<ControlMessage>& messages, int iteration, int ues,
                           int subcarriers, double noise_var) {
  const std::size_t bs = messages.size();
  if (bs == 0) throw ProtocolError("no messages to assemble");
  std::vector<const ControlMessage*> by_sender(bs, nullptr);
  for (const auto& m : messages) {
    if (m.iteration != iteration) {
      throw ProtocolError("message from BS " + std::to_string(m.sender) + " tagged t=" +
                          std::to_string(m.iteration) + ", expected t=" + std::to_string(iteration));
    }
    if (m.sender < 0 || static_cast<std::size_t>(m.sender) >= bs || by_sender[m.sender]) {
      throw ProtocolError("missing or duplicate sender in round");
    }
    m.validate(ues, subcarriers);
    by_sender[m.sender] = &m;
  }
  std::vector<std::vector<cd>> blocks;
  blocks.reserve(bs);
  for (const auto* m : by_sender) blocks.push_back(m->payload);
  return assemble_rate_terms(blocks, ues, subcarriers, noise_var);
}

DistributedOptimizer::DistributedOptimizer(std::vector<BsState> agents, OptimizerConfig config,
                                           Topology topology)
    : agents_(std::move(agents)), config_(config), log_(topology) {
  if (agents_.empty()) throw ContractError("at least one BS is required");
  for (std::size_t b = 0; b < agents_.size(); ++b) {
    if (agents_[b].index != static_cast<int>(b) || !agents_[b].physics) {
      throw ContractError("BS agents must be ordered by index and carry physics");
    }
  }
}

IterationReport DistributedOptimizer::run_iteration(const ChannelTensor& xi) {
  const int bs_count = static_cast<int>(agents_.size());
  const int ues = agents_.front().vars.ues;
  const int subcarriers = agents_.front().vars.subcarriers;
  for (auto& a : agents_) a.surrogate.begin_iteration(t_, config_.schedule);

  // Local: each BS forms its effective channels from its own rows of xi.
  std::vector<EffectiveChannels> eff;
  eff.reserve(agents_.size());
  for (const auto& a : agents_) {
    eff.push_back(effective_channels(xi, a.index, a.beamformers, *a.physics));
  }

  const auto messages = broadcast_round(agents_, eff, t_, log_);

  // Every agent assembles its own copy; all copies are identical.
  std::vector<RateTerms> views;
  views.reserve(agents_.size());
  for (std::size_t b = 0; b < agents_.size(); ++b) {
    views.push_back(assemble_globals(messages, t_, ues, subcarriers, config_.noise_var));
  }

  IterationReport report;
  report.iteration = t_;
  report.sampled_rate = views.front().sum_rate;
  report.rho = agents_.front().surrogate.rho;
  report.gamma = agents_.front().surrogate.gamma;

  if (config_.blocks == BlockSchedule::kJacobi) {
    std::vector<std::vector<Eigen::VectorXcd>> gv;
    std::vector<Eigen::VectorXd> ga;
    for (const auto& a : agents_) {
      gv.push_back(local_precoder_gradients(a, views[a.index], eff[a.index]));
      ga.push_back(grad_alpha(views[a.index], xi, a.vars, a.beamformers, *a.physics, a.index,
                              config_.jacobian));
    }
    for (auto& a : agents_) {
      report.multipliers.push_back(apply_precoder_step(a, gv[a.index], config_));
      apply_alpha_step(a, ga[a.index]);
    }
  } else {
    for (auto& a : agents_) {
      report.multipliers.push_back(
          apply_precoder_step(a, local_precoder_gradients(a, views[a.index], eff[a.index]), config_));
    }
    // Second round so the alpha_0 step sees the refreshed precoders.
    const auto refresh = broadcast_round(agents_, eff, t_, log_);
    for (auto& a : agents_) {
      const RateTerms view = assemble_globals(refresh, t_, ues, subcarriers, config_.noise_var);
      apply_alpha_step(a, grad_alpha(view, xi, a.vars, a.beamformers, *a.physics, a.index,
                                     config_.jacobian));
    }
  }

  double objective = 0.0;
  for (auto& a : agents_) {
    update_objective(a.surrogate, views[a.index].sum_rate, bs_count);
    objective += a.surrogate.objective;
    a.refresh_beamformers();
  }
  report.objective = objective;
  ++t_;
  return report;
}

DistributedOutcome DistributedOptimizer::run_until_converged(const ChannelSampler& sampler) {
  DistributedOutcome out;
  while (!converged_ && t_ < config_.max_iters) {
    const auto report = run_iteration(sampler(t_));
    out.trajectory.push_back(report);
    converged_ = std::abs(report.objective - last_objective_) < config_.tolerance;
    last_objective_ = report.objective;
  }
  out.converged = converged_;
  return out;
}

}  // namespace ppwdma
