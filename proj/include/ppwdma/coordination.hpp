// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

// In-process message bus for the multi-BS optimizer. Each BS only broadcasts
// its U^2 K coupling scalars h_eff_{b,q}^H v_{b,u}; every receiver rebuilds
// the global SINR terms from them and solves its own blocks.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ppwdma/optimizer.hpp"

namespace ppwdma {

inline constexpr std::int64_t kBytesPerScalar = 16;  // complex<double>

enum class Topology {
  kStar,      // BS -> coordinator -> every other BS
  kAllToAll,  // BS -> every other BS
};

struct ControlMessage {
  int sender = 0;
  int iteration = 0;
  std::vector<cd> payload;               // c_{b,q,u,k}, ordered (q, u, k)
  std::optional<double> objective_share;  // H_b before this iteration's update

  /// Throws ProtocolError unless the payload has U^2 K finite entries.
  void validate(int ues, int subcarriers) const;
};

struct RoundRecord {
  int iteration = 0;
  std::int64_t messages = 0;
  std::int64_t scalars = 0;
  std::int64_t bytes = 0;
  std::int64_t link_transfers = 0;  // point-to-point deliveries incl. relays
};

class ExchangeLog {
 public:
  explicit ExchangeLog(Topology topology = Topology::kStar) : topology_(topology) {}

  void record(int iteration, const std::vector<ControlMessage>& messages, int bs_count);

  Topology topology() const { return topology_; }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::int64_t total_messages() const;
  std::int64_t total_scalars() const;
  std::int64_t total_bytes() const;
  std::int64_t total_link_transfers() const;

 private:
  Topology topology_;
  std::vector<RoundRecord> rounds_;
};

/// One message per BS carrying its local scalars for iteration t. `states`
/// must hold BS indices 0..B-1 in order, else ProtocolError.
std::vector<ControlMessage> broadcast_round(const std::vector<BsState>& states,
                                            const std::vector<EffectiveChannels>& effective,
                                            int iteration, ExchangeLog& log);

/// Rebuilds the global rate terms from one message per BS. Throws
/// ProtocolError on a missing or duplicate sender or a stale iteration tag.
RateTerms assemble_globals(const std::vector<ControlMessage>& messages, int iteration, int ues,
                           int subcarriers, double noise_var);

struct DistributedOutcome {
  std::vector<IterationReport> trajectory;
  bool converged = false;
};

/// Runs every BS as an agent that only sees its own channel rows and the
/// broadcast scalars. Produces the same iterates as CentralizedOptimizer.
class DistributedOptimizer {
 public:
  DistributedOptimizer(std::vector<BsState> agents, OptimizerConfig config,
                       Topology topology = Topology::kStar);

  /// One synchronous iteration on channel sample `xi`.
  IterationReport run_iteration(const ChannelTensor& xi);

  /// Iterates until |H^t - H^{t-1}| < tolerance or max_iters.
  DistributedOutcome run_until_converged(const ChannelSampler& sampler);

  const std::vector<BsState>& states() const { return agents_; }
  const ExchangeLog& log() const { return log_; }
  int iteration() const { return t_; }

 private:
  std::vector<BsState> agents_;
  OptimizerConfig config_;
  ExchangeLog log_;
  int t_ = 0;
  double last_objective_ = 0.0;
  bool converged_ = false;
};

}  // namespace ppwdma
