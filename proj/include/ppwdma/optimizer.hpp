// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

// Per-BS stochastic successive concave approximation (SSCA) for the hybrid
// beamformer. Every BS keeps a strongly concave surrogate of the expected
// sum rate over its own block x_b = (precoders v_{b,u}[k], alpha_0,b):
//
//   precoders   v_bar = (rho grad + (1 - rho) f + tau v) / (tau + 2 lambda)
//   resonances  a_bar = a + (rho grad + (1 - rho) f) / tau
//
// with lambda >= 0 found by bisection on the per-BS power budget, gradient
// accumulators f and diminishing steps rho^t, gamma^t.
//
// Index conventions: q is always the receiving UE and u the transmitted
// stream, so c_{b,q,u,k} = h_eff_{b,q}[k]^H v_{b,u}[k] is BS b's share of what
// UE q sees of stream u on subcarrier k.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ppwdma/channel.hpp"
#include "ppwdma/em_model.hpp"

namespace ppwdma {

enum class JacobianMode {
  /// d/d alpha_0 of conj(1/alpha) = -(f0^2 - f^2) / (alpha_0^2 f0^2), finite-difference validated.
  kDerived,
  /// -(f0^2 + f^2) / (alpha_0 f0)^2 as printed in the reference derivation.
  kLiteral,
};

enum class BlockSchedule {
  kJacobi,       // both blocks solved from the same x^t
  kGaussSeidel,  // precoders first, then alpha_0 against the refreshed rate terms
};

struct StepSchedule {
  double rho_exponent = 0.60;
  double gamma_exponent = 0.61;
};

struct StepSizes {
  double rho;
  double gamma;
};

/// rho^0 = 1; otherwise rho^t = (t+2)^-rho_exponent, gamma^t = (t+2)^-gamma_exponent.
StepSizes step_sizes(int t, const StepSchedule& schedule = {});

/// Design block of one BS.
struct BsVariables {
  int ues = 0;
  int subcarriers = 0;
  std::vector<Eigen::VectorXcd> precoders;  // index u * subcarriers + k, each of length Nf
  Eigen::VectorXd alpha0;

  BsVariables() = default;
  BsVariables(int ue_count, int subcarrier_count, int feed_count, Eigen::VectorXd alpha);

  Eigen::VectorXcd& precoder(int u, int k) { return precoders[static_cast<std::size_t>(u) * subcarriers + k]; }
  const Eigen::VectorXcd& precoder(int u, int k) const {
    return precoders[static_cast<std::size_t>(u) * subcarriers + k];
  }

  /// sum_{u,k} ||v_{b,u}[k]||^2
  double power() const;
};

/// Effective channels h_eff_{b,u}[k] = H_f^H W_RF^H h_{b,u}[k] of one BS (index u * K + k).
using EffectiveChannels = std::vector<Eigen::VectorXcd>;

EffectiveChannels effective_channels(const ChannelTensor& xi, int b,
                                     const std::vector<AnalogBeamformer>& beamformers,
                                     const PanelPhysics& physics);

/// h_eff^H v, the scalar every exchanged quantity is built from.
inline cd coupling_scalar(const Eigen::VectorXcd& effective, const Eigen::VectorXcd& precoder) {
  return effective.dot(precoder);
}

/// The U^2 K scalars c_{b,q,u,k} of one BS, ordered (q, u, k).
std::vector<cd> local_contributions(const EffectiveChannels& effective, const BsVariables& vars);

/// Global SINR bookkeeping for one channel sample.
struct RateTerms {
  int bs = 0;
  int ues = 0;
  int subcarriers = 0;
  double noise_var = 0.0;
  std::vector<cd> contributions;  // c_{b,q,u,k}, ((b * U + q) * U + u) * K + k
  std::vector<cd> totals;         // sum_b c_{b,q,u,k}, (q * U + u) * K + k
  std::vector<double> signal;     // F_{u,k}
  std::vector<double> mui;        // MUI_{u,k} (includes the noise)
  std::vector<double> sinr;       // SINR_{u,k}
  double sum_rate = 0.0;          // (1/K) sum log2(1 + SINR)

  cd contribution(int b, int q, int u, int k) const {
    return contributions[((static_cast<std::size_t>(b) * ues + q) * ues + u) * subcarriers + k];
  }
  cd total(int q, int u, int k) const {
    return totals[(static_cast<std::size_t>(q) * ues + u) * subcarriers + k];
  }
  /// r_{q,u,k} seen from BS b: sum over b' != b of c_{b',q,u,k}.
  cd residual(int b, int q, int u, int k) const;

  double signal_at(int u, int k) const { return signal[static_cast<std::size_t>(u) * subcarriers + k]; }
  double mui_at(int u, int k) const { return mui[static_cast<std::size_t>(u) * subcarriers + k]; }
  double sinr_at(int u, int k) const { return sinr[static_cast<std::size_t>(u) * subcarriers + k]; }
};

/// Builds RateTerms from per-BS contribution blocks (each ordered as in
/// local_contributions). Used identically by the centralized path and by
/// every BS after a broadcast round.
RateTerms assemble_rate_terms(const std::vector<std::vector<cd>>& per_bs_contributions, int ues,
                              int subcarriers, double noise_var);

/// Centralized evaluation from the effective channels of all BSs.
RateTerms rate_terms(const std::vector<EffectiveChannels>& effective,
                     const std::vector<BsVariables>& vars, double noise_var);

/// Centralized evaluation from raw channels, W_RF and H_f.
RateTerms rate_terms(const ChannelTensor& xi, const std::vector<BsVariables>& vars,
                     const std::vector<std::vector<AnalogBeamformer>>& beamformers,
                     const std::vector<const PanelPhysics*>& physics, double noise_var);

/// Gradient of the sum rate w.r.t. v_{b,u}[k], as d/dRe + j d/dIm.
Eigen::VectorXcd grad_precoder(const RateTerms& terms, const EffectiveChannels& effective, int b,
                               int u, int k);

/// Sparse N^2 x N Jacobian of vec(conj(A^-1)) w.r.t. alpha_0; nonzeros at rows l*N + l.
Eigen::SparseMatrix<double> jacobian_alpha(const Eigen::VectorXd& alpha0,
                                           const Eigen::VectorXd& resonance_freq, double frequency,
                                           JacobianMode mode = JacobianMode::kDerived);

/// Intermediate matrices of the alpha_0 gradient on one subcarrier.
struct GradientWorkspace {
  std::vector<Eigen::MatrixXcd> f_matrix;  // F_{u,k}
  std::vector<Eigen::MatrixXcd> m1;        // M^1_{u,k}
  std::vector<Eigen::MatrixXcd> m2;        // M^2_{u,k}
  std::vector<Eigen::MatrixXcd> u_matrix;  // U_{u,k}
  Eigen::MatrixXcd u_tilde;                // U~_k
  Eigen::SparseMatrix<double> jacobian;    // J_{alpha_0,b,k}
};

/// Builds U~_k for BS b on subcarrier k (fills `ws` when given).
Eigen::MatrixXcd u_tilde(const RateTerms& terms, const ChannelTensor& xi,
                         const BsVariables& vars, const Eigen::MatrixXcd& excitation, int b,
                         int k, GradientWorkspace* ws = nullptr);

/// Gradient of the sum rate w.r.t. alpha_0,b:
/// -(2 / (K ln 2)) sum_k J_k^T Re{vec(W_k^H U~_k W_k^H)}.
Eigen::VectorXd grad_alpha(const RateTerms& terms, const ChannelTensor& xi, const BsVariables& vars,
                           const std::vector<AnalogBeamformer>& beamformers,
                           const PanelPhysics& physics, int b,
                           JacobianMode mode = JacobianMode::kDerived);

/// Per-BS surrogate bookkeeping between iterations.
struct SurrogateState {
  int iteration = 0;
  double rho = 1.0;
  double gamma = 1.0;
  double tau = 1e-2;
  double tolerance = 1e-3;
  std::vector<Eigen::VectorXcd> accum_precoder;  // f_{0,v,b}, index u * K + k
  Eigen::VectorXd accum_alpha;                   // f_{0,alpha,b}
  double objective = 0.0;                        // H_{0,b}

  /// Zero accumulators and objective (the t = -1 state).
  static SurrogateState initial(int ues, int subcarriers, int feeds, int elements, double tau,
                                double tolerance);

  /// Sets t and the step sizes for the coming iteration.
  void begin_iteration(int t, const StepSchedule& schedule = {});
};

struct PrecoderSolution {
  std::vector<Eigen::VectorXcd> precoders;
  double multiplier = 0.0;
};

/// Maximizes the precoder surrogate under sum ||v||^2 <= p_max.
PrecoderSolution solve_precoder(const SurrogateState& state,
                                const std::vector<Eigen::VectorXcd>& gradients,
                                const std::vector<Eigen::VectorXcd>& current, double p_max);

/// Closed-form alpha_0 surrogate maximizer, clamped sign-preservingly to |alpha| >= kAlphaMin.
Eigen::VectorXd solve_alpha(const SurrogateState& state, const Eigen::VectorXd& gradient,
                            const Eigen::VectorXd& current);

/// Surrogate value of a candidate precoder block (terms independent of v dropped).
double precoder_surrogate(const SurrogateState& state, const std::vector<Eigen::VectorXcd>& gradients,
                          const std::vector<Eigen::VectorXcd>& current,
                          const std::vector<Eigen::VectorXcd>& candidate);

double alpha_surrogate(const SurrogateState& state, const Eigen::VectorXd& gradient,
                       const Eigen::VectorXd& current, const Eigen::VectorXd& candidate);

/// f^t = (1 - rho) f^{t-1} + rho grad for the precoder block.
void update_precoder_accumulator(SurrogateState& state, const std::vector<Eigen::VectorXcd>& gradients);
/// f^t = (1 - rho) f^{t-1} + rho grad for the alpha_0 block.
void update_alpha_accumulator(SurrogateState& state, const Eigen::VectorXd& gradient);
/// H^t = ((1 - rho) H^{t-1} + rho R) / B.
void update_objective(SurrogateState& state, double sampled_rate, int bs_count);

/// Both accumulators and the objective recursion in one call.
SurrogateState update_surrogate(const SurrogateState& state,
                                const std::vector<Eigen::VectorXcd>& precoder_gradients,
                                const Eigen::VectorXd& alpha_gradient, double sampled_rate,
                                int bs_count);

/// (1 - gamma) x + gamma x_bar per block. Throws NumericalError if the blended
/// precoders leave the power ball (impossible for feasible endpoints).
BsVariables blend_variables(const BsVariables& current, const BsVariables& target, double gamma,
                            double p_max);

struct OptimizerConfig {
  double tau = 1e-2;
  double tolerance = 1e-3;
  int max_iters = 500;
  double p_max = 1e-3;      // W, per BS
  double noise_var = 0.0;   // W
  StepSchedule schedule;
  JacobianMode jacobian = JacobianMode::kDerived;
  BlockSchedule blocks = BlockSchedule::kJacobi;
};

/// Everything BS b owns while optimizing.
struct BsState {
  int index = 0;
  std::shared_ptr<const PanelPhysics> physics;  // design model (G may be zero)
  BsVariables vars;
  std::vector<AnalogBeamformer> beamformers;
  SurrogateState surrogate;

  void refresh_beamformers() { beamformers = physics->beamformers(vars.alpha0); }
};

/// Outcome of one SSCA iteration.
struct IterationReport {
  int iteration = 0;
  double sampled_rate = 0.0;  // R(x^t, xi^t)
  double objective = 0.0;     // sum_b H_{0,b}^t
  double rho = 0.0;
  double gamma = 0.0;
  std::vector<double> multipliers;  // lambda_b
};

std::vector<Eigen::VectorXcd> local_precoder_gradients(const BsState& bs, const RateTerms& terms,
                                                       const EffectiveChannels& effective);

/// Precoder solve, accumulator update and blend for one BS. Returns lambda_b.
double apply_precoder_step(BsState& bs, const std::vector<Eigen::VectorXcd>& gradients,
                           const OptimizerConfig& config);

/// alpha_0 solve, accumulator update and blend for one BS.
void apply_alpha_step(BsState& bs, const Eigen::VectorXd& gradient);

/// Matched-filter initial precoders normalized to p_max / 2 in total.
BsVariables initial_variables(const EffectiveChannels& effective, int ues, int subcarriers,
                              Eigen::VectorXd alpha0, double p_max);

using ChannelSampler = std::function<ChannelTensor(int t)>;

/// Reference implementation that evaluates every formula from global data.
/// The distributed pipeline in coordination.hpp must reproduce it bit for bit.
class CentralizedOptimizer {
 public:
  CentralizedOptimizer(std::vector<BsState> states, OptimizerConfig config);

  IterationReport step(const ChannelTensor& xi);

  /// Iterates until |H^t - H^{t-1}| < tolerance or max_iters.
  std::vector<IterationReport> run(const ChannelSampler& sampler);

  const std::vector<BsState>& states() const { return states_; }
  int iteration() const { return t_; }
  bool converged() const { return converged_; }

 private:
  std::vector<BsState> states_;
  OptimizerConfig config_;
  int t_ = 0;
  double last_objective_ = 0.0;
  bool converged_ = false;
};

}  // namespace ppwdma
