// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppwdma/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "ppwdma/errors.hpp"

namespace ppwdma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double clamp_alpha(double a) {
  if (std::abs(a) >= kAlphaMin) return a;
  return a < 0.0 ? -kAlphaMin : kAlphaMin;
}

// SINR, MUI, F and the sum rate from the totals.
void finalize_terms(RateTerms& t) {
  const int U = t.ues;
  const int K = t.subcarriers;
  t.signal.assign(static_cast<std::size_t>(U) * K, 0.0);
  t.mui.assign(static_cast<std::size_t>(U) * K, 0.0);
  t.sinr.assign(static_cast<std::size_t>(U) * K, 0.0);
  double rate = 0.0;
  for (int u = 0; u < U; ++u) {
    for (int k = 0; k < K; ++k) {
      double interference = 0.0;
      for (int q = 0; q < U; ++q) {
        if (q != u) interference += std::norm(t.total(u, q, k));
      }
      const std::size_t i = static_cast<std::size_t>(u) * K + k;
      t.signal[i] = std::norm(t.total(u, u, k));
      t.mui[i] = interference + t.noise_var;
      t.sinr[i] = t.signal[i] / t.mui[i];
      rate += std::log2(1.0 + t.sinr[i]);
    }
  }
  t.sum_rate = rate / K;
}

std::vector<Eigen::VectorXcd> blend_precoders(const std::vector<Eigen::VectorXcd>& current,
                                              const std::vector<Eigen::VectorXcd>& target,
                                              double gamma) {
  if (current.size() != target.size()) throw ContractError("precoder blocks differ in size");
  std::vector<Eigen::VectorXcd> out(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) {
    out[i] = (1.0 - gamma) * current[i] + gamma * target[i];
  }
  return out;
}

Eigen::VectorXd blend_alpha(const Eigen::VectorXd& current, const Eigen::VectorXd& target,
                            double gamma) {
  if (current.size() != target.size()) throw ContractError("alpha blocks differ in size");
  Eigen::VectorXd out = (1.0 - gamma) * current + gamma * target;
  for (auto& a : out) a = clamp_alpha(a);
  return out;
}

double block_power(const std::vector<Eigen::VectorXcd>& v) {
  double p = 0.0;
  for (const auto& x : v) p += x.squaredNorm();
  return p;
}

void check_feasible(const std::vector<Eigen::VectorXcd>& v, double p_max) {
  if (block_power(v) > p_max * (1.0 + 1e-9)) {
    throw NumericalError("blended precoders violate the power budget");
  }
}

}  // namespace

StepSizes step_sizes(int t, const StepSchedule& schedule) {
  if (t < 0) throw DomainError("iteration index must be non-negative");
  const double base = t + 2.0;
  const double rho = t == 0 ? 1.0 : std::pow(base, -schedule.rho_exponent);
  return {rho, std::pow(base, -schedule.gamma_exponent)};
}

BsVariables::BsVariables(int ue_count, int subcarrier_count, int feed_count, Eigen::VectorXd alpha)
    : ues(ue_count),
      subcarriers(subcarrier_count),
      precoders(static_cast<std::size_t>(ue_count) * subcarrier_count,
                Eigen::VectorXcd::Zero(feed_count)),
      alpha0(std::move(alpha)) {}

double BsVariables::power() const { return block_power(precoders); }

EffectiveChannels effective_channels(const ChannelTensor& xi, int b,
                                     const std::vector<AnalogBeamformer>& beamformers,
                                     const PanelPhysics& physics) {
  const int U = xi.ue_count();
  const int K = xi.subcarrier_count();
  if (static_cast<int>(beamformers.size()) != K || physics.subcarrier_count() != K) {
    throw ContractError("one beamformer and one excitation matrix per subcarrier required");
  }
  EffectiveChannels out(static_cast<std::size_t>(U) * K);
  for (int k = 0; k < K; ++k) {
    const Eigen::MatrixXcd analog = beamformers[k].matrix() * physics.excitation[k];  // W_RF H_f
    for (int u = 0; u < U; ++u) {
      out[static_cast<std::size_t>(u) * K + k] = analog.adjoint() * xi.at(b, u, k);
    }
  }
  return out;
}

std::vector<cd> local_contributions(const EffectiveChannels& effective, const BsVariables& vars) {
  const int U = vars.ues;
  const int K = vars.subcarriers;
  std::vector<cd> out(static_cast<std::size_t>(U) * U * K);
  for (int q = 0; q < U; ++q) {
    for (int u = 0; u < U; ++u) {
      for (int k = 0; k < K; ++k) {
        out[(static_cast<std::size_t>(q) * U + u) * K + k] =
            coupling_scalar(effective[static_cast<std::size_t>(q) * K + k], vars.precoder(u, k));
      }
    }
  }
  return out;
}

cd RateTerms::residual(int b, int q, int u, int k) const {
  cd r{0.0, 0.0};
  for (int other = 0; other < bs; ++other) {
    if (other != b) r += contribution(other, q, u, k);
  }
  return r;
}

RateTerms assemble_rate_terms(const std::vector<std::vector<cd>>& per_bs_contributions, int ues,
                              int subcarriers, double noise_var) {
  RateTerms t;
  t.bs = static_cast<int>(per_bs_contributions.size());
  t.ues = ues;
  t.subcarriers = subcarriers;
  t.noise_var = noise_var;
  const std::size_t block = static_cast<std::size_t>(ues) * ues * subcarriers;
  t.contributions.reserve(block * t.bs);
  for (const auto& c : per_bs_contributions) {
    if (c.size() != block) throw ContractError("contribution block has the wrong size");
    t.contributions.insert(t.contributions.end(), c.begin(), c.end());
  }
  t.totals.assign(block, cd{0.0, 0.0});
  for (int b = 0; b < t.bs; ++b) {
    for (std::size_t i = 0; i < block; ++i) t.totals[i] += t.contributions[b * block + i];
  }
  finalize_terms(t);
  return t;
}

RateTerms rate_terms(const std::vector<EffectiveChannels>& effective,
                     const std::vector<BsVariables>& vars, double noise_var) {
  if (effective.size() != vars.size() || vars.empty()) {
    throw ContractError("one effective-channel set per BS variable block required");
  }
  RateTerms t;
  t.bs = static_cast<int>(vars.size());
  t.ues = vars.front().ues;
  t.subcarriers = vars.front().subcarriers;
  t.noise_var = noise_var;
  const int U = t.ues;
  const int K = t.subcarriers;
  for (std::size_t b = 0; b < vars.size(); ++b) {
    if (vars[b].ues != U || vars[b].subcarriers != K ||
        effective[b].size() != static_cast<std::size_t>(U) * K) {
      throw ContractError("inconsistent UE/subcarrier counts across BSs");
    }
  }

  t.contributions.resize(static_cast<std::size_t>(t.bs) * U * U * K);
  t.totals.assign(static_cast<std::size_t>(U) * U * K, cd{0.0, 0.0});
  for (int q = 0; q < U; ++q) {
    for (int u = 0; u < U; ++u) {
      for (int k = 0; k < K; ++k) {
        cd sum{0.0, 0.0};
        for (int b = 0; b < t.bs; ++b) {
          const cd c = coupling_scalar(effective[b][static_cast<std::size_t>(q) * K + k],
                                       vars[b].precoder(u, k));
          t.contributions[((static_cast<std::size_t>(b) * U + q) * U + u) * K + k] = c;
          sum += c;
        }
        t.totals[(static_cast<std::size_t>(q) * U + u) * K + k] = sum;
      }
    }
  }
  finalize_terms(t);
  return t;
}

RateTerms rate_terms(const ChannelTensor& xi, const std::vector<BsVariables>& vars,
                     const std::vector<std::vector<AnalogBeamformer>>& beamformers,
                     const std::vector<const PanelPhysics*>& physics, double noise_var) {
  if (beamformers.size() != vars.size() || physics.size() != vars.size() ||
      xi.bs_count() != static_cast<int>(vars.size())) {
    throw ContractError("BS counts disagree");
  }
  std::vector<EffectiveChannels> eff;
  for (std::size_t b = 0; b < vars.size(); ++b) {
    eff.push_back(effective_channels(xi, static_cast<int>(b), beamformers[b], *physics[b]));
  }
  return rate_terms(eff, vars, noise_var);
}

Eigen::VectorXcd grad_precoder(const RateTerms& terms, const EffectiveChannels& effective, int b,
                               int u, int k) {
  const int K = terms.subcarriers;
  const auto eff = [&](int q) -> const Eigen::VectorXcd& {
    return effective[static_cast<std::size_t>(q) * K + k];
  };

  // H~_{b,u} v_{b,u} + r_{u,u} h~_{b,u} = h~_{b,u} (h~_{b,u}^H v_{b,u} + r_{u,u})
  const cd own = terms.contribution(b, u, u, k) + terms.residual(b, u, u, k);
  const double mui_u = terms.mui_at(u, k);
  Eigen::VectorXcd g = (own / (mui_u * (1.0 + terms.sinr_at(u, k)))) * eff(u);

  for (int q = 0; q < terms.ues; ++q) {
    if (q == u) continue;
    const double mui_q = terms.mui_at(q, k);
    const double weight = terms.signal_at(q, k) / ((1.0 + terms.sinr_at(q, k)) * mui_q * mui_q);
    const cd leak = terms.contribution(b, q, u, k) + terms.residual(b, q, u, k);
    g -= (weight * leak) * eff(q);
  }
  return (2.0 / (K * kLn2)) * g;
}

Eigen::SparseMatrix<double> jacobian_alpha(const Eigen::VectorXd& alpha0,
                                           const Eigen::VectorXd& resonance_freq, double frequency,
                                           JacobianMode mode) {
  const Eigen::Index n = alpha0.size();
  if (resonance_freq.size() != n) throw ContractError("alpha_0 and f_0 differ in length");
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n);
  const double f2 = frequency * frequency;
  for (Eigen::Index l = 0; l < n; ++l) {
    const double a = alpha0[l];
    if (!(std::abs(a) >= kAlphaMin)) throw DomainError("resonance strength below alpha_min");
    const double f0 = resonance_freq[l];
    const double f02 = f0 * f0;
    const double value = mode == JacobianMode::kDerived ? -(f02 - f2) / (a * a * f02)
                                                        : -(f02 + f2) / ((a * f0) * (a * f0));
    entries.emplace_back(l * n + l, l, value);
  }
  Eigen::SparseMatrix<double> j(n * n, n);
  j.setFromTriplets(entries.begin(), entries.end());
  return j;
}

Eigen::MatrixXcd u_tilde(const RateTerms& terms, const ChannelTensor& xi, const BsVariables& vars,
                         const Eigen::MatrixXcd& excitation, int b, int k, GradientWorkspace* ws) {
  const int U = terms.ues;
  const Eigen::Index n = excitation.rows();

  // Column images H_f v_{b,q} of every stream.
  std::vector<Eigen::VectorXcd> fed(U);
  for (int q = 0; q < U; ++q) fed[q] = excitation * vars.precoder(q, k);

  if (ws) {
    ws->f_matrix.assign(U, {});
    ws->m1.assign(U, {});
    ws->m2.assign(U, {});
    ws->u_matrix.assign(U, {});
  }

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (int u = 0; u < U; ++u) {
    const Eigen::VectorXcd& h = xi.at(b, u, k);
    const cd own = terms.contribution(b, u, u, k) + terms.residual(b, u, u, k);
    const Eigen::MatrixXcd f_mat = (own * h) * fed[u].adjoint();

    Eigen::RowVectorXcd m1_row = Eigen::RowVectorXcd::Zero(n);
    Eigen::RowVectorXcd m2_row = Eigen::RowVectorXcd::Zero(n);
    for (int q = 0; q < U; ++q) {
      if (q == u) continue;
      m1_row += terms.contribution(b, u, q, k) * fed[q].adjoint();
      m2_row += terms.residual(b, u, q, k) * fed[q].adjoint();
    }
    const Eigen::MatrixXcd m1 = h * m1_row;
    const Eigen::MatrixXcd m2 = h * m2_row;

    const double mui = terms.mui_at(u, k);
    const Eigen::MatrixXcd u_mat = mui * f_mat - terms.signal_at(u, k) * (m1 + m2);
    acc += (1.0 / ((1.0 + terms.sinr_at(u, k)) * mui * mui)) * u_mat;

    if (ws) {
      ws->f_matrix[u] = f_mat;
      ws->m1[u] = m1;
      ws->m2[u] = m2;
      ws->u_matrix[u] = u_mat;
    }
  }
  if (ws) ws->u_tilde = acc;
  return acc;
}

Eigen::VectorXd grad_alpha(const RateTerms& terms, const ChannelTensor& xi, const BsVariables& vars,
                           const std::vector<AnalogBeamformer>& beamformers,
                           const PanelPhysics& physics, int b, JacobianMode mode) {
  const int K = terms.subcarriers;
  const Eigen::Index n = vars.alpha0.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd vec_re = Eigen::VectorXd::Zero(n * n);
  for (int k = 0; k < K; ++k) {
    const Eigen::MatrixXcd ut = u_tilde(terms, xi, vars, physics.excitation[k], b, k);
    const Eigen::MatrixXcd wh = beamformers[k].matrix().adjoint();
    // J has nonzeros only on the vec-diagonal rows, so only diag(W^H U~ W^H) is formed.
    const Eigen::MatrixXcd left = wh * ut;
    for (Eigen::Index l = 0; l < n; ++l) {
      vec_re[l * n + l] = (left.row(l) * wh.col(l)).value().real();
    }
    grad += jacobian_alpha(vars.alpha0, physics.resonance_freq, physics.frequencies[k], mode)
                .transpose() *
            vec_re;
  }
  return (-2.0 / (K * kLn2)) * grad;
}

SurrogateState SurrogateState::initial(int ues, int subcarriers, int feeds, int elements,
                                       double tau, double tolerance) {
  if (!(tau > 0.0)) throw DomainError("proximal weight tau must be positive");
  SurrogateState s;
  s.tau = tau;
  s.tolerance = tolerance;
  s.accum_precoder.assign(static_cast<std::size_t>(ues) * subcarriers, Eigen::VectorXcd::Zero(feeds));
  s.accum_alpha = Eigen::VectorXd::Zero(elements);
  return s;
}

void SurrogateState::begin_iteration(int t, const StepSchedule& schedule) {
  const auto steps = step_sizes(t, schedule);
  iteration = t;
  rho = steps.rho;
  gamma = steps.gamma;
}

PrecoderSolution solve_precoder(const SurrogateState& state,
                                const std::vector<Eigen::VectorXcd>& gradients,
                                const std::vector<Eigen::VectorXcd>& current, double p_max) {
  if (!(state.tau > 0.0)) throw DomainError("proximal weight tau must be positive");
  if (gradients.size() != current.size() || state.accum_precoder.size() != current.size()) {
    throw ContractError("precoder, gradient and accumulator blocks differ in size");
  }
  const double rho = state.rho;
  const double tau = state.tau;

  std::vector<Eigen::VectorXcd> numerator(current.size());
  double norm2 = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    numerator[i] = rho * gradients[i] + (1.0 - rho) * state.accum_precoder[i] + tau * current[i];
    norm2 += numerator[i].squaredNorm();
  }
  const auto power_at = [&](double lambda) {
    const double d = tau + 2.0 * lambda;
    return norm2 / (d * d);
  };

  double lambda = 0.0;
  if (power_at(0.0) > p_max) {
    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (power_at(hi) > p_max) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 2000) throw NumericalError("bisection bracket for lambda not found");
    }
    for (int it = 0; it < 4000; ++it) {
      const double slack = p_max - power_at(hi);
      if (slack <= 1e-9 * p_max && hi * slack <= 1e-9 * p_max) break;
      if (hi - lo < 1e-14) break;
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (power_at(mid) > p_max ? lo : hi) = mid;
    }
    lambda = hi;  // feasible end of the bracket
  }

  PrecoderSolution out;
  out.multiplier = lambda;
  out.precoders.resize(current.size());
  const double scale = 1.0 / (tau + 2.0 * lambda);
  for (std::size_t i = 0; i < current.size(); ++i) out.precoders[i] = scale * numerator[i];
  return out;
}

Eigen::VectorXd solve_alpha(const SurrogateState& state, const Eigen::VectorXd& gradient,
                            const Eigen::VectorXd& current) {
  if (!(state.tau > 0.0)) throw DomainError("proximal weight tau must be positive");
  if (gradient.size() != current.size() || state.accum_alpha.size() != current.size()) {
    throw ContractError("alpha, gradient and accumulator differ in length");
  }
  Eigen::VectorXd out = (state.rho / state.tau) * gradient +
                        ((1.0 - state.rho) / state.tau) * state.accum_alpha + current;
  for (auto& a : out) a = clamp_alpha(a);
  return out;
}

double precoder_surrogate(const SurrogateState& state, const std::vector<Eigen::VectorXcd>& gradients,
                          const std::vector<Eigen::VectorXcd>& current,
                          const std::vector<Eigen::VectorXcd>& candidate) {
  double value = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    const Eigen::VectorXcd d = candidate[i] - current[i];
    value += state.rho * gradients[i].dot(d).real() +
             (1.0 - state.rho) * state.accum_precoder[i].dot(d).real() -
             0.5 * state.tau * d.squaredNorm();
  }
  return value;
}

double alpha_surrogate(const SurrogateState& state, const Eigen::VectorXd& gradient,
                       const Eigen::VectorXd& current, const Eigen::VectorXd& candidate) {
  const Eigen::VectorXd d = candidate - current;
  return (state.rho * gradient + (1.0 - state.rho) * state.accum_alpha).dot(d) -
         0.5 * state.tau * d.squaredNorm();
}

void update_precoder_accumulator(SurrogateState& state, const std::vector<Eigen::VectorXcd>& gradients) {
  if (gradients.size() != state.accum_precoder.size()) {
    throw ContractError("gradient block does not match the accumulator");
  }
  for (std::size_t i = 0; i < gradients.size(); ++i) {
    state.accum_precoder[i] = (1.0 - state.rho) * state.accum_precoder[i] + state.rho * gradients[i];
  }
}

void update_alpha_accumulator(SurrogateState& state, const Eigen::VectorXd& gradient) {
  if (gradient.size() != state.accum_alpha.size()) {
    throw ContractError("gradient does not match the accumulator");
  }
  state.accum_alpha = (1.0 - state.rho) * state.accum_alpha + state.rho * gradient;
}

void update_objective(SurrogateState& state, double sampled_rate, int bs_count) {
  state.objective = ((1.0 - state.rho) * state.objective + state.rho * sampled_rate) / bs_count;
}

SurrogateState update_surrogate(const SurrogateState& state,
                                const std::vector<Eigen::VectorXcd>& precoder_gradients,
                                const Eigen::VectorXd& alpha_gradient, double sampled_rate,
                                int bs_count) {
  SurrogateState next = state;
  update_precoder_accumulator(next, precoder_gradients);
  update_alpha_accumulator(next, alpha_gradient);
  update_objective(next, sampled_rate, bs_count);
  return next;
}

BsVariables blend_variables(const BsVariables& current, const BsVariables& target, double gamma,
                            double p_max) {
  BsVariables out = current;
  out.precoders = blend_precoders(current.precoders, target.precoders, gamma);
  out.alpha0 = blend_alpha(current.alpha0, target.alpha0, gamma);
  check_feasible(out.precoders, p_max);
  return out;
}

std::vector<Eigen::VectorXcd> local_precoder_gradients(const BsState& bs, const RateTerms& terms,
                                                       const EffectiveChannels& effective) {
  std::vector<Eigen::VectorXcd> g;
  g.reserve(bs.vars.precoders.size());
  for (int u = 0; u < bs.vars.ues; ++u) {
    for (int k = 0; k < bs.vars.subcarriers; ++k) {
      g.push_back(grad_precoder(terms, effective, bs.index, u, k));
    }
  }
  return g;
}

double apply_precoder_step(BsState& bs, const std::vector<Eigen::VectorXcd>& gradients,
                           const OptimizerConfig& config) {
  const auto solution = solve_precoder(bs.surrogate, gradients, bs.vars.precoders, config.p_max);
  update_precoder_accumulator(bs.surrogate, gradients);
  bs.vars.precoders = blend_precoders(bs.vars.precoders, solution.precoders, bs.surrogate.gamma);
  check_feasible(bs.vars.precoders, config.p_max);
  return solution.multiplier;
}

void apply_alpha_step(BsState& bs, const Eigen::VectorXd& gradient) {
  const Eigen::VectorXd target = solve_alpha(bs.surrogate, gradient, bs.vars.alpha0);
  update_alpha_accumulator(bs.surrogate, gradient);
  bs.vars.alpha0 = blend_alpha(bs.vars.alpha0, target, bs.surrogate.gamma);
}

BsVariables initial_variables(const EffectiveChannels& effective, int ues, int subcarriers,
                              Eigen::VectorXd alpha0, double p_max) {
  if (effective.size() != static_cast<std::size_t>(ues) * subcarriers || effective.empty()) {
    throw ContractError("effective channel count does not match U x K");
  }
  BsVariables vars(ues, subcarriers, static_cast<int>(effective.front().size()), std::move(alpha0));
  double norm2 = 0.0;
  for (const auto& h : effective) norm2 += h.squaredNorm();
  if (norm2 > 0.0) {
    const double scale = std::sqrt(0.5 * p_max / norm2);
    for (std::size_t i = 0; i < effective.size(); ++i) vars.precoders[i] = scale * effective[i];
  }
  return vars;
}

CentralizedOptimizer::CentralizedOptimizer(std::vector<BsState> states, OptimizerConfig config)
    : states_(std::move(states)), config_(config) {
  if (states_.empty()) throw ContractError("at least one BS is required");
  for (std::size_t b = 0; b < states_.size(); ++b) {
    if (states_[b].index != static_cast<int>(b) || !states_[b].physics) {
      throw ContractError("BS states must be ordered by index and carry physics");
    }
  }
}

IterationReport CentralizedOptimizer::step(const ChannelTensor& xi) {
  const int bs_count = static_cast<int>(states_.size());
  for (auto& s : states_) s.surrogate.begin_iteration(t_, config_.schedule);

  std::vector<EffectiveChannels> eff;
  std::vector<BsVariables> vars;
  for (const auto& s : states_) {
    eff.push_back(effective_channels(xi, s.index, s.beamformers, *s.physics));
    vars.push_back(s.vars);
  }
  const RateTerms terms = rate_terms(eff, vars, config_.noise_var);

  IterationReport report;
  report.iteration = t_;
  report.sampled_rate = terms.sum_rate;
  report.rho = states_.front().surrogate.rho;
  report.gamma = states_.front().surrogate.gamma;

  if (config_.blocks == BlockSchedule::kJacobi) {
    std::vector<std::vector<Eigen::VectorXcd>> gv;
    std::vector<Eigen::VectorXd> ga;
    for (const auto& s : states_) {
      gv.push_back(local_precoder_gradients(s, terms, eff[s.index]));
      ga.push_back(grad_alpha(terms, xi, s.vars, s.beamformers, *s.physics, s.index, config_.jacobian));
    }
    for (auto& s : states_) {
      report.multipliers.push_back(apply_precoder_step(s, gv[s.index], config_));
      apply_alpha_step(s, ga[s.index]);
    }
  } else {
    for (auto& s : states_) {
      report.multipliers.push_back(
          apply_precoder_step(s, local_precoder_gradients(s, terms, eff[s.index]), config_));
    }
    for (std::size_t b = 0; b < states_.size(); ++b) vars[b] = states_[b].vars;
    const RateTerms refreshed = rate_terms(eff, vars, config_.noise_var);
    for (auto& s : states_) {
      apply_alpha_step(s, grad_alpha(refreshed, xi, s.vars, s.beamformers, *s.physics, s.index,
                                     config_.jacobian));
    }
  }

  double objective = 0.0;
  for (auto& s : states_) {
    update_objective(s.surrogate, terms.sum_rate, bs_count);
    objective += s.surrogate.objective;
    s.refresh_beamformers();
  }
  report.objective = objective;
  ++t_;
  return report;
}

std::vector<IterationReport> CentralizedOptimizer::run(const ChannelSampler& sampler) {
  std::vector<IterationReport> trajectory;
  while (!converged_ && t_ < config_.max_iters) {
    const auto report = step(sampler(t_));
    trajectory.push_back(report);
    converged_ = std::abs(report.objective - last_objective_) < config_.tolerance;
    last_objective_ = report.objective;
  }
  return trajectory;
}

}  // namespace ppwdma
