// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "oracles/reference_values.hpp"
#include "ppwdma/errors.hpp"
#include "ppwdma/harness.hpp"
#include "ppwdma/optimizer.hpp"
#include "support/instances.hpp"

using namespace ppwdma;

namespace {

ScenarioConfig tiny(int bs) {
  ScenarioConfig c;
  c.bs_count = bs;
  c.ue_count = 2;
  c.subcarriers = 2;
  c.elements = 4;
  c.feeds = 1;
  return c;
}

std::vector<Eigen::VectorXcd> random_block(int count, int len, RandomStream& rng, double var = 1.0) {
  std::vector<Eigen::VectorXcd> out(count, Eigen::VectorXcd(len));
  for (auto& v : out) {
    for (auto& e : v) e = complex_gaussian(rng, var);
  }
  return out;
}

double power(const std::vector<Eigen::VectorXcd>& v) {
  double p = 0.0;
  for (const auto& x : v) p += x.squaredNorm();
  return p;
}

SurrogateState state_at(int t, int blocks, int len, int n, double tau, RandomStream& rng) {
  auto s = SurrogateState::initial(blocks, 1, len, n, tau, 1e-3);
  s.begin_iteration(t);
  s.accum_precoder = random_block(blocks, len, rng);
  s.accum_alpha = Eigen::VectorXd::Random(n);
  return s;
}

}  // namespace

TEST_CASE("step-size schedule") {
  CHECK(step_sizes(0).rho == 1.0);
  CHECK(step_sizes(1).rho == doctest::Approx(std::pow(3.0, -0.60)).epsilon(1e-15));
  CHECK(step_sizes(1).rho == doctest::Approx(0.5173).epsilon(1e-4));
  CHECK(step_sizes(1).gamma == doctest::Approx(0.5116).epsilon(1e-4));
  for (int t = 1; t < 200; ++t) {
    CHECK(step_sizes(t + 1).rho < step_sizes(t).rho);
    CHECK(step_sizes(t + 1).gamma < step_sizes(t).gamma);
  }
}

TEST_CASE("rate terms") {
  RandomStream rng(1);
  const int bs = 2, ues = 2, k = 2, nf = 3;
  const double noise = 0.3;
  std::vector<EffectiveChannels> eff(bs);
  std::vector<BsVariables> vars;
  for (int b = 0; b < bs; ++b) {
    eff[b] = random_block(ues * k, nf, rng);
    BsVariables v(ues, k, nf, Eigen::VectorXd::Constant(4, 0.01));
    v.precoders = random_block(ues * k, nf, rng);
    vars.push_back(v);
  }

  SUBCASE("nested-sum oracle") {
    const auto t = rate_terms(eff, vars, noise);
    double rate = 0.0;
    for (int u = 0; u < ues; ++u) {
      for (int kk = 0; kk < k; ++kk) {
        auto seen = [&](int stream) {
          cd s{};
          for (int b = 0; b < bs; ++b) s += eff[b][u * k + kk].dot(vars[b].precoder(stream, kk));
          return s;
        };
        const double f = std::norm(seen(u));
        double mui = noise;
        for (int q = 0; q < ues; ++q) {
          if (q != u) mui += std::norm(seen(q));
        }
        CHECK(t.signal_at(u, kk) == doctest::Approx(f).epsilon(1e-13));
        CHECK(t.mui_at(u, kk) == doctest::Approx(mui).epsilon(1e-13));
        rate += std::log2(1.0 + f / mui);
      }
    }
    CHECK(t.sum_rate == doctest::Approx(rate / k).epsilon(1e-13));
    // r excludes the own BS.
    CHECK(std::abs(t.residual(0, 1, 0, 1) - t.contribution(1, 1, 0, 1)) == 0.0);
  }

  SUBCASE("single UE sees only noise") {
    std::vector<EffectiveChannels> e1(1, EffectiveChannels(eff[0].begin(), eff[0].begin() + k));
    BsVariables v(1, k, nf, Eigen::VectorXd::Constant(4, 0.01));
    v.precoders = random_block(k, nf, rng);
    const auto t = rate_terms(e1, {v}, noise);
    for (int kk = 0; kk < k; ++kk) {
      CHECK(t.mui_at(0, kk) == noise);
      CHECK(t.sinr_at(0, kk) == doctest::Approx(t.signal_at(0, kk) / noise));
    }
  }

  SUBCASE("zero precoders") {
    for (auto& v : vars) {
      for (auto& x : v.precoders) x.setZero();
    }
    const auto t = rate_terms(eff, vars, noise);
    for (double s : t.sinr) CHECK(s == 0.0);
    CHECK(t.sum_rate == 0.0);
  }

  SUBCASE("assembled and direct paths agree bitwise") {
    std::vector<std::vector<cd>> blocks;
    for (int b = 0; b < bs; ++b) blocks.push_back(local_contributions(eff[b], vars[b]));
    const auto a = assemble_rate_terms(blocks, ues, k, noise);
    const auto d = rate_terms(eff, vars, noise);
    CHECK(a.sum_rate == d.sum_rate);
    CHECK(a.sinr == d.sinr);
    CHECK(a.totals == d.totals);
  }
}

TEST_CASE("precoder gradient") {
  SUBCASE("finite differences") {
    std::vector<double> errors;
    for (int bs : {1, 2}) {
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto g = testing::random_instance(tiny(bs), seed, 10.0);
        for (int b = 0; b < bs; ++b) errors.push_back(testing::precoder_fd_error(g, b));
      }
    }
    CHECK(testing::median(errors) <= 1e-4);
  }

  SUBCASE("zero channel gives zero gradient") {
    RandomStream rng(2);
    std::vector<EffectiveChannels> eff{EffectiveChannels(4, Eigen::VectorXcd::Zero(2))};
    BsVariables v(2, 2, 2, Eigen::VectorXd::Constant(4, 0.01));
    v.precoders = random_block(4, 2, rng);
    const auto t = rate_terms(eff, {v}, 1.0);
    for (int u = 0; u < 2; ++u) {
      for (int k = 0; k < 2; ++k) CHECK(grad_precoder(t, eff[0], 0, u, k).isZero(0.0));
    }
  }
}

TEST_CASE("resonance-strength Jacobian") {
  const int n = 5;
  Eigen::VectorXd alpha(n), f0(n);
  alpha << 0.01, -0.02, 0.05, 0.003, 0.07;
  f0.setConstant(10.135e9);
  const double f = 1e10;

  for (auto mode : {JacobianMode::kDerived, JacobianMode::kLiteral}) {
    const auto j = jacobian_alpha(alpha, f0, f, mode);
    CHECK(j.rows() == n * n);
    CHECK(j.cols() == n);
    CHECK(j.nonZeros() == n);
    for (int k = 0; k < j.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(j, k); it; ++it) CHECK(it.row() == it.col() * n + it.col());
    }
  }

  const auto literal = jacobian_alpha(alpha, f0, f, JacobianMode::kLiteral);
  CHECK(literal.coeff(0, 0) == doctest::Approx(oracle::kJacobianLiteralRef).epsilon(1e-13));
  const auto derived = jacobian_alpha(alpha, f0, f, JacobianMode::kDerived);
  CHECK(derived.coeff(0, 0) == doctest::Approx(oracle::kJacobianDerivedRef).epsilon(1e-13));

  for (int l = 0; l < n; ++l) {
    const double h = 1e-8 * std::abs(alpha[l]);
    const auto at = [&](double a) { return std::conj(inverse_polarizability(a, f0[l], f, 2.5e-3)); };
    const cd fd = (at(alpha[l] + h) - at(alpha[l] - h)) / (2.0 * h);
    CHECK(std::abs(fd.imag()) <= 1e-6 * std::abs(fd.real()));
    CHECK(derived.coeff(l * n + l, l) == doctest::Approx(fd.real()).epsilon(1e-5));
  }
}

TEST_CASE("resonance-strength gradient") {
  SUBCASE("finite differences on a single BS") {
    std::vector<double> errors;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto g = testing::random_instance(tiny(1), seed, 10.0);
      errors.push_back(testing::alpha_fd_error(g, 0));
    }
    CHECK(testing::median(errors) <= 1e-4);
  }

  SUBCASE("finite differences on two BSs") {
    std::vector<double> errors;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto g = testing::random_instance(tiny(2), seed, 10.0);
      for (int b = 0; b < 2; ++b) errors.push_back(testing::alpha_fd_error(g, b));
    }
    CHECK(testing::median(errors) <= 1e-4);
  }

  SUBCASE("zero precoders") {
    auto g = testing::random_instance(tiny(1), 3, 10.0);
    for (auto& x : g.vars[0].precoders) x.setZero();
    g.terms = rate_terms(g.effective, g.vars, g.noise_var);
    const auto grad = grad_alpha(g.terms, g.xi, g.vars[0], g.beamformers[0], *g.world.coupled, 0);
    CHECK(grad.isZero(0.0));
  }

  SUBCASE("single UE has no interference matrices") {
    auto cfg = tiny(1);
    cfg.ue_count = 1;
    const auto g = testing::random_instance(cfg, 4, 10.0);
    GradientWorkspace ws;
    u_tilde(g.terms, g.xi, g.vars[0], g.world.coupled->excitation[0], 0, 0, &ws);
    REQUIRE(ws.m1.size() == 1);
    CHECK(ws.m1[0].isZero(0.0));
    CHECK(ws.m2[0].isZero(0.0));
    const Eigen::MatrixXcd expect = g.terms.mui_at(0, 0) * ws.f_matrix[0];
    CHECK((ws.u_matrix[0] - expect).norm() <= 1e-14 * expect.norm());
  }
}

TEST_CASE("precoder subproblem") {
  RandomStream rng(5);
  const int blocks = 4, len = 3;
  const double tau = 0.5;

  SUBCASE("inactive budget") {
    auto s = state_at(3, blocks, len, 2, tau, rng);
    const auto grad = random_block(blocks, len, rng, 1e-4);
    const auto v = random_block(blocks, len, rng, 1e-4);
    for (auto& x : s.accum_precoder) x *= 1e-2;
    const auto sol = solve_precoder(s, grad, v, 1e3);
    CHECK(sol.multiplier == 0.0);
    for (int i = 0; i < blocks; ++i) {
      const Eigen::VectorXcd expect = (s.rho * grad[i] + (1 - s.rho) * s.accum_precoder[i] + tau * v[i]) / tau;
      CHECK((sol.precoders[i] - expect).norm() <= 1e-14 * expect.norm());
    }
  }

  SUBCASE("first iteration is a gradient step") {
    auto s = state_at(0, blocks, len, 2, tau, rng);
    const auto grad = random_block(blocks, len, rng);
    const auto v = random_block(blocks, len, rng);
    const auto sol = solve_precoder(s, grad, v, 1e6);
    for (int i = 0; i < blocks; ++i) {
      const Eigen::VectorXcd expect = v[i] + grad[i] / tau;
      CHECK((sol.precoders[i] - expect).norm() <= 1e-14 * expect.norm());
    }
  }

  SUBCASE("active budget") {
    for (double p : {1e-3, 1.0, 1e-9}) {
      auto s = state_at(2, blocks, len, 2, tau, rng);
      const auto grad = random_block(blocks, len, rng, 10.0);
      const auto v = random_block(blocks, len, rng);
      const auto sol = solve_precoder(s, grad, v, p);
      const double got = power(sol.precoders);
      CHECK(sol.multiplier > 0.0);
      CHECK(got <= p * (1 + 1e-9));
      CHECK(std::abs(got - p) <= 1e-9 * p);
      CHECK(sol.multiplier * std::abs(got - p) <= 1e-8 * p);
    }
  }

  SUBCASE("maximizer dominates feasible perturbations") {
    auto s = state_at(4, blocks, len, 2, tau, rng);
    const auto grad = random_block(blocks, len, rng, 10.0);
    const auto v = random_block(blocks, len, rng);
    const double p = 2.0;
    const auto sol = solve_precoder(s, grad, v, p);
    const double best = precoder_surrogate(s, grad, v, sol.precoders);
    for (int i = 0; i < 100; ++i) {
      const auto other = testing::feasible_perturbation(sol.precoders, p, 0.1, rng);
      CHECK(precoder_surrogate(s, grad, v, other) <= best);
    }
  }
}

TEST_CASE("resonance-strength subproblem") {
  RandomStream rng(6);
  const int n = 6;
  const double tau = 0.25;
  auto s = state_at(0, 1, 1, n, tau, rng);
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(n, 0.01, 0.06);
  const Eigen::VectorXd grad = Eigen::VectorXd::Random(n) * 1e-3;

  CHECK((solve_alpha(s, grad, a) - (a + grad / tau)).norm() <= 1e-15);

  s.begin_iteration(5);
  s.accum_alpha.setZero();
  CHECK(solve_alpha(s, Eigen::VectorXd::Zero(n), a) == a);

  s.accum_alpha = Eigen::VectorXd::Random(n) * 1e-3;
  const Eigen::VectorXd expect = (s.rho / tau) * grad + ((1 - s.rho) / tau) * s.accum_alpha + a;
  CHECK((solve_alpha(s, grad, a) - expect).norm() <= 1e-15);

  const auto opt = solve_alpha(s, grad, a);
  const double best = alpha_surrogate(s, grad, a, opt);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd other = opt + 1e-3 * Eigen::VectorXd::Random(n);
    CHECK(alpha_surrogate(s, grad, a, other) <= best);
  }

  // Sign-preserving clamp away from zero.
  s.accum_alpha = Eigen::VectorXd::Zero(3);
  s.begin_iteration(0);
  Eigen::VectorXd cur(3), g(3);
  cur << 0.01, -0.01, 0.01;
  g << -0.01 * tau, 0.01 * tau - 1e-15, -0.01 * tau + 1e-15;
  const auto c = solve_alpha(s, g, cur);
  CHECK(c[0] == kAlphaMin);
  CHECK(c[1] == -kAlphaMin);
  CHECK(c[2] == kAlphaMin);
}

TEST_CASE("surrogate recursions") {
  RandomStream rng(8);
  const int blocks = 2, len = 2, n = 3, bs = 2;
  auto s = SurrogateState::initial(blocks, 1, len, n, 0.1, 1e-3);
  CHECK(s.objective == 0.0);
  CHECK(s.accum_alpha.isZero(0.0));

  s.begin_iteration(0);
  const auto g0 = random_block(blocks, len, rng);
  const Eigen::VectorXd a0 = Eigen::VectorXd::Random(n);
  const auto s0 = update_surrogate(s, g0, a0, 4.0, bs);
  CHECK(s0.objective == 2.0);
  CHECK(s0.accum_alpha == a0);
  for (int i = 0; i < blocks; ++i) CHECK(s0.accum_precoder[i] == g0[i]);

  auto s1 = s0;
  s1.begin_iteration(1);
  const double rho = std::pow(3.0, -0.6);
  const auto g1 = random_block(blocks, len, rng);
  const Eigen::VectorXd a1 = Eigen::VectorXd::Random(n);
  const auto s2 = update_surrogate(s1, g1, a1, 6.0, bs);
  CHECK(s2.objective == doctest::Approx(((1 - rho) * 2.0 + rho * 6.0) / bs).epsilon(1e-15));
  CHECK((s2.accum_alpha - ((1 - rho) * a0 + rho * a1)).norm() <= 1e-15);
  for (int i = 0; i < blocks; ++i) {
    CHECK((s2.accum_precoder[i] - ((1 - rho) * g0[i] + rho * g1[i])).norm() <= 1e-15);
  }

  auto frozen = s0;
  frozen.rho = 1e-300;
  update_alpha_accumulator(frozen, a1);
  CHECK((frozen.accum_alpha - a0).norm() <= 1e-15);
}

TEST_CASE("blending") {
  RandomStream rng(9);
  BsVariables x(2, 2, 3, Eigen::VectorXd::Constant(4, 0.02));
  BsVariables y(2, 2, 3, Eigen::VectorXd::Constant(4, -0.05));
  x.precoders = random_block(4, 3, rng);
  y.precoders = random_block(4, 3, rng);
  const double p = std::max(x.power(), y.power());

  const auto keep = blend_variables(x, y, 0.0, p);
  CHECK(keep.precoders == x.precoders);
  CHECK(keep.alpha0 == x.alpha0);
  const auto jump = blend_variables(x, y, 1.0, p);
  CHECK(jump.precoders == y.precoders);
  CHECK(jump.alpha0 == y.alpha0);
  for (double g : {0.1, 0.37, 0.9}) {
    const auto mid = blend_variables(x, y, g, p);
    CHECK(mid.power() <= p * (1 + 1e-12));
    CHECK(mid.alpha0[0] == doctest::Approx((1 - g) * 0.02 + g * -0.05));
  }
  CHECK_THROWS_AS(blend_variables(x, y, 0.5, 1e-6), NumericalError);
}

TEST_CASE("initialization") {
  RandomStream rng(10);
  const EffectiveChannels eff = random_block(6, 2, rng);
  const auto v = initial_variables(eff, 2, 3, Eigen::VectorXd::Constant(4, 0.01), 0.8);
  CHECK(v.power() == doctest::Approx(0.4));
  // Matched filter: parallel to the effective channel.
  CHECK(std::abs(std::abs(eff[4].normalized().dot(v.precoder(1, 1).normalized())) - 1.0) <= 1e-12);
  const auto z = initial_variables(EffectiveChannels(6, Eigen::VectorXcd::Zero(2)), 2, 3,
                                   Eigen::VectorXd::Constant(4, 0.01), 0.8);
  CHECK(z.power() == 0.0);
}

TEST_CASE("centralized runs are deterministic") {
  auto cfg = ScenarioConfig::desk_scale();
  cfg.max_iters = 30;
  const auto world = build_scenario(cfg, 12, 0);
  auto run = [&] {
    const auto opt = cfg.optimizer_config(10.0);
    const auto sampler = make_sampler(world, ExperimentMode::kRobust);
    CentralizedOptimizer o(initial_states(world, ExperimentMode::kRobust, opt, sampler(0)), opt);
    const auto traj = o.run(sampler);
    std::vector<double> out;
    for (const auto& r : traj) out.push_back(r.objective);
    for (const auto& s : o.states()) {
      for (const auto& x : s.vars.precoders) {
        for (const auto& e : x) {
          out.push_back(e.real());
          out.push_back(e.imag());
        }
      }
      for (double a : s.vars.alpha0) out.push_back(a);
    }
    return out;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() > 10);
  CHECK(a == b);
}
