// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppwdma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <set>
#include <thread>

#include "ppwdma/errors.hpp"
#include "ppwdma/random.hpp"

namespace ppwdma {

namespace {

constexpr double kPi = std::numbers::pi;

// Sub-stream purposes for derive_seed.
enum Purpose : std::uint64_t {
  kUeLayout = 1,
  kUeOrientation = 2,
  kFading = 3,
  kCsi = 4,
  kAlphaInit = 5,
  kShuffle = 6,
};

bool perfect_square(int n) {
  if (n < 1) return false;
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return r * r == n;
}

// Runs fn(i) for every i in `order` on `workers` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(const std::vector<std::size_t>& order, int workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto body = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= order.size()) return;
      try {
        fn(order[slot]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(order.size());
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(order.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::size_t> execution_order(std::size_t n, bool shuffle, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    auto rng = make_stream(seed, {kShuffle});
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

std::string format_number(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kRobust: return "robust";
    case ExperimentMode::kPerfect: return "perfect";
    case ExperimentMode::kImperfect: return "imperfect";
    case ExperimentMode::kNoMc: return "no-mc";
  }
  return "unknown";
}

ExperimentMode parse_mode(const std::string& name) {
  for (auto m : all_modes()) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown mode '" + name + "'");
}

std::vector<ExperimentMode> all_modes() {
  return {ExperimentMode::kRobust, ExperimentMode::kPerfect, ExperimentMode::kImperfect,
          ExperimentMode::kNoMc};
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

ScenarioConfig ScenarioConfig::desk_scale() {
  ScenarioConfig c;
  c.bs_count = 2;
  c.ue_count = 2;
  c.elements = 16;
  c.feeds = 4;
  c.subcarriers = 8;
  c.realizations = 20;
  c.pmax_dbm = {0, 10, 20, 30};
  return c;
}

void ScenarioConfig::validate() const {
  std::vector<std::string> bad;
  const auto check = [&](bool ok, const char* field) {
    if (!ok) bad.emplace_back(field);
  };
  const auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };

  check(bs_count >= 1, "bs_count");
  check(ue_count >= 1, "ue_count");
  check(subcarriers >= 1, "subcarriers");
  check(perfect_square(elements), "elements");
  check(perfect_square(feeds), "feeds");
  check(finite_positive(carrier_hz) && carrier_hz - 0.5 * bandwidth_hz > 0.0, "carrier_hz");
  check(std::isfinite(bandwidth_hz) && bandwidth_hz >= 0.0, "bandwidth_hz");
  check(finite_positive(plate_height_m), "plate_height_m");
  check(std::isfinite(resonance_offset_hz), "resonance_offset_hz");
  check(!pmax_dbm.empty() && std::all_of(pmax_dbm.begin(), pmax_dbm.end(),
                                         [](double p) { return std::isfinite(p); }),
        "pmax_dbm");
  check(std::isfinite(noise_dbm), "noise_dbm");
  check(finite_positive(bs_spacing_m), "bs_spacing_m");
  check(std::isfinite(cluster_radius_m) && cluster_radius_m >= 0.0, "cluster_radius_m");
  check(std::isfinite(cluster_height_m), "cluster_height_m");
  check(cluster_plane == "xz" || cluster_plane == "xy", "cluster_plane");
  check(std::isfinite(ue_dipole_length_m) && ue_dipole_length_m >= 0.0, "ue_dipole_length_m");
  check(fading_taps >= 1, "fading_taps");
  check(std::isfinite(fading_decay_db), "fading_decay_db");
  check(std::isfinite(pathloss_ref_db), "pathloss_ref_db");
  check(finite_positive(pathloss_exponent), "pathloss_exponent");
  check(std::isfinite(csi_error_delta) && csi_error_delta >= 0.0, "csi_error_delta");
  check(finite_positive(rho_exponent) && rho_exponent <= 1.0, "rho_exponent");
  check(finite_positive(gamma_exponent) && gamma_exponent <= 1.0, "gamma_exponent");
  check(finite_positive(tau), "tau");
  check(tolerance > 0.0, "tolerance");
  check(max_iters >= 0, "max_iters");
  check(jacobian == "derived" || jacobian == "literal", "jacobian");
  check(block_schedule == "jacobi" || block_schedule == "gauss-seidel", "block_schedule");
  check(topology == "star" || topology == "all-to-all", "topology");
  check(realizations >= 1, "realizations");
  bool modes_ok = !modes.empty();
  for (const auto& m : modes) {
    const auto all = all_modes();
    modes_ok = modes_ok && std::any_of(all.begin(), all.end(),
                                       [&](ExperimentMode x) { return to_string(x) == m; });
  }
  check(modes_ok, "modes");
  check(workers >= 0, "workers");

  if (!bad.empty()) {
    std::string msg = "invalid scenario config fields:";
    for (const auto& f : bad) msg += " " + f;
    throw ValidationError(msg);
  }
}

double ScenarioConfig::aperture() const {
  return std::sqrt(static_cast<double>(feeds)) * wavelength() / 2.0;
}

std::vector<double> ScenarioConfig::subcarrier_frequencies() const {
  std::vector<double> f(subcarriers);
  const double spacing = bandwidth_hz / subcarriers;
  for (int k = 1; k <= subcarriers; ++k) {
    f[k - 1] = carrier_hz + (k - 0.5 * (subcarriers + 1)) * spacing;
  }
  return f;
}

double ScenarioConfig::noise_variance() const { return dbm_to_watts(noise_dbm); }

FadingModel ScenarioConfig::fading_model() const {
  FadingModel m = FadingModel::exponential(fading_taps, fading_decay_db);
  m.pathloss_ref = std::pow(10.0, pathloss_ref_db / 10.0);
  m.pathloss_exponent = pathloss_exponent;
  m.per_element = fading_per_element;
  return m;
}

OptimizerConfig ScenarioConfig::optimizer_config(double pmax) const {
  OptimizerConfig o;
  o.tau = tau;
  o.tolerance = tolerance;
  o.max_iters = max_iters;
  o.p_max = dbm_to_watts(pmax);
  o.noise_var = noise_variance();
  o.schedule = {rho_exponent, gamma_exponent};
  o.jacobian = jacobian == "literal" ? JacobianMode::kLiteral : JacobianMode::kDerived;
  o.blocks = block_schedule == "gauss-seidel" ? BlockSchedule::kGaussSeidel : BlockSchedule::kJacobi;
  return o;
}

std::vector<ExperimentMode> ScenarioConfig::parsed_modes() const {
  std::vector<ExperimentMode> out;
  for (const auto& m : modes) out.push_back(parse_mode(m));
  return out;
}

#define PPWDMA_CONFIG_FIELDS(X)                                                               \
  X(bs_count) X(ue_count) X(subcarriers) X(elements) X(feeds) X(carrier_hz) X(bandwidth_hz)   \
  X(plate_height_m) X(resonance_offset_hz) X(pmax_dbm) X(noise_dbm) X(bs_spacing_m)           \
  X(cluster_radius_m) X(cluster_height_m) X(cluster_plane) X(ue_dipole_length_m)              \
  X(fading_taps) X(fading_decay_db) X(fading_per_element) X(pathloss_ref_db)                  \
  X(pathloss_exponent) X(csi_error_delta) X(rho_exponent) X(gamma_exponent) X(tau)            \
  X(tolerance) X(max_iters) X(jacobian) X(block_schedule) X(topology) X(realizations)         \
  X(master_seed) X(modes) X(no_mc_ideal) X(workers) X(shuffle_jobs) X(record_wall_time)

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = nlohmann::json::object();
#define PPWDMA_WRITE(name) j[#name] = c.name;
  PPWDMA_CONFIG_FIELDS(PPWDMA_WRITE)
#undef PPWDMA_WRITE
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ValidationError("scenario config must be a JSON object");
  static const std::set<std::string> known = {
#define PPWDMA_NAME(name) #name,
      PPWDMA_CONFIG_FIELDS(PPWDMA_NAME)
#undef PPWDMA_NAME
  };
  std::vector<std::string> bad;
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) bad.push_back(key);
  }
#define PPWDMA_READ(name)                                  \
  if (j.contains(#name)) {                                 \
    try {                                                  \
      j.at(#name).get_to(c.name);                          \
    } catch (const nlohmann::json::exception&) {           \
      bad.push_back(#name);                                \
    }                                                      \
  }
  PPWDMA_CONFIG_FIELDS(PPWDMA_READ)
#undef PPWDMA_READ
  if (!bad.empty()) {
    std::string msg = "invalid scenario config fields:";
    for (const auto& f : bad) msg += " " + f;
    throw ValidationError(msg);
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  ScenarioConfig c = j.get<ScenarioConfig>();
  c.validate();
  return c;
}

World build_scenario(const ScenarioConfig& config, std::uint64_t seed, int realization) {
  config.validate();
  World w;
  w.config = config;
  w.seed = seed;
  w.realization = realization;

  const double aperture = config.aperture();
  const double lambda = config.wavelength();
  const auto bs_x = [&](int b) { return aperture + b * config.bs_spacing_m; };  // b is 0-based
  for (int b = 0; b < config.bs_count; ++b) w.bs_centers.emplace_back(bs_x(b), aperture / 2.0, 0.0);

  // Two clusters between consecutive BS pairs; the third BS position is
  // extrapolated from the spacing when fewer than three BSs exist.
  for (int c = 0; c < 2; ++c) {
    const double x = bs_x(c) + 0.5 * (bs_x(c + 1) - bs_x(c)) - 0.5 * aperture;
    w.cluster_centers.emplace_back(x, 0.0, config.cluster_height_m);
  }

  auto layout = make_stream(seed, {static_cast<std::uint64_t>(realization), kUeLayout});
  auto orient = make_stream(seed, {static_cast<std::uint64_t>(realization), kUeOrientation});
  std::vector<std::pair<double, double>> orientations;
  for (int u = 0; u < config.ue_count; ++u) {
    const auto& centre = w.cluster_centers[u % 2];
    const double r = config.cluster_radius_m * std::sqrt(uniform(layout, 0.0, 1.0));
    const double a = uniform(layout, 0.0, 2.0 * kPi);
    if (config.cluster_plane == "xz") {
      w.ue_positions.emplace_back(centre.x() + r * std::cos(a), 0.0, centre.z() + r * std::sin(a));
    } else {
      w.ue_positions.emplace_back(centre.x() + r * std::cos(a), r * std::sin(a), centre.z());
    }
    const double ot = std::acos(1.0 - 2.0 * uniform(orient, 0.0, 1.0));
    const double op = uniform(orient, 0.0, 2.0 * kPi);
    orientations.emplace_back(ot, op);
  }

  const auto freqs = config.subcarrier_frequencies();
  const auto geometry = DmaGeometry::uniform_grid(config.elements, config.feeds, aperture,
                                                  config.plate_height_m);
  const Eigen::VectorXd f0 = Eigen::VectorXd::Constant(config.elements, config.resonance_frequency());
  auto coupled = std::make_shared<PanelPhysics>(PanelPhysics::build(geometry, freqs, f0, true));
  w.uncoupled = std::make_shared<const PanelPhysics>(coupled->without_coupling());
  w.coupled = std::move(coupled);

  const double dipole = config.ue_dipole_length_m > 0.0 ? config.ue_dipole_length_m : lambda / 2.0;
  const FadingModel fading = config.fading_model();
  w.true_channels = ChannelTensor(config.bs_count, config.ue_count, config.subcarriers, config.elements);
  for (int b = 0; b < config.bs_count; ++b) {
    for (int u = 0; u < config.ue_count; ++u) {
      const Eigen::Vector3d rel = w.ue_positions[u] - w.bs_centers[b];
      const auto pose = UePose::from_relative(rel, orientations[u].first, orientations[u].second, dipole);
      std::vector<Eigen::VectorXcd> det(config.subcarriers);
      for (int k = 0; k < config.subcarriers; ++k) {
        const auto steer = steering_vectors(geometry, pose, WaveNumber::at(freqs[k]));
        det[k] = ue_channel(steer.theta, steer.phi, pose);
      }
      auto rng = make_stream(seed, {static_cast<std::uint64_t>(realization), kFading,
                                    static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(u)});
      const auto h = augment_channel(det, pose.distance, fading, rng);
      for (int k = 0; k < config.subcarriers; ++k) w.true_channels.at(b, u, k) = h[k];
    }
  }
  return w;
}

ChannelTensor sample_csi(const World& world, int t) {
  const auto& h = world.true_channels;
  ChannelTensor xi(h.bs_count(), h.ue_count(), h.subcarrier_count(), h.element_count());
  auto rng = make_stream(world.seed, {static_cast<std::uint64_t>(world.realization), kCsi,
                                      static_cast<std::uint64_t>(t)});
  for (int b = 0; b < h.bs_count(); ++b) {
    for (int u = 0; u < h.ue_count(); ++u) {
      for (int k = 0; k < h.subcarrier_count(); ++k) {
        xi.at(b, u, k) = corrupt_csi(h.at(b, u, k), world.config.csi_error_delta, rng);
      }
    }
  }
  return xi;
}

ChannelSampler make_sampler(const World& world, ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kPerfect:
      return [&world](int) { return world.true_channels; };
    case ExperimentMode::kImperfect: {
      auto frozen = std::make_shared<const ChannelTensor>(sample_csi(world, 0));
      return [frozen](int) { return *frozen; };
    }
    case ExperimentMode::kRobust:
    case ExperimentMode::kNoMc:
      break;
  }
  return [&world](int t) { return sample_csi(world, t); };
}

std::vector<BsState> initial_states(const World& world, ExperimentMode mode,
                                    const OptimizerConfig& opt, const ChannelTensor& xi0) {
  const ScenarioConfig& cfg = world.config;
  const auto& design = mode == ExperimentMode::kNoMc ? world.uncoupled : world.coupled;
  std::vector<BsState> states;
  for (int b = 0; b < cfg.bs_count; ++b) {
    auto rng = make_stream(world.seed, {static_cast<std::uint64_t>(world.realization), kAlphaInit,
                                        static_cast<std::uint64_t>(b)});
    Eigen::VectorXd alpha(cfg.elements);
    for (auto& a : alpha) a = uniform(rng, 1e-3, 1e-1);

    BsState s;
    s.index = b;
    s.physics = design;
    s.beamformers = design->beamformers(alpha);
    const auto eff = effective_channels(xi0, b, s.beamformers, *design);
    s.vars = initial_variables(eff, cfg.ue_count, cfg.subcarriers, alpha, opt.p_max);
    s.surrogate = SurrogateState::initial(cfg.ue_count, cfg.subcarriers, cfg.feeds, cfg.elements,
                                          opt.tau, opt.tolerance);
    states.push_back(std::move(s));
  }
  return states;
}

RunResult run_experiment(const World& world, ExperimentMode mode, double pmax_dbm) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig& cfg = world.config;
  const OptimizerConfig opt = cfg.optimizer_config(pmax_dbm);
  // The no-mc design is scored on coupled physics unless no_mc_ideal is set.
  const auto& evaluation =
      mode == ExperimentMode::kNoMc && cfg.no_mc_ideal ? world.uncoupled : world.coupled;

  const ChannelSampler sampler = make_sampler(world, mode);
  auto states = initial_states(world, mode, opt, sampler(0));

  DistributedOptimizer optimizer(std::move(states), opt,
                                 cfg.topology == "all-to-all" ? Topology::kAllToAll : Topology::kStar);
  const auto outcome = optimizer.run_until_converged(sampler);

  std::vector<BsVariables> vars;
  std::vector<std::vector<AnalogBeamformer>> bfs;
  std::vector<const PanelPhysics*> physics;
  for (const auto& s : optimizer.states()) {
    vars.push_back(s.vars);
    bfs.push_back(evaluation->beamformers(s.vars.alpha0));
    physics.push_back(evaluation.get());
  }
  const RateTerms achieved = rate_terms(world.true_channels, vars, bfs, physics, opt.noise_var);

  RunResult r;
  r.mode = mode;
  r.seed = world.seed;
  r.pmax_dbm = pmax_dbm;
  r.realization = world.realization;
  r.iterations = static_cast<int>(outcome.trajectory.size());
  r.converged = outcome.converged;
  r.sum_rate = achieved.sum_rate;
  r.bytes_exchanged = optimizer.log().total_bytes();
  r.scalars_per_iteration = r.iterations > 0 ? optimizer.log().total_scalars() / r.iterations : 0;
  if (cfg.record_wall_time) {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

std::vector<CurvePoint> summarize(const std::vector<RunResult>& runs) {
  std::vector<CurvePoint> curves;
  std::map<std::pair<int, double>, std::vector<double>> groups;
  for (const auto& r : runs) {
    const std::pair<int, double> key{static_cast<int>(r.mode), r.pmax_dbm};
    if (!groups.count(key)) curves.push_back({r.mode, r.pmax_dbm, 0.0, 0.0, 0});
    groups[key].push_back(r.sum_rate);
  }
  for (auto& c : curves) {
    const auto& x = groups[{static_cast<int>(c.mode), c.pmax_dbm}];
    c.n = static_cast<int>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    c.mean_rate = sum / c.n;
    if (c.n > 1) {
      double ss = 0.0;
      for (double v : x) ss += (v - c.mean_rate) * (v - c.mean_rate);
      c.stderr_rate = std::sqrt(ss / (c.n - 1) / c.n);
    }
  }
  return curves;
}

SweepResult run_sweep(const ScenarioConfig& config) {
  config.validate();
  const auto modes = config.parsed_modes();
  const int workers = resolve_workers(config.workers);
  const std::uint64_t seed = config.master_seed;

  std::vector<World> worlds(config.realizations);
  parallel_for(execution_order(worlds.size(), config.shuffle_jobs, seed ^ 1), workers,
               [&](std::size_t r) { worlds[r] = build_scenario(config, seed, static_cast<int>(r)); });

  const std::size_t n_p = config.pmax_dbm.size();
  const std::size_t n_r = worlds.size();
  SweepResult out;
  out.runs.resize(modes.size() * n_p * n_r);
  parallel_for(execution_order(out.runs.size(), config.shuffle_jobs, seed), workers,
               [&](std::size_t job) {
                 const std::size_t m = job / (n_p * n_r);
                 const std::size_t p = (job / n_r) % n_p;
                 const std::size_t r = job % n_r;
                 out.runs[job] = run_experiment(worlds[r], modes[m], config.pmax_dbm[p]);
               });
  out.curves = summarize(out.runs);
  return out;
}

std::string to_csv(const std::vector<RunResult>& runs) {
  std::string s = std::string(kCsvHeader) + "\n";
  for (const auto& r : runs) {
    s += to_string(r.mode) + "," + std::to_string(r.seed) + "," + format_number("%.10g", r.pmax_dbm) +
         "," + std::to_string(r.realization) + "," + std::to_string(r.iterations) + "," +
         format_number("%.17g", r.sum_rate) + "," + std::to_string(r.bytes_exchanged) + "," +
         format_number("%.3f", r.wall_ms) + "\n";
  }
  return s;
}

nlohmann::json to_summary_json(const ScenarioConfig& config, const std::vector<CurvePoint>& curves) {
  nlohmann::json j;
  j["config"] = config;
  j["curves"] = nlohmann::json::array();
  for (const auto& c : curves) {
    j["curves"].push_back({{"mode", to_string(c.mode)},
                           {"pmax_dbm", c.pmax_dbm},
                           {"mean_rate", c.mean_rate},
                           {"stderr", c.stderr_rate},
                           {"n", c.n}});
  }
  return j;
}

SweepResult sweep_and_export(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  SweepResult result = run_sweep(config);

  const auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    f << text;
    if (!f) throw IoError("write failed for " + p.string());
  };
  write(out_dir / "results.csv", to_csv(result.runs));
  write(out_dir / "summary.json", to_summary_json(config, result.curves).dump(2) + "\n");
  return result;
}

}  // namespace ppwdma
