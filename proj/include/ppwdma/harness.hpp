// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

// Monte Carlo experiment driver: scenario layout, the four design modes,
// P_max sweeps on a worker pool and CSV/JSON export.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppwdma/channel.hpp"
#include "ppwdma/coordination.hpp"
#include "ppwdma/em_model.hpp"
#include "ppwdma/optimizer.hpp"

namespace ppwdma {

enum class ExperimentMode { kRobust, kPerfect, kImperfect, kNoMc };

std::string to_string(ExperimentMode mode);
/// Accepts "robust", "perfect", "imperfect", "no-mc"; throws ValidationError otherwise.
ExperimentMode parse_mode(const std::string& name);
std::vector<ExperimentMode> all_modes();

struct ScenarioConfig {
  int bs_count = 3;
  int ue_count = 4;
  int subcarriers = 32;
  int elements = 64;
  int feeds = 4;

  double carrier_hz = 10e9;
  double bandwidth_hz = 250e6;
  double plate_height_m = 2.5e-3;
  double resonance_offset_hz = 10e6;  // f0 = f_c + BW/2 + offset

  std::vector<double> pmax_dbm = {0, 5, 10, 15, 20, 25, 30};
  double noise_dbm = -96.0;

  double bs_spacing_m = 20.0;
  double cluster_radius_m = 2.5;
  double cluster_height_m = 80.0;
  std::string cluster_plane = "xz";  // "xz": disk in y = 0; "xy": disk in z = cluster_height_m
  double ue_dipole_length_m = 0.0;   // 0 selects lambda_c / 2

  int fading_taps = 4;
  double fading_decay_db = 3.0;
  bool fading_per_element = false;
  double pathloss_ref_db = -30.0;
  double pathloss_exponent = 2.5;
  double csi_error_delta = 0.2;

  double rho_exponent = 0.60;
  double gamma_exponent = 0.61;
  double tau = 1e-2;
  double tolerance = 1e-3;
  int max_iters = 500;
  std::string jacobian = "derived";  // or "literal"
  std::string block_schedule = "jacobi";  // or "gauss-seidel"
  std::string topology = "star";     // or "all-to-all"

  int realizations = 100;
  std::uint64_t master_seed = 1;
  std::vector<std::string> modes = {"robust", "perfect", "imperfect", "no-mc"};
  bool no_mc_ideal = false;  // evaluate the no-mc design with G = 0 as well

  int workers = 0;             // 0: hardware concurrency
  bool shuffle_jobs = false;   // randomize execution order (results unaffected)
  bool record_wall_time = false;

  /// B=2, U=2, N=16, N_f=4, K=8, 20 realizations, P_max in {0, 10, 20, 30} dBm.
  static ScenarioConfig desk_scale();

  /// Throws ValidationError naming every invalid field.
  void validate() const;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double aperture() const;
  double resonance_frequency() const { return carrier_hz + 0.5 * bandwidth_hz + resonance_offset_hz; }
  std::vector<double> subcarrier_frequencies() const;
  double noise_variance() const;
  FadingModel fading_model() const;
  OptimizerConfig optimizer_config(double pmax_dbm) const;
  std::vector<ExperimentMode> parsed_modes() const;
};

void to_json(nlohmann::json& j, const ScenarioConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ScenarioConfig& c);

ScenarioConfig load_config(const std::filesystem::path& path);

double dbm_to_watts(double dbm);

/// One channel realization of the scenario.
struct World {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  int realization = 0;
  std::vector<Eigen::Vector3d> bs_centers;
  std::vector<Eigen::Vector3d> cluster_centers;
  std::vector<Eigen::Vector3d> ue_positions;
  std::shared_ptr<const PanelPhysics> coupled;    // full physics
  std::shared_ptr<const PanelPhysics> uncoupled;  // same panel with G = 0
  ChannelTensor true_channels;
};

World build_scenario(const ScenarioConfig& config, std::uint64_t seed, int realization = 0);

/// CSI sample xi^t for a world: independent per (seed, realization, t).
ChannelTensor sample_csi(const World& world, int t);

/// xi^t source for a mode: fresh draws (robust, no-mc), true channels
/// (perfect) or the frozen xi^0 draw (imperfect).
ChannelSampler make_sampler(const World& world, ExperimentMode mode);

/// Seeded alpha_0 draw and matched-filter precoders on xi^0 for every BS.
std::vector<BsState> initial_states(const World& world, ExperimentMode mode,
                                    const OptimizerConfig& opt, const ChannelTensor& xi0);

struct RunResult {
  ExperimentMode mode = ExperimentMode::kRobust;
  std::uint64_t seed = 0;
  double pmax_dbm = 0.0;
  int realization = 0;
  int iterations = 0;
  bool converged = false;
  double sum_rate = 0.0;
  std::int64_t bytes_exchanged = 0;
  std::int64_t scalars_per_iteration = 0;
  double wall_ms = 0.0;
};

RunResult run_experiment(const World& world, ExperimentMode mode, double pmax_dbm);

struct CurvePoint {
  ExperimentMode mode = ExperimentMode::kRobust;
  double pmax_dbm = 0.0;
  double mean_rate = 0.0;
  double stderr_rate = 0.0;
  int n = 0;
};

struct SweepResult {
  std::vector<RunResult> runs;  // ordered mode, P_max, realization
  std::vector<CurvePoint> curves;
};

/// Runs every mode x P_max x realization on a worker pool.
SweepResult run_sweep(const ScenarioConfig& config);

std::vector<CurvePoint> summarize(const std::vector<RunResult>& runs);

inline constexpr const char* kCsvHeader =
    "mode,seed,pmax_dbm,realization,iterations,sum_rate_bps_hz,bytes_exchanged,wall_ms";

std::string to_csv(const std::vector<RunResult>& runs);
nlohmann::json to_summary_json(const ScenarioConfig& config, const std::vector<CurvePoint>& curves);

/// run_sweep, then writes results.csv and summary.json into `out_dir`.
SweepResult sweep_and_export(const ScenarioConfig& config, const std::filesystem::path& out_dir);

}  // namespace ppwdma
