// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_HARNESS_HPP
#define HMLENS_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hmlens/scenario_io.hpp"
#include "hmlens/toy.hpp"

namespace hmlens
{

enum class ExperimentKind
{
  scheme1_2d_quasistatic,
  scheme1_2d_k,
  scheme1_3d_k,
  scheme2_quasistatic,
  scheme2_k,
  toy,
  homogenize,
  validate_oracle,
  instability
};

const char *to_string(ExperimentKind kind);
// Throws ConfigError on an unknown name.
ExperimentKind experiment_kind_from_string(const std::string &name, const std::string &path = "/kind");
bool is_superlens_kind(ExperimentKind kind);

// Every asserted tolerance in one place; acceptance tests and the CLI read the same values.
struct Tolerances
{
  std::string profile = "default";
  double superlens_slope_min = 0.8;
  double superlens_final_max = 1e-2;
  double gluing = 1e-10;
  double transmission = 1e-8;
  double lens_energy = 1e-10;
  double periodicity = 1e-10;
  double reflection_constructed = 1e-12;
  double power_balance = 1e-8;
  double flux_continuity = 1e-12;
  double toy_shift = 1e-2;
  double toy_energy = 1e-10;
  double toy_stitch = 1e-8;
  double toy_fd_modal = 1e-2;
  double instability_growth_min = 10.0;
  double tuned_max_min = 2.0;
  double oracle_l2 = 1e-2;
  double oracle_order_min = 1.5;
  double oracle_leakage = 1e-6;
  double closed_form = 1e-12;
  double limit_tensor = 1e-12;
  double extrapolated_limit = 1e-4;
  double remainder_slope_min = 1.9;
  double monotone_jitter = 1.1;
  double h1_bound_ratio = 1.5;
  double flux_gradient_ratio = 1.0;
  double homogenized_identity = 1e-10;

  // "default" or "relaxed" (every bound loosened by 10x, rate floors by 20%).
  static Tolerances from_profile(const std::string &name);
  json to_json() const;
};

struct OracleLevel
{
  double h = 1.0 / 32.0;
  int n_theta = 32;
};

struct ExperimentConfig
{
  ExperimentKind kind = ExperimentKind::scheme2_quasistatic;
  ScenarioSpec scenario;
  RingSource source;
  double grid_h = 0.0;  // 0 selects default_grid_spacing
  int n_max = 32;
  std::vector<double> deltas;
  std::vector<double> epsilons;
  std::vector<int> modes;
  std::vector<double> closed_form_deltas;
  std::vector<OracleLevel> oracle_levels;
  int random_points = 100;
  ToyConfig toy;
  Complex toy_a = 1.0;  // scalar toy coefficient in R_l and R_r
  double control_T = 2.0 * kPi;
  ToyBasis control_basis = ToyBasis::sine;
  std::uint64_t seed = 20240601;
  std::string tolerance_profile = "default";
  bool write_fields = true;
  int n_theta_dump = 64;
  int radial_stride = 4;
};

json config_to_json(const ExperimentConfig &c);
// Parses and validates; throws ConfigError with the path of the offending entry.
ExperimentConfig config_from_json(const json &j);
void validate_config(const ExperimentConfig &c);

// FNV-1a 64 of the canonical JSON dump.
std::uint64_t config_hash(const json &canonical);

ExperimentConfig preset(ExperimentKind kind);

struct RunOptions
{
  std::string out_dir;  // empty: no artifacts written
  int threads = 1;
  std::optional<std::string> tolerance_profile;  // overrides the config's profile
};

struct RunResult
{
  json report;
  bool pass = false;
  std::vector<std::string> artifacts;
};

// Runs the pipeline of the config's kind. Config errors throw ConfigError (or DomainError
// for scenario preconditions), solver failures SolverError.
RunResult run_experiment(const ExperimentConfig &cfg, const RunOptions &opts);

enum ExitCode : int
{
  exit_pass = 0,
  exit_invariant_failure = 1,
  exit_config_error = 2,
  exit_solver_failure = 3
};

}  // namespace hmlens

#endif  // HMLENS_HARNESS_HPP
