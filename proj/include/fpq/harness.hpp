// Copyright 2026 The fpq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpq/block_euler.hpp"
#include "fpq/classical.hpp"
#include "fpq/emulator.hpp"
#include "fpq/generator.hpp"
#include "fpq/grid.hpp"
#include "fpq/model.hpp"
#include "fpq/observables.hpp"
#include "fpq/schrodinger.hpp"

namespace fpq {

enum class SolverKind { classical_expm, classical_euler, q_block, q_lcu, q_schrod, sde_mc };
std::string to_string(SolverKind kind);
SolverKind parse_solver(const std::string& name);

struct InitialCondition {
  enum class Kind { delta, gaussian, file } kind = Kind::delta;
  std::vector<double> point;  // delta target, or Gaussian centre
  double width = 0.0;         // Gaussian standard deviation per axis
  std::string path;           // one value per line, or a trajectory-style CSV row
};

struct SolverSettings {
  SolverKind kind = SolverKind::classical_expm;
  double dt = 0.1;
  int n_steps = 0;
  EncodingMode encoding = EncodingMode::automatic;
  double eta_max = 10.0;
  double d_eta = 0.01;
  SchrodOptions::RecoveryStart recovery_start = SchrodOptions::RecoveryStart::spectral;
  // Register restart interval for q_schrod; 0 means one shot per snapshot.
  double restart_step = 0.0;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
  double mc_dt = 1e-3;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string model_name;
  std::map<std::string, double> model_params;
  std::vector<Axis> axes;
  Scheme scheme = Scheme::rates;
  BoundaryCondition boundary = BoundaryCondition::reflecting();
  SolverSettings solver;
  InitialCondition initial;
  std::string output_dir = "out";
  // Snapshot spacing in steps; every step is recorded when 1.
  int record_every = 1;

  nlohmann::json to_json() const;
};

/// Parses and validates a config. Errors name the offending field, e.g.
/// "solver.dt: must be > 0".
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
std::filesystem::path preset_directory();
ExperimentConfig load_preset(const std::string& name);

struct Problem {
  DriftDiffusionModel model;
  Grid grid;
  CoefficientField field;
  GeneratorMatrix generator;
  ProbVector p0;
};

Problem build_problem(const ExperimentConfig& config);
ProbVector make_initial(const InitialCondition& ic, const Grid& grid, bool auxiliary_site);

struct RunResult {
  ExperimentConfig config;
  Grid grid;
  Trajectory trajectory;
  std::vector<MomentRecord> moments;
  std::vector<StepLogEntry> step_log;  // quantum Euler solvers
  std::optional<SchrodRun> schrod;     // q_schrod diagnostics
  double cumulative_success = 1.0;
  double expected_calls = 0.0;
  std::vector<std::string> warnings;
};

RunResult run_experiment(const ExperimentConfig& config);

/// trajectory.csv, moments.csv, solver_log.csv (+ eta_norms.csv for q_schrod)
/// under `dir`, created if missing.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);

struct ComparisonReport {
  std::string label_a;
  std::string label_b;
  std::vector<double> times;
  std::vector<double> l1;
  std::vector<double> mean_gap;  // Euclidean distance of the means
  std::vector<double> var_gap;   // max over axes of |Var_a - Var_b|
  double success_a = 1.0;
  double success_b = 1.0;
  double expected_calls_a = 0.0;
  double expected_calls_b = 0.0;
  std::vector<std::string> warnings;

  double max_l1() const;
  double max_mean_gap() const;
  double max_var_gap() const;
};

/// Both results must share the grid and the snapshot times (to 1e-12).
ComparisonReport compare_runs(const RunResult& a, const RunResult& b);
void write_report_csv(const ComparisonReport& report, std::ostream& out);
std::string report_summary(const ComparisonReport& report);

// Same config with the solver switched to classical_expm at identical snapshots.
ExperimentConfig reference_config(const ExperimentConfig& config);

struct SweepAxis {
  std::string parameter;  // model parameter name, e.g. "kappa" or "D"
  std::vector<double> values;
};

struct SweepCell {
  std::map<std::string, double> parameters;
  std::optional<ComparisonReport> report;  // run vs classical_expm
  std::string error;
};

/// Cartesian product over the axes; a failing cell records its error and the
/// sweep continues. Cells run concurrently, results keep the product order.
std::vector<SweepCell> run_sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes);
void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out);

struct TraceDistanceRow {
  std::string group;
  double kappa = 0.0;
  double diffusion = 0.0;
  double as = 0.0;            // analytic steady state vs Schrodingerisation
  double af = 0.0;            // analytic steady state vs block-encoded Euler
  double af_classical = 0.0;  // analytic steady state vs classical Euler
};

/// Six groups: D = 0.15 with kappa 0.3, 0.4, 0.5, then kappa = 0.5 with
/// D = 0.12, 0.15, 0.18; 40 steps of 0.1 from the base config's initial state.
std::vector<TraceDistanceRow> trace_distance_table(const ExperimentConfig& base_1d);
void write_trace_distance_csv(const std::vector<TraceDistanceRow>& rows, std::ostream& out);

struct VarianceCurve {
  std::string group;
  double diffusion = 0.0;
  std::vector<MomentRecord> classical;
  std::vector<MomentRecord> block;
  std::vector<MomentRecord> schrod;
};

/// Groups a, b, c with D = 0.25, 0.2, 0.15 on the 2D base config: classical
/// expm, block-encoded Euler (block_dt) and Schrodingerisation, all sampled
/// on the base config's snapshot times.
std::vector<VarianceCurve> variance_curves(const ExperimentConfig& base_2d, double block_dt,
                                           const std::vector<double>& diffusions = {0.25, 0.2, 0.15});
void write_variance_csv(const std::vector<VarianceCurve>& curves, std::ostream& out);

}  // namespace fpq
