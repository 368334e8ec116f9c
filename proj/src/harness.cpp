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

#include "fpq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "fpq/errors.hpp"
#include "fpq/lcu.hpp"

#ifndef FPQ_PRESET_DIR
#define FPQ_PRESET_DIR "presets"
#endif

namespace fpq {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

void reject_unknown(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) field_error(field, "must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!keys.count(item.key())) field_error(field.empty() ? item.key() : field + "." + item.key(), "unknown key");
}

std::string join(const std::string& field, const std::string& key) { return field.empty() ? key : field + "." + key; }

double get_number(const json& j, const std::string& field, const std::string& key, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    field_error(join(field, key), "missing");
  }
  const json& v = j.at(key);
  if (!v.is_number()) field_error(join(field, key), "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) field_error(join(field, key), "must be finite");
  return x;
}

int get_int(const json& j, const std::string& field, const std::string& key, std::optional<int> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    field_error(join(field, key), "missing");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer()) field_error(join(field, key), "must be an integer");
  return v.get<int>();
}

std::string get_string(const json& j, const std::string& field, const std::string& key,
                       std::optional<std::string> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    field_error(join(field, key), "missing");
  }
  const json& v = j.at(key);
  if (!v.is_string()) field_error(join(field, key), "must be a string");
  return v.get<std::string>();
}

std::vector<double> get_vector(const json& j, const std::string& field, const std::string& key) {
  if (!j.contains(key)) field_error(join(field, key), "missing");
  const json& v = j.at(key);
  if (!v.is_array()) field_error(join(field, key), "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) field_error(join(field, key), "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

template <typename Parse>
auto parse_field(const std::string& field, const std::string& text, Parse parse) {
  try {
    return parse(text);
  } catch (const ValidationError& e) {
    field_error(field, e.what());
  }
}

std::string recovery_name(SchrodOptions::RecoveryStart r) {
  return r == SchrodOptions::RecoveryStart::spectral ? "spectral" : "zero";
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

Trajectory subsample(const Trajectory& full, int every) {
  if (every <= 1) return full;
  Trajectory out;
  out.metadata = full.metadata;
  for (std::size_t i = 0; i < full.size(); i += static_cast<std::size_t>(every))
    out.push(full.times[i], full.states[i], full.l1_drift[i], full.min_entry[i]);
  return out;
}

std::vector<double> snapshot_times(const ExperimentConfig& c) {
  std::vector<double> t;
  for (int m = 0; m <= c.solver.n_steps; m += c.record_every) t.push_back(static_cast<double>(m) * c.solver.dt);
  return t;
}

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::classical_expm: return "classical_expm";
    case SolverKind::classical_euler: return "classical_euler";
    case SolverKind::q_block: return "q_block";
    case SolverKind::q_lcu: return "q_lcu";
    case SolverKind::q_schrod: return "q_schrod";
    case SolverKind::sde_mc: return "sde_mc";
  }
  return "unknown";
}

SolverKind parse_solver(const std::string& name) {
  for (auto k : {SolverKind::classical_expm, SolverKind::classical_euler, SolverKind::q_block, SolverKind::q_lcu,
                 SolverKind::q_schrod, SolverKind::sde_mc})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown solver '" + name +
                        "' (expected classical_expm, classical_euler, q_block, q_lcu, q_schrod or sde_mc)");
}

json ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["model"] = {{"name", model_name}, {"params", model_params}};
  j["grid"] = json::array();
  for (const auto& a : axes) j["grid"].push_back({{"name", a.name}, {"min", a.x_min}, {"max", a.x_max}, {"points", a.n_points}});
  j["scheme"] = to_string(scheme);
  j["boundary"] = {{"kind", to_string(boundary.kind)}, {"rate", boundary.aux_rate}};
  j["solver"] = {{"name", to_string(solver.kind)},
                 {"dt", solver.dt},
                 {"n_steps", solver.n_steps},
                 {"encoding", to_string(solver.encoding)},
                 {"eta_max", solver.eta_max},
                 {"d_eta", solver.d_eta},
                 {"recovery_start", recovery_name(solver.recovery_start)},
                 {"restart_step", solver.restart_step},
                 {"n_samples", solver.n_samples},
                 {"seed", solver.seed},
                 {"mc_dt", solver.mc_dt}};
  json ic;
  switch (initial.kind) {
    case InitialCondition::Kind::delta: ic = {{"kind", "delta"}, {"point", initial.point}}; break;
    case InitialCondition::Kind::gaussian:
      ic = {{"kind", "gaussian"}, {"center", initial.point}, {"width", initial.width}};
      break;
    case InitialCondition::Kind::file: ic = {{"kind", "file"}, {"path", initial.path}}; break;
  }
  j["initial"] = ic;
  j["output"] = {{"dir", output_dir}, {"record_every", record_every}};
  return j;
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, "", {"name", "model", "grid", "scheme", "boundary", "solver", "initial", "output", "description"});
  ExperimentConfig c;
  c.name = get_string(j, "", "name", std::string("experiment"));

  if (!j.contains("model")) field_error("model", "missing");
  const json& m = j.at("model");
  reject_unknown(m, "model", {"name", "params"});
  c.model_name = get_string(m, "model", "name");
  if (m.contains("params")) {
    const json& p = m.at("params");
    if (!p.is_object()) field_error("model.params", "must be an object");
    for (const auto& item : p.items()) c.model_params[item.key()] = get_number(p, "model.params", item.key());
  }
  try {
    (void)make_builtin_model(c.model_name, c.model_params);
  } catch (const ValidationError& e) {
    field_error("model", e.what());
  }

  if (!j.contains("grid") || !j.at("grid").is_array() || j.at("grid").empty())
    field_error("grid", "must be a nonempty array of axes");
  for (std::size_t i = 0; i < j.at("grid").size(); ++i) {
    const json& a = j.at("grid")[i];
    const std::string f = "grid[" + std::to_string(i) + "]";
    reject_unknown(a, f, {"name", "min", "max", "points"});
    Axis axis{get_string(a, f, "name", std::string(i == 0 ? "x" : i == 1 ? "y" : "x" + std::to_string(i))),
              get_number(a, f, "min"), get_number(a, f, "max"), get_int(a, f, "points")};
    try {
      axis.validate();
    } catch (const ValidationError& e) {
      field_error(f, e.what());
    }
    c.axes.push_back(axis);
  }

  c.scheme = parse_field("scheme", get_string(j, "", "scheme", std::string("rates")), parse_scheme);

  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    reject_unknown(b, "boundary", {"kind", "rate"});
    c.boundary.kind = parse_field("boundary.kind", get_string(b, "boundary", "kind"), parse_boundary_kind);
    c.boundary.aux_rate = get_number(b, "boundary", "rate", 0.0);
    if (c.boundary.has_auxiliary() && !(c.boundary.aux_rate > 0.0)) field_error("boundary.rate", "must be > 0 for sink/source");
  }

  if (!j.contains("solver")) field_error("solver", "missing");
  const json& s = j.at("solver");
  reject_unknown(s, "solver", {"name", "dt", "n_steps", "encoding", "eta_max", "d_eta", "recovery_start", "restart_step",
                               "n_samples", "seed", "mc_dt"});
  SolverSettings& sv = c.solver;
  sv.kind = parse_field("solver.name", get_string(s, "solver", "name"), parse_solver);
  sv.dt = get_number(s, "solver", "dt", sv.dt);
  if (!(sv.dt > 0.0)) field_error("solver.dt", "must be > 0");
  sv.n_steps = get_int(s, "solver", "n_steps", sv.n_steps);
  if (sv.n_steps < 0) field_error("solver.n_steps", "must be >= 0");
  sv.encoding = parse_field("solver.encoding", get_string(s, "solver", "encoding", std::string("automatic")),
                            parse_encoding_mode);
  sv.eta_max = get_number(s, "solver", "eta_max", sv.eta_max);
  sv.d_eta = get_number(s, "solver", "d_eta", sv.d_eta);
  if (sv.kind == SolverKind::q_schrod) {
    try {
      (void)FourierRegister::make(sv.eta_max, sv.d_eta);
    } catch (const ValidationError& e) {
      field_error("solver.eta_max/d_eta", e.what());
    }
  }
  const std::string rs = get_string(s, "solver", "recovery_start", std::string("spectral"));
  if (rs == "spectral") sv.recovery_start = SchrodOptions::RecoveryStart::spectral;
  else if (rs == "zero") sv.recovery_start = SchrodOptions::RecoveryStart::zero;
  else field_error("solver.recovery_start", "expected 'spectral' or 'zero'");
  sv.restart_step = get_number(s, "solver", "restart_step", sv.restart_step);
  if (sv.restart_step < 0.0) field_error("solver.restart_step", "must be >= 0");
  const int n_samples = get_int(s, "solver", "n_samples", static_cast<int>(sv.n_samples));
  if (n_samples <= 0) field_error("solver.n_samples", "must be > 0");
  sv.n_samples = static_cast<std::size_t>(n_samples);
  if (s.contains("seed")) {
    const auto& seed = s.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      field_error("solver.seed", "must be a nonnegative integer");
    }
    sv.seed = s.at("seed").get<std::uint64_t>();
  }
  sv.mc_dt = get_number(s, "solver", "mc_dt", sv.mc_dt);
  if (!(sv.mc_dt > 0.0)) field_error("solver.mc_dt", "must be > 0");

  if (!j.contains("initial")) field_error("initial", "missing");
  const json& ic = j.at("initial");
  reject_unknown(ic, "initial", {"kind", "point", "center", "width", "path"});
  const std::string kind = get_string(ic, "initial", "kind");
  if (kind == "delta") {
    c.initial.kind = InitialCondition::Kind::delta;
    c.initial.point = get_vector(ic, "initial", "point");
  } else if (kind == "gaussian") {
    c.initial.kind = InitialCondition::Kind::gaussian;
    c.initial.point = get_vector(ic, "initial", "center");
    c.initial.width = get_number(ic, "initial", "width");
    if (!(c.initial.width > 0.0)) field_error("initial.width", "must be > 0");
  } else if (kind == "file") {
    c.initial.kind = InitialCondition::Kind::file;
    c.initial.path = get_string(ic, "initial", "path");
  } else {
    field_error("initial.kind", "expected delta, gaussian or file");
  }
  if (c.initial.kind != InitialCondition::Kind::file && c.initial.point.size() != c.axes.size())
    field_error("initial", "point has " + std::to_string(c.initial.point.size()) + " coordinates, grid has " +
                               std::to_string(c.axes.size()) + " axes");

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"dir", "record_every"});
    c.output_dir = get_string(o, "output", "dir", c.output_dir);
    c.record_every = get_int(o, "output", "record_every", 1);
  }
  if (c.record_every < 1) field_error("output.record_every", "must be >= 1");
  if (c.solver.n_steps % c.record_every != 0) field_error("output.record_every", "must divide solver.n_steps");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  ExperimentConfig c = parse_config(j);
  // Relative initial-state files resolve against the config's directory.
  if (c.initial.kind == InitialCondition::Kind::file && std::filesystem::path(c.initial.path).is_relative())
    c.initial.path = (path.parent_path() / c.initial.path).string();
  return c;
}

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("FPQ_PRESET_DIR")) return env;
  return FPQ_PRESET_DIR;
}

std::vector<std::string> preset_names() { return {"exp1", "exp2", "exp3", "exp4"}; }

ExperimentConfig load_preset(const std::string& name) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ValidationError("unknown preset '" + name + "' (available: exp1, exp2, exp3, exp4)");
  return load_config(preset_directory() / (name + ".json"));
}

ProbVector make_initial(const InitialCondition& ic, const Grid& grid, bool auxiliary_site) {
  const std::size_t n = grid.total_points();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + (auxiliary_site ? 1 : 0)));
  switch (ic.kind) {
    case InitialCondition::Kind::delta:
      p[static_cast<Eigen::Index>(grid.nearest_index(ic.point))] = 1.0;
      break;
    case InitialCondition::Kind::gaussian:
      for (std::size_t k = 0; k < n; ++k) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < grid.dimension(); ++a) {
          const double d = grid.coordinate(k, a) - ic.point[a];
          r2 += d * d;
        }
        p[static_cast<Eigen::Index>(k)] = std::exp(-r2 / (2.0 * ic.width * ic.width));
      }
      break;
    case InitialCondition::Kind::file: {
      std::ifstream in(ic.path);
      if (!in) throw ValidationError("initial.path: cannot open " + ic.path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      std::replace(text.begin(), text.end(), ',', ' ');
      std::istringstream values(text);
      std::vector<double> v;
      double x = 0.0;
      while (values >> x) v.push_back(x);
      if (v.size() != static_cast<std::size_t>(p.size()))
        throw ValidationError("initial.path: expected " + std::to_string(p.size()) + " values, found " +
                              std::to_string(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
      break;
    }
  }
  return ProbVector::normalized(p);
}

Problem build_problem(const ExperimentConfig& config) {
  Problem pr{make_builtin_model(config.model_name, config.model_params), build_grid(config.axes), {}, {}, {}};
  pr.field = eval_coefficients(pr.model, pr.grid);
  pr.generator = assemble_generator(pr.field, config.scheme, config.boundary);
  pr.p0 = make_initial(config.initial, pr.grid, pr.generator.has_auxiliary());
  return pr;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const Problem pr = build_problem(config);
  RunResult res;
  res.config = config;
  res.grid = pr.grid;
  const SolverSettings& sv = config.solver;
  const std::vector<double> times = snapshot_times(config);

  const std::vector<double> bounds = mesh_bound(pr.field);
  for (std::size_t a = 0; a < bounds.size(); ++a)
    if (config.scheme == Scheme::finite_difference && pr.grid.axis(a).spacing() > bounds[a])
      res.warnings.push_back("mesh bound violated on axis " + pr.grid.axis(a).name + ": spacing " +
                             fmt(pr.grid.axis(a).spacing()) + " > " + fmt(bounds[a]));
  if (!pr.generator.warnings.empty())
    res.warnings.push_back(std::to_string(pr.generator.warnings.size()) + " negative off-diagonal generator entries");

  switch (sv.kind) {
    case SolverKind::classical_expm:
      res.trajectory = expm_propagate(pr.generator, pr.p0, times);
      break;
    case SolverKind::classical_euler:
      res.trajectory = subsample(euler_propagate(pr.generator, pr.p0, sv.dt, sv.n_steps), config.record_every);
      break;
    case SolverKind::q_block:
    case SolverKind::q_lcu: {
      QuantumRun q = sv.kind == SolverKind::q_block ? run_block_euler(pr.generator, pr.p0, sv.dt, sv.n_steps, sv.encoding)
                                                    : run_lcu(pr.generator, pr.p0, sv.dt, sv.n_steps);
      res.trajectory = subsample(q.trajectory, config.record_every);
      res.step_log = std::move(q.log);
      res.cumulative_success = q.cumulative_success;
      res.expected_calls = q.expected_calls;
      break;
    }
    case SolverKind::q_schrod: {
      const FourierRegister reg = FourierRegister::make(sv.eta_max, sv.d_eta);
      SchrodOptions opt;
      opt.recovery_start = sv.recovery_start;
      opt.step = sv.restart_step;
      SchrodRun s = schrod_propagate(pr.generator, pr.p0, reg, times, opt);
      res.trajectory = s.trajectory;
      const auto flagged = std::count(s.aliasing_flags.begin(), s.aliasing_flags.end(), true);
      if (flagged > 0)
        res.warnings.push_back(std::to_string(flagged) + " snapshots with recovered entries below -1e-3 (aliasing/truncation)");
      res.schrod = std::move(s);
      break;
    }
    case SolverKind::sde_mc: {
      MonteCarloOptions mc;
      mc.dt = sv.mc_dt;
      const double horizon = static_cast<double>(sv.n_steps) * sv.dt;
      mc.n_steps = static_cast<int>(std::llround(horizon / sv.mc_dt));
      mc.n_samples = sv.n_samples;
      mc.seed = sv.seed;
      if (pr.generator.has_auxiliary()) throw ValidationError("solver.name: sde_mc supports conserving boundaries only");
      res.trajectory.metadata["solver"] = "sde_mc";
      res.trajectory.push(0.0, pr.p0);
      if (sv.n_steps > 0) res.trajectory.push(horizon, sde_monte_carlo(pr.model, pr.grid, pr.p0, mc));
      break;
    }
  }
  for (std::size_t i = 0; i < res.trajectory.size(); ++i)
    if (res.trajectory.min_entry[i] < -1e-12) {
      res.warnings.push_back("negative entries clamped (min " + fmt(*std::min_element(res.trajectory.min_entry.begin(),
                                                                                     res.trajectory.min_entry.end())) +
                             ")");
      break;
    }
  res.trajectory.metadata["config"] = config.name;
  res.moments = moment_series(res.trajectory, res.grid);
  return res;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw ValidationError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("trajectory.csv");
    write_trajectory_csv(result.trajectory, out);
  }
  {
    auto out = open("moments.csv");
    write_moments_csv(result.moments, result.grid, out);
  }
  {
    auto out = open("solver_log.csv");
    if (!result.step_log.empty()) {
      write_step_log_csv(result.step_log, result.config.solver.kind == SolverKind::q_lcu, out);
    } else if (result.schrod) {
      out << "time,raw_min_entry,aliasing_flag,l1_drift\n" << std::setprecision(17);
      for (std::size_t i = 0; i < result.trajectory.size(); ++i)
        out << result.trajectory.times[i] << ',' << result.schrod->raw_min_entry[i] << ','
            << (result.schrod->aliasing_flags[i] ? 1 : 0) << ',' << result.trajectory.l1_drift[i] << '\n';
    } else {
      out << "time,l1_drift,min_entry\n" << std::setprecision(17);
      for (std::size_t i = 0; i < result.trajectory.size(); ++i)
        out << result.trajectory.times[i] << ',' << result.trajectory.l1_drift[i] << ',' << result.trajectory.min_entry[i]
            << '\n';
    }
  }
  if (result.schrod) {
    auto out = open("eta_norms.csv");
    const FourierRegister reg = FourierRegister::make(result.config.solver.eta_max, result.config.solver.d_eta);
    out << "eta,norm\n" << std::setprecision(17);
    for (std::size_t k = 0; k < result.schrod->eta_norms.size(); ++k)
      out << reg.eta[reg.zero_index() + k] << ',' << result.schrod->eta_norms[k] << '\n';
  }
  {
    auto out = open("summary.json");
    json s;
    s["config"] = result.config.to_json();
    s["snapshots"] = result.trajectory.size();
    s["cumulative_success"] = result.cumulative_success;
    s["expected_calls"] = result.expected_calls;
    s["warnings"] = result.warnings;
    s["metadata"] = result.trajectory.metadata;
    out << s.dump(2) << '\n';
  }
}

double ComparisonReport::max_l1() const { return l1.empty() ? 0.0 : *std::max_element(l1.begin(), l1.end()); }
double ComparisonReport::max_mean_gap() const {
  return mean_gap.empty() ? 0.0 : *std::max_element(mean_gap.begin(), mean_gap.end());
}
double ComparisonReport::max_var_gap() const {
  return var_gap.empty() ? 0.0 : *std::max_element(var_gap.begin(), var_gap.end());
}

ComparisonReport compare_runs(const RunResult& a, const RunResult& b) {
  if (!(a.grid == b.grid)) throw ValidationError("compare: the two runs use different grids");
  if (a.trajectory.size() != b.trajectory.size())
    throw ValidationError("compare: snapshot counts differ (" + std::to_string(a.trajectory.size()) + " vs " +
                          std::to_string(b.trajectory.size()) + ")");
  ComparisonReport r;
  r.label_a = a.config.name + ":" + to_string(a.config.solver.kind);
  r.label_b = b.config.name + ":" + to_string(b.config.solver.kind);
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    const double t = a.trajectory.times[i];
    if (std::abs(t - b.trajectory.times[i]) > 1e-12)
      throw ValidationError("compare: snapshot times differ at index " + std::to_string(i));
    r.times.push_back(t);
    r.l1.push_back(trace_distance(a.trajectory.states[i], b.trajectory.states[i]));
    r.mean_gap.push_back((a.moments[i].mean - b.moments[i].mean).norm());
    r.var_gap.push_back((a.moments[i].variance - b.moments[i].variance).cwiseAbs().maxCoeff());
  }
  r.success_a = a.cumulative_success;
  r.success_b = b.cumulative_success;
  r.expected_calls_a = a.expected_calls;
  r.expected_calls_b = b.expected_calls;
  for (const auto& w : a.warnings) r.warnings.push_back(r.label_a + ": " + w);
  for (const auto& w : b.warnings) r.warnings.push_back(r.label_b + ": " + w);
  return r;
}

void write_report_csv(const ComparisonReport& report, std::ostream& out) {
  out << "time,l1,mean_gap,var_gap\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < report.times.size(); ++i)
    out << report.times[i] << ',' << report.l1[i] << ',' << report.mean_gap[i] << ',' << report.var_gap[i] << '\n';
  out.precision(old);
}

std::string report_summary(const ComparisonReport& report) {
  std::ostringstream s;
  s << std::setprecision(6);
  s << "compare " << report.label_a << " vs " << report.label_b << '\n';
  s << "  snapshots        " << report.times.size() << '\n';
  s << "  max L1           " << report.max_l1() << '\n';
  s << "  final L1         " << (report.l1.empty() ? 0.0 : report.l1.back()) << '\n';
  s << "  max mean gap     " << report.max_mean_gap() << '\n';
  s << "  max variance gap " << report.max_var_gap() << '\n';
  s << "  success a / b    " << report.success_a << " / " << report.success_b << '\n';
  s << "  expected calls   " << report.expected_calls_a << " / " << report.expected_calls_b << '\n';
  for (const auto& w : report.warnings) s << "  warning: " << w << '\n';
  return s.str();
}

ExperimentConfig reference_config(const ExperimentConfig& config) {
  ExperimentConfig ref = config;
  ref.solver.kind = SolverKind::classical_expm;
  ref.name = config.name + "-reference";
  return ref;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<SweepCell> run_sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes) {
  std::vector<SweepCell> cells(1);
  for (const auto& axis : axes) {
    if (axis.values.empty()) throw ValidationError("sweep parameter '" + axis.parameter + "' has no values");
    std::vector<SweepCell> next;
    for (const auto& cell : cells)
      for (double v : axis.values) {
        SweepCell c = cell;
        c.parameters[axis.parameter] = v;
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  }
  parallel_for(cells.size(), [&](std::size_t i) {
    SweepCell& cell = cells[i];
    try {
      ExperimentConfig cfg = base;
      for (const auto& [k, v] : cell.parameters) cfg.model_params[k] = v;
      const RunResult run = run_experiment(cfg);
      const RunResult ref = run_experiment(reference_config(cfg));
      cell.report = compare_runs(run, ref);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out) {
  std::vector<std::string> names;
  if (!cells.empty())
    for (const auto& [k, v] : cells.front().parameters) names.push_back(k);
  for (const auto& n : names) out << n << ',';
  out << "max_l1,final_l1,max_mean_gap,max_var_gap,success,expected_calls,error\n";
  const auto old = out.precision(17);
  for (const auto& c : cells) {
    for (const auto& n : names) out << c.parameters.at(n) << ',';
    if (c.report) {
      const auto& r = *c.report;
      out << r.max_l1() << ',' << (r.l1.empty() ? 0.0 : r.l1.back()) << ',' << r.max_mean_gap() << ',' << r.max_var_gap()
          << ',' << r.success_a << ',' << r.expected_calls_a << ",\n";
    } else {
      std::string err = c.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      out << ",,,,,," << err << '\n';
    }
  }
  out.precision(old);
}

std::vector<TraceDistanceRow> trace_distance_table(const ExperimentConfig& base_1d) {
  if (base_1d.model_name != "double_well_1d") throw ValidationError("trace-distance table needs a double_well_1d config");
  struct Group {
    const char* name;
    double kappa;
    double diffusion;
  };
  const Group groups[] = {{"I", 0.3, 0.15}, {"II", 0.4, 0.15}, {"III", 0.5, 0.15},
                          {"IV", 0.5, 0.12}, {"V", 0.5, 0.15}, {"VI", 0.5, 0.18}};
  std::vector<TraceDistanceRow> rows(std::size(groups));
  parallel_for(rows.size(), [&](std::size_t i) {
    ExperimentConfig cfg = base_1d;
    cfg.model_params["kappa"] = groups[i].kappa;
    cfg.model_params["D"] = groups[i].diffusion;
    cfg.solver.dt = 0.1;
    cfg.solver.n_steps = 40;
    cfg.record_every = 40;
    const Problem pr = build_problem(cfg);
    const ProbVector analytic = steady_state_1d(groups[i].kappa, groups[i].diffusion, pr.grid);

    ExperimentConfig block = cfg;
    block.solver.kind = SolverKind::q_block;
    ExperimentConfig schrod = cfg;
    schrod.solver.kind = SolverKind::q_schrod;
    if (base_1d.solver.kind != SolverKind::q_schrod) {
      schrod.solver.eta_max = 10.0;
      schrod.solver.d_eta = 0.01;
      schrod.solver.recovery_start = SchrodOptions::RecoveryStart::spectral;
    }
    schrod.solver.restart_step = 0.1;
    const Trajectory euler = euler_propagate(pr.generator, pr.p0, 0.1, 40);

    TraceDistanceRow& row = rows[i];
    row.group = groups[i].name;
    row.kappa = groups[i].kappa;
    row.diffusion = groups[i].diffusion;
    row.as = trace_distance(run_experiment(schrod).trajectory.states.back(), analytic);
    row.af = trace_distance(run_experiment(block).trajectory.states.back(), analytic);
    row.af_classical = trace_distance(euler.states.back(), analytic);
  });
  return rows;
}

void write_trace_distance_csv(const std::vector<TraceDistanceRow>& rows, std::ostream& out) {
  out << "group,kappa,D,AS,AF,AF_classical\n";
  const auto old = out.precision(17);
  for (const auto& r : rows)
    out << r.group << ',' << r.kappa << ',' << r.diffusion << ',' << r.as << ',' << r.af << ',' << r.af_classical << '\n';
  out.precision(old);
}

std::vector<VarianceCurve> variance_curves(const ExperimentConfig& base_2d, double block_dt,
                                           const std::vector<double>& diffusions) {
  if (base_2d.model_name != "spiral_2d") throw ValidationError("variance curves need a spiral_2d config");
  if (!(block_dt > 0.0)) throw ValidationError("block_dt must be > 0");
  const std::vector<double> times = snapshot_times(base_2d);
  const double horizon = times.back();
  const int block_steps = static_cast<int>(std::llround(horizon / block_dt));
  std::vector<int> block_index;
  for (double t : times) {
    const double r = t / block_dt;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
      throw ValidationError("snapshot times must be multiples of block_dt");
    block_index.push_back(static_cast<int>(std::llround(r)));
  }
  static const char* names[] = {"a", "b", "c", "d", "e", "f"};
  std::vector<VarianceCurve> curves(diffusions.size());
  parallel_for(curves.size(), [&](std::size_t i) {
    ExperimentConfig cfg = base_2d;
    cfg.model_params["D"] = diffusions[i];
    const Problem pr = build_problem(cfg);
    VarianceCurve& c = curves[i];
    c.group = i < std::size(names) ? names[i] : std::to_string(i);
    c.diffusion = diffusions[i];
    c.classical = moment_series(expm_propagate(pr.generator, pr.p0, times), pr.grid);
    const QuantumRun q = run_block_euler(pr.generator, pr.p0, block_dt, block_steps, cfg.solver.encoding);
    for (std::size_t j = 0; j < times.size(); ++j)
      c.block.push_back(moments(times[j], q.trajectory.states[static_cast<std::size_t>(block_index[j])], pr.grid));
    SchrodOptions opt;
    opt.recovery_start = cfg.solver.recovery_start;
    opt.step = cfg.solver.restart_step;
    const SchrodRun s =
        schrod_propagate(pr.generator, pr.p0, FourierRegister::make(cfg.solver.eta_max, cfg.solver.d_eta), times, opt);
    c.schrod = moment_series(s.trajectory, pr.grid);
  });
  return curves;
}

void write_variance_csv(const std::vector<VarianceCurve>& curves, std::ostream& out) {
  out << "group,D,time,var_x_classical,var_y_classical,var_x_block,var_y_block,var_x_schrod,var_y_schrod\n";
  const auto old = out.precision(17);
  for (const auto& c : curves)
    for (std::size_t j = 0; j < c.classical.size(); ++j)
      out << c.group << ',' << c.diffusion << ',' << c.classical[j].time << ',' << c.classical[j].variance[0] << ','
          << c.classical[j].variance[1] << ',' << c.block[j].variance[0] << ',' << c.block[j].variance[1] << ','
          << c.schrod[j].variance[0] << ',' << c.schrod[j].variance[1] << '\n';
  out.precision(old);
}

}  // namespace fpq
