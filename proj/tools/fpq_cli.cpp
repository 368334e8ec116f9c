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

// Command-line front end: run, compare, sweep and validate experiments.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fpq/errors.hpp"
#include "fpq/harness.hpp"

namespace {

struct Source {
  std::string config;
  std::string preset;
};

fpq::ExperimentConfig load(const Source& src, const char* what) {
  if (!src.config.empty() && !src.preset.empty())
    throw fpq::ValidationError(std::string(what) + ": give either a config path or a preset, not both");
  if (!src.config.empty()) return fpq::load_config(src.config);
  if (!src.preset.empty()) return fpq::load_preset(src.preset);
  throw fpq::ValidationError(std::string(what) + ": a config path or a preset is required");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw fpq::ValidationError("cannot write " + path.string());
  return out;
}

// "name=v1,v2,v3"
fpq::SweepAxis parse_sweep_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw fpq::ValidationError("--param expects name=v1,v2,...; got '" + text + "'");
  fpq::SweepAxis axis{text.substr(0, eq), {}};
  std::stringstream values(text.substr(eq + 1));
  std::string item;
  while (std::getline(values, item, ',')) {
    try {
      std::size_t used = 0;
      axis.values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw fpq::ValidationError("--param " + axis.parameter + ": '" + item + "' is not a number");
    }
  }
  return axis;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fokker-Planck master equations with emulated quantum integrators"};
  app.require_subcommand(1);

  Source src;
  Source other;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> params;
  std::string table = "grid";
  double block_dt = 0.01;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", src.config, "experiment config (JSON)");
    sub->add_option("--preset", src.preset, "preset name: exp1, exp2, exp3 or exp4");
    sub->add_option("--out", out_dir, "output directory (default: the config's output.dir)");
    sub->add_option("--seed", seed, "override solver.seed");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment and write trajectory, moments and solver log CSVs");
  add_common(run);

  CLI::App* compare = app.add_subcommand("compare", "compare two experiments snapshot by snapshot");
  add_common(compare);
  compare->add_option("--against", other.config, "second config (JSON)");
  compare->add_option("--against-preset", other.preset, "second preset");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweeps against the classical expm reference");
  add_common(sweep);
  sweep->add_option("--param", params, "model parameter values, name=v1,v2,... (repeatable; cartesian product)");
  sweep->add_option("--table", table, "grid (default), trace-distance (1D six-group table) or variance (2D curves)")
      ->check(CLI::IsMember({"grid", "trace-distance", "variance"}));
  sweep->add_option("--block-dt", block_dt, "block-encoded Euler step for the variance curves");

  CLI::App* validate = app.add_subcommand("validate", "print the generator validation report");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    fpq::ExperimentConfig cfg = load(src, "config");
    if (seed) cfg.solver.seed = *seed;
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(out_dir);

    if (*run) {
      const fpq::RunResult res = fpq::run_experiment(cfg);
      fpq::write_run_outputs(res, dir);
      std::cout << "wrote " << res.trajectory.size() << " snapshots to " << dir.string() << '\n';
      for (const auto& w : res.warnings) std::cout << "warning: " << w << '\n';
    } else if (*compare) {
      fpq::ExperimentConfig cfg_b = load(other, "against");
      if (seed) cfg_b.solver.seed = *seed;
      const fpq::ComparisonReport report = fpq::compare_runs(fpq::run_experiment(cfg), fpq::run_experiment(cfg_b));
      auto out = open_out(dir / "comparison.csv");
      fpq::write_report_csv(report, out);
      std::cout << fpq::report_summary(report);
    } else if (*sweep) {
      if (table == "trace-distance") {
        const auto rows = fpq::trace_distance_table(cfg);
        auto out = open_out(dir / "trace_distance_table.csv");
        fpq::write_trace_distance_csv(rows, out);
        fpq::write_trace_distance_csv(rows, std::cout);
      } else if (table == "variance") {
        const auto curves = fpq::variance_curves(cfg, block_dt);
        auto out = open_out(dir / "variance_curves.csv");
        fpq::write_variance_csv(curves, out);
        std::cout << "wrote " << curves.size() << " variance groups to " << (dir / "variance_curves.csv").string() << '\n';
      } else {
        std::vector<fpq::SweepAxis> axes;
        for (const auto& p : params) axes.push_back(parse_sweep_axis(p));
        const auto cells = fpq::run_sweep(cfg, axes);
        auto out = open_out(dir / "sweep.csv");
        fpq::write_sweep_csv(cells, out);
        fpq::write_sweep_csv(cells, std::cout);
      }
    } else if (*validate) {
      const fpq::Problem pr = fpq::build_problem(cfg);
      const fpq::ValidationReport rep = fpq::validate_generator(pr.generator);
      std::cout << "generator " << pr.generator.dim() << " x " << pr.generator.dim() << " ("
                << fpq::to_string(pr.generator.scheme) << ", " << fpq::to_string(pr.generator.bc.kind) << ")\n"
                << "  max |column sum|      " << rep.max_abs_column_sum << '\n'
                << "  max |entry|           " << rep.max_abs_entry << '\n'
                << "  min off-diagonal      " << rep.min_off_diagonal << '\n'
                << "  negative off-diagonal " << rep.negative_off_diagonals << '\n'
                << "  max column sparsity   " << rep.max_column_sparsity << '\n';
      if (rep.spectral_abscissa) std::cout << "  spectral abscissa     " << *rep.spectral_abscissa << '\n';
      else std::cout << "  spectral abscissa     (skipped, dimension above dense limit)\n";
      const auto bounds = fpq::mesh_bound(pr.field);
      for (std::size_t a = 0; a < bounds.size(); ++a)
        std::cout << "  mesh bound " << pr.grid.axis(a).name << "          " << bounds[a] << " (spacing "
                  << pr.grid.axis(a).spacing() << ")\n";
    }
  } catch (const fpq::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fpq::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
