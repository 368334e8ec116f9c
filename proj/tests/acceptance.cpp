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


// Acceptance run: one PASS/FAIL line per criterion with the measured value,
// the pinned tolerance and the wall time. Exit status is the failure count.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fpq/block_euler.hpp"
#include "fpq/classical.hpp"
#include "fpq/errors.hpp"
#include "fpq/harness.hpp"
#include "fpq/lcu.hpp"
#include "fpq/observables.hpp"
#include "fpq/schrodinger.hpp"
#include "oracles.hpp"

namespace {

using namespace fpq;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Problem exp1_problem() { return build_problem(load_preset("exp1")); }

double max_snapshot_gap(const Trajectory& a, const Trajectory& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, trace_distance(a.states[i], b.states[i]));
  return gap;
}

EmulatorState state_of(const ProbVector& p) { return EmulatorState::from_probabilities(p); }

Outcome criterion1() {
  const auto pr = exp1_problem();
  const auto q = run_block_euler(pr.generator, pr.p0, 0.1, 40);
  const auto c = euler_propagate(pr.generator, pr.p0, 0.1, 40);
  const double gap = max_snapshot_gap(q.trajectory, c);
  return {gap <= 1e-10 && q.trajectory.size() == 41, fmt("max per-snapshot L1(block, Euler) = %.2e <= 1e-10", gap)};
}

Outcome criterion2() {
  const auto pr = exp1_problem();
  const auto ps = steady_state_1d(0.5, 0.15, pr.grid);
  const auto c = euler_propagate(pr.generator, pr.p0, 0.1, 40);
  const auto q = run_block_euler(pr.generator, pr.p0, 0.1, 40);
  bool pass = true;
  double d10 = 0.0, d40 = 0.0, worst_rise = -1.0;
  for (const Trajectory* t : {&c, &q.trajectory}) {
    std::vector<double> d;
    for (const auto& s : t->states) d.push_back(trace_distance(s, ps));
    d10 = d[10];
    d40 = d[40];
    pass = pass && d40 < d10;
    for (int m = 31; m <= 40; ++m) {
      worst_rise = std::max(worst_rise, d[m] - d[m - 1]);
      pass = pass && d[m] <= d[m - 1] + 1e-6;
    }
  }
  return {pass, fmt("L1 to steady state: step 10 = %.4f, step 40 = %.4f; largest rise over steps 30-40 = %.2e "
                    "(slack 1e-6)",
                    d10, d40, worst_rise)};
}

Outcome criterion3() {
  const auto pr = exp1_problem();
  const Eigen::MatrixXd R = pr.generator.dense();
  std::vector<double> dts{0.1, 0.05, 0.025, 0.0125}, errs;
  for (double dt : dts) {
    const auto out = lcu_step(build_lcu(pr.generator, dt), state_of(pr.p0));
    const auto euler = ProbVector::normalized(pr.p0.values() + dt * R * pr.p0.values());
    errs.push_back(trace_distance(out.state.probabilities(), euler));
  }
  const double order = oracle::log_log_slope(dts, errs);
  const auto lcu = run_lcu(pr.generator, pr.p0, 0.01, 100);
  const auto blk = run_block_euler(pr.generator, pr.p0, 0.01, 100);
  const double gap = max_snapshot_gap(lcu.trajectory, blk.trajectory);
  return {order >= 1.5 && gap <= 1e-3,
          fmt("single-step order = %.3f >= 1.5; max L1(LCU, block) at dt 0.01 x 100 = %.3e <= 1e-3", order, gap)};
}

Outcome criterion4() {
  const auto pr = exp1_problem();
  const Eigen::MatrixXd R = pr.generator.dense();
  const Eigen::VectorXd psi = pr.p0.values() / pr.p0.values().norm();
  const double quad = psi.dot((R + R.transpose()) * psi);
  std::vector<double> res;
  for (double dt : {0.04, 0.02, 0.01, 0.005}) {
    const auto out = block_euler_step(build_block_encoding(pr.generator, dt, EncodingMode::automatic), state_of(pr.p0));
    res.push_back(std::abs(out.branch_norm_sq - 1.0 - dt * quad));
  }
  bool pass = true;
  double rmin = 1e300, rmax = 0.0;
  for (std::size_t i = 0; i + 1 < res.size(); ++i) {
    const double r = res[i] / res[i + 1];
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    pass = pass && std::abs(r - 4.0) <= 1.0;
  }
  // Four octaves where sqrt(dt) |R| << 1.
  std::vector<double> dts{1e-5, 5e-6, 2.5e-6, 1.25e-6, 6.25e-7}, loss;
  for (double dt : dts) loss.push_back(1.0 - lcu_step(build_lcu(pr.generator, dt), state_of(pr.p0)).p_a);
  const double slope = oracle::log_log_slope(dts, loss);
  pass = pass && std::abs(slope - 0.5) <= 0.1;
  return {pass, fmt("block P_suc remainder halving ratios in [%.3f, %.3f] (4 +- 1); LCU slope log(1-p_a) = %.3f "
                    "(0.5 +- 0.1, dt 1e-5..6.25e-7)",
                    rmin, rmax, slope)};
}

Outcome criterion5() {
  // The drift generators of the presets have R + R^T with positive
  // eigenvalues, so the bound is evaluated on contractive generators.
  std::vector<GeneratorMatrix> gens;
  {
    auto cfg = load_preset("exp1");
    const auto pr = build_problem(cfg);
    CoefficientField field = pr.field;
    for (auto& f : field.drift[0]) f = 0.0;
    gens.push_back(assemble_generator(field, Scheme::rates, BoundaryCondition::reflecting()));
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    gens.push_back(generator_from_dense(oracle::random_doubly_conserving(8, seed)));

  bool pass = true;
  double min_eig = 1e300, max_success = 0.0;
  int rejected = 0;
  for (const auto& R : gens) {
    const auto n = static_cast<Eigen::Index>(R.dim());
    const double dt = max_step_size(R);
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) + dt * R.dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd::Identity(n, n) - A.transpose() * A);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const ProbVector p0(oracle::random_probability(static_cast<int>(n), 100 + s));
      const auto run = run_block_euler(R, p0, dt, 40, EncodingMode::strict);
      for (const auto& e : run.log) max_success = std::max(max_success, e.success_prob);
    }
    try {
      (void)build_block_encoding(R, 1.2 * dt, EncodingMode::strict);
    } catch (const NumericalError&) {
      ++rejected;
    }
  }
  pass = min_eig >= -1e-10 && max_success <= 1.0 + 1e-10 && rejected == static_cast<int>(gens.size());
  bool exp1_has_bound = true;
  try {
    (void)max_step_size(exp1_problem().generator);
  } catch (const NumericalError&) {
    exp1_has_bound = false;
  }
  return {pass, fmt("%zu contractive generators: min eig(I - A^T A) = %.2e >= -1e-10, max P_suc = %.12f, "
                    "1.2x bound rejected %d/%zu; exp1 generator has a bound: %s",
                    gens.size(), min_eig, max_success, rejected, gens.size(), exp1_has_bound ? "yes" : "no")};
}

struct SchrodRuns {
  RunResult reference;
  RunResult full;
};

SchrodRuns& exp2_runs() {
  static SchrodRuns runs = [] {
    const auto cfg = load_preset("exp2");
    return SchrodRuns{run_experiment(reference_config(cfg)), run_experiment(cfg)};
  }();
  return runs;
}

Outcome criterion6() {
  auto& runs = exp2_runs();
  const auto full = compare_runs(runs.full, runs.reference);
  auto cfg = load_preset("exp2");
  cfg.solver.eta_max = 5.0;
  const auto truncated = compare_runs(run_experiment(cfg), runs.reference);
  const double max_gap = full.max_mean_gap();
  const double full_final = full.mean_gap.back(), trunc_final = truncated.mean_gap.back();
  return {max_gap <= 0.05 && trunc_final > full_final,
          fmt("max mean gap (eta 10, d_eta 0.01) = %.3e <= 0.05; final gap eta 5 = %.3e > eta 10 = %.3e", max_gap,
              trunc_final, full_final)};
}

Outcome criterion7() {
  auto& runs = exp2_runs();
  const auto fine = compare_runs(runs.full, runs.reference);
  auto cfg = load_preset("exp2");
  cfg.solver.d_eta = 0.1;
  const auto coarse = compare_runs(run_experiment(cfg), runs.reference);
  const double ratio = coarse.mean_gap.back() / fine.mean_gap.back();
  // Growth over the second half: end above midpoint and a positive least-squares trend.
  const std::size_t n = coarse.times.size(), mid = (n - 1) / 2;
  double st = 0, sg = 0, stt = 0, stg = 0;
  const double m = static_cast<double>(n - mid);
  for (std::size_t i = mid; i < n; ++i) {
    st += coarse.times[i];
    sg += coarse.mean_gap[i];
    stt += coarse.times[i] * coarse.times[i];
    stg += coarse.times[i] * coarse.mean_gap[i];
  }
  const double trend = (m * stg - st * sg) / (m * stt - st * st);
  const bool grows = coarse.mean_gap.back() > coarse.mean_gap[mid] && trend > 0.0;
  return {ratio >= 10.0 && grows,
          fmt("final gap d_eta 0.1 / d_eta 0.01 = %.3e / %.3e = %.1f >= 10; gap t=%.1f %.3e -> t=%.1f %.3e, "
              "trend %.2e/unit time",
              coarse.mean_gap.back(), fine.mean_gap.back(), ratio, coarse.times[mid], coarse.mean_gap[mid],
              coarse.times.back(), coarse.mean_gap.back(), trend)};
}

Outcome criterion8() {
  double worst = 0.0, worst_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto R = generator_from_dense(oracle::random_doubly_conserving(4, seed));
    for (double s : {0.1, 0.3, 1.0}) {
      const double r50 = propagator_check(R, 0.5, s, 50.0, 0.002);
      const double r100 = propagator_check(R, 0.5, s, 100.0, 0.002);
      worst = std::max(worst, r50);
      worst_ratio = std::max(worst_ratio, r100 / r50);
    }
  }
  return {worst <= 1e-3 && worst_ratio <= 0.5,
          fmt("max residual (eta_max 50) = %.2e <= 1e-3; max residual ratio eta_max 100/50 = %.3f <= 0.5", worst,
              worst_ratio)};
}

double scheme_gap(int n) {
  const Grid g = build_grid({Axis{"x", -2.0, 2.0, n}});
  const auto field = eval_coefficients(DriftDiffusionModel::double_well_1d(0.5, 0.15), g);
  const auto Rr = assemble_generator(field, Scheme::rates, BoundaryCondition::reflecting()).dense();
  const auto Rf = assemble_generator(field, Scheme::finite_difference, BoundaryCondition::reflecting()).dense();
  double gap = 0.0;
  for (int k = 1; k + 1 < n; ++k)
    gap = std::max({gap, std::abs(Rr(k + 1, k) - Rf(k + 1, k)), std::abs(Rr(k - 1, k) - Rf(k - 1, k))});
  return gap * g.axis(0).spacing();
}

Outcome criterion9() {
  bool pass = true;
  double worst_col = 0.0, min_off = 1e300, worst_abscissa = -1e300;
  std::size_t worst_sparsity_excess = 0;
  for (const auto& name : preset_names()) {
    const auto pr = build_problem(load_preset(name));
    const auto rep = validate_generator(pr.generator);
    const std::size_t limit = 1 + 2 * pr.grid.dimension();
    worst_col = std::max(worst_col, rep.max_abs_column_sum);
    min_off = std::min(min_off, rep.min_off_diagonal);
    worst_abscissa = std::max(worst_abscissa, rep.spectral_abscissa.value_or(1e300));
    if (rep.max_column_sparsity > limit) worst_sparsity_excess = rep.max_column_sparsity - limit;
    pass = pass && rep.max_abs_column_sum <= 1e-12 && rep.max_column_sparsity <= limit &&
           rep.spectral_abscissa.has_value() && *rep.spectral_abscissa <= 1e-8;
    if (pr.generator.scheme == Scheme::rates) pass = pass && rep.min_off_diagonal >= 0.0;
  }
  const double e1 = scheme_gap(161), e2 = scheme_gap(321), e3 = scheme_gap(641);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  pass = pass && o1 >= 0.8 && o1 <= 1.2 && o2 >= 0.8 && o2 <= 1.2 && worst_sparsity_excess == 0;
  return {pass, fmt("presets: max |col sum| %.1e, min off-diag %.2e, max abscissa %.1e; rates-FD order under "
                    "dx halving %.3f, %.3f (in [0.8, 1.2])",
                    worst_col, min_off, worst_abscissa, o1, o2)};
}

Outcome criterion10() {
  const auto pr = exp1_problem();
  MonteCarloOptions opt;
  opt.dt = 1e-3;
  opt.n_steps = 4000;
  opt.n_samples = 100000;
  opt.seed = 0;
  const auto hist = sde_monte_carlo(pr.model, pr.grid, pr.p0, opt);
  const std::vector<double> T{4.0};
  const auto ref = expm_propagate(pr.generator, pr.p0, T).states.back();
  const double d = trace_distance(hist, ref);
  return {d <= 0.05, fmt("L1(SDE histogram, expm) at t = 4 = %.4f <= 0.05", d)};
}

Outcome criterion11() {
  const auto curves = variance_curves(load_preset("exp2"), 0.01, {0.15, 0.2, 0.25});
  double block_gap = 0.0, schrod_gap = 0.0;
  for (const auto& c : curves)
    for (std::size_t j = 0; j < c.classical.size(); ++j)
      for (int a = 0; a < 2; ++a) {
        block_gap = std::max(block_gap, std::abs(c.block[j].variance[a] - c.classical[j].variance[a]));
        schrod_gap = std::max(schrod_gap, std::abs(c.schrod[j].variance[a] - c.classical[j].variance[a]));
      }
  return {block_gap <= 0.02 && schrod_gap <= 0.05,
          fmt("max |Var - Var_classical|: block (dt 0.01) = %.3e <= 0.02, Schrodingerisation = %.3e <= 0.05",
              block_gap, schrod_gap)};
}

Outcome criterion12() {
  const auto base = load_preset("exp1");
  const auto a = trace_distance_table(base);
  const auto b = trace_distance_table(base);
  std::ostringstream ca, cb;
  write_trace_distance_csv(a, ca);
  write_trace_distance_csv(b, cb);
  double worst = 0.0;
  std::string cells;
  for (const auto& r : a) {
    worst = std::max(worst, std::abs(r.af - r.af_classical));
    cells += fmt(" %s:AS=%.4f,AF=%.4f", r.group.c_str(), r.as, r.af);
  }
  return {ca.str() == cb.str() && a.size() == 6 && worst <= 1e-10,
          fmt("table deterministic: %s; max |AF - AF_classical| = %.1e <= 1e-10;", ca.str() == cb.str() ? "yes" : "no",
              worst) +
              cells};
}

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds; <= 0 means none stated
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "block Euler equals classical Euler", 1.0, criterion1},
      {2, "steady-state approach", 1.0, criterion2},
      {3, "LCU order and tracking", 10.0, criterion3},
      {4, "success-probability laws", 10.0, criterion4},
      {5, "step-size bound", 5.0, criterion5},
      {6, "Schrodingerisation fidelity", 600.0, criterion6},
      {7, "aliasing reproduction", 60.0, criterion7},
      {8, "propagator identity", 30.0, criterion8},
      {9, "generator structure", 5.0, criterion9},
      {10, "Monte Carlo cross-validation", 60.0, criterion10},
      {11, "variance tracking", 0.0, criterion11},
      {12, "trace-distance table", 0.0, criterion12},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::string timing = fmt("%.2f s", secs);
    if (c.time_limit > 0.0) timing += fmt(" (limit %.0f s)", c.time_limit);
    std::printf("criterion %2d %s  %s: %s [%s]\n", c.id, pass ? "PASS" : "FAIL", c.title, out.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
