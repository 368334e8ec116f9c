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

#include "fpq/classical.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "fpq/errors.hpp"
#include "fpq/linalg.hpp"

namespace fpq {

namespace {

constexpr double kEulerNegativeTolerance = 1e-10;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_dims(const GeneratorMatrix& R, const ProbVector& p0) {
  if (R.dim() != p0.size()) {
    std::ostringstream msg;
    msg << "initial vector has length " << p0.size() << " but the generator has dimension " << R.dim();
    throw ValidationError(msg.str());
  }
}

}  // namespace

void Trajectory::push(double t, ProbVector p, double drift, double min_value) {
  times.push_back(t);
  states.push_back(std::move(p));
  l1_drift.push_back(drift);
  min_entry.push_back(min_value);
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  out << "time";
  const std::size_t n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  for (std::size_t k = 0; k < n; ++k) out << ",p" << k;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << trajectory.times[i];
    for (std::size_t k = 0; k < n; ++k) out << ',' << trajectory.states[i][k];
    out << '\n';
  }
}

void write_histogram_csv(double time, const ProbVector& p, std::ostream& out) {
  Trajectory t;
  t.push(time, p);
  write_trajectory_csv(t, out);
}

std::vector<double> uniform_times(double dt, int n_steps) {
  std::vector<double> times(static_cast<std::size_t>(std::max(n_steps, 0)) + 1);
  for (std::size_t m = 0; m < times.size(); ++m) times[m] = static_cast<double>(m) * dt;
  return times;
}

Trajectory expm_propagate(const GeneratorMatrix& R, const ProbVector& p0, std::span<const double> times) {
  check_dims(R, p0);
  if (R.dim() > kDenseExpmLimit) {
    std::ostringstream msg;
    msg << "dimension " << R.dim() << " exceeds the dense exponential limit " << kDenseExpmLimit;
    throw ValidationError(msg.str());
  }
  Trajectory out;
  out.metadata["solver"] = "classical_expm";
  const Eigen::MatrixXd Rd = R.dense();
  Eigen::VectorXd p = p0.values();
  double t_prev = 0.0;
  double cached_step = -1.0;
  Eigen::MatrixXd propagator;
  for (double t : times) {
    if (!(t >= t_prev)) throw ValidationError("expm_propagate: times must be nonnegative and nondecreasing");
    const double step = t - t_prev;
    if (step > 0.0) {
      // Relative comparison: uniform grids built by m * dt differ in the last bits.
      if (cached_step < 0.0 || std::abs(step - cached_step) > 1e-13 * std::max(1.0, step)) {
        propagator = expm<double>(Rd * step);
        cached_step = step;
      }
      p = propagator * p;
    }
    t_prev = t;
    double l1 = 0.0;
    const double min_value = p.minCoeff();
    auto state = ProbVector::clamped(p, nullptr, &l1);
    out.push(t, state, std::abs(1.0 - l1), min_value);
    p = state.values();
  }
  return out;
}

Trajectory euler_propagate(const GeneratorMatrix& R, const ProbVector& p0, double dt, int n_steps) {
  check_dims(R, p0);
  if (!(dt > 0.0) && n_steps > 0) throw ValidationError("euler_propagate: dt must be positive");
  if (n_steps < 0) throw ValidationError("euler_propagate: n_steps must be nonnegative");
  Trajectory out;
  out.metadata["solver"] = "classical_euler";
  std::ostringstream dt_text;
  dt_text << std::setprecision(17) << dt;
  out.metadata["dt"] = dt_text.str();
  out.push(0.0, p0);
  Eigen::VectorXd p = p0.values();
  for (int m = 1; m <= n_steps; ++m) {
    Eigen::VectorXd next = p + dt * (R.matrix * p);
    const double min_value = next.minCoeff();
    if (min_value < -kEulerNegativeTolerance) {
      std::ostringstream msg;
      msg << "Euler step " << m << " produced a negative entry " << min_value
          << " (time step or mesh spacing too large)";
      throw NumericalError(msg.str());
    }
    double l1 = 0.0;
    auto state = ProbVector::clamped(std::move(next), nullptr, &l1);
    p = state.values();
    out.push(static_cast<double>(m) * dt, std::move(state), std::abs(1.0 - l1), min_value);
  }
  return out;
}

ProbVector sde_monte_carlo(const DriftDiffusionModel& model, const Grid& grid, const ProbVector& initial,
                           const MonteCarloOptions& options) {
  const std::size_t d = grid.dimension();
  if (model.dimension != d) throw ValidationError("model and grid dimensions differ");
  if (initial.size() != grid.total_points()) throw ValidationError("initial distribution does not match the grid");
  if (options.n_samples == 0) throw ValidationError("n_samples must be positive");
  if (options.n_steps < 0 || (options.n_steps > 0 && !(options.dt > 0.0))) {
    throw ValidationError("Monte Carlo needs dt > 0 and n_steps >= 0");
  }

  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& a = grid.axis(i);
    lo[i] = a.x_min - 0.5 * a.spacing();
    hi[i] = a.x_max + 0.5 * a.spacing();
  }
  // Cumulative distribution of the starting node.
  std::vector<double> cdf(initial.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < initial.size(); ++k) {
    acc += initial[k];
    cdf[k] = acc;
  }

  const double sqrt_2dt = std::sqrt(2.0 * options.dt);
  constexpr double kGainStep = 1e-6;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.total_points()));
  std::vector<double> x(d), f(d), g(d), gp(d), gm(d), probe(d);

  for (std::size_t sample = 0; sample < options.n_samples; ++sample) {
    std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(sample)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const double u = uniform(rng) * acc;
    const auto start = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    x = grid.point(std::min(start, grid.total_points() - 1));

    for (int m = 0; m < options.n_steps; ++m) {
      model.drift(x, f);
      model.noise_gains(x, g);
      if (!model.constant_noise) {
        // Stratonovich correction g_i d_i g_i by central differences.
        for (std::size_t i = 0; i < d; ++i) {
          probe = x;
          probe[i] += kGainStep;
          model.noise_gains(probe, gp);
          probe[i] -= 2.0 * kGainStep;
          model.noise_gains(probe, gm);
          f[i] += g[i] * (gp[i] - gm[i]) / (2.0 * kGainStep);
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        double xi = x[i] + f[i] * options.dt + g[i] * sqrt_2dt * normal(rng);
        if (xi < lo[i]) xi = 2.0 * lo[i] - xi;
        if (xi > hi[i]) xi = 2.0 * hi[i] - xi;
        if (xi < lo[i] || xi > hi[i] || !std::isfinite(xi)) {
          std::ostringstream msg;
          msg << "sample " << sample << " left the domain after reflection at step " << m << " (dt too large)";
          throw NumericalError(msg.str());
        }
        x[i] = xi;
      }
    }
    counts[static_cast<Eigen::Index>(grid.nearest_index(x))] += 1.0;
  }
  return ProbVector::normalized(counts);
}

ProbVector sde_monte_carlo(const DriftDiffusionModel& model, const Grid& grid, std::span<const double> x0,
                           const MonteCarloOptions& options) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.total_points()));
  p[static_cast<Eigen::Index>(grid.nearest_index(x0))] = 1.0;
  return sde_monte_carlo(model, grid, ProbVector(p), options);
}

ProbVector steady_state_1d(double kappa, double diffusion, const Grid& grid) {
  if (grid.dimension() != 1) throw ValidationError("steady_state_1d needs a one-dimensional grid");
  if (!(kappa > 0.0) || !(diffusion > 0.0)) throw ValidationError("steady_state_1d needs kappa > 0 and D > 0");
  const auto n = static_cast<Eigen::Index>(grid.total_points());
  Eigen::VectorXd exponent(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = grid.axis(0).coordinate(static_cast<int>(k));
    exponent[k] = (2.0 * x * x - kappa * x * x * x * x) / (4.0 * diffusion);
  }
  // Shift by the maximum so the largest weight is exactly 1.
  Eigen::VectorXd p = (exponent.array() - exponent.maxCoeff()).exp();
  return ProbVector::normalized(p);
}

}  // namespace fpq
