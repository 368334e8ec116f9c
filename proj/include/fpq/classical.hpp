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
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpq/generator.hpp"
#include "fpq/model.hpp"
#include "fpq/prob_vector.hpp"

namespace fpq {

/// Time series of probability vectors. l1_drift[i] is |1 - L1 norm| of the
/// raw state before it was renormalized into states[i].
struct Trajectory {
  std::vector<double> times;
  std::vector<ProbVector> states;
  std::vector<double> l1_drift;
  std::vector<double> min_entry;
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return times.size(); }
  void push(double t, ProbVector p, double drift = 0.0, double min_value = 0.0);
};

// Header "time,p0,p1,...", one row per snapshot, 17 significant digits.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
void write_histogram_csv(double time, const ProbVector& p, std::ostream& out);

/// p(t) = exp(R t) p0 at each requested time (nondecreasing, >= 0). Uses the
/// dense scaling-and-squaring exponential of R times the time increment;
/// increments that repeat reuse the same propagator.
Trajectory expm_propagate(const GeneratorMatrix& R, const ProbVector& p0, std::span<const double> times);

inline constexpr std::size_t kDenseExpmLimit = 4096;

/// p_{m+1} = (I + dt R) p_m, renormalized in L1 after every step.
/// Throws NumericalError if an entry drops below -1e-10.
Trajectory euler_propagate(const GeneratorMatrix& R, const ProbVector& p0, double dt, int n_steps);

struct MonteCarloOptions {
  double dt = 1e-3;
  int n_steps = 0;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;
};

/// Euler-Maruyama paths x += D^(i)(x) dt + g_i(x) sqrt(2 dt) xi, mirrored at
/// the cell faces x_min - h/2 and x_max + h/2, binned to the nearest node.
/// Each sample draws from its own generator seeded by (seed, sample index).
ProbVector sde_monte_carlo(const DriftDiffusionModel& model, const Grid& grid, const ProbVector& initial,
                           const MonteCarloOptions& options);
ProbVector sde_monte_carlo(const DriftDiffusionModel& model, const Grid& grid, std::span<const double> x0,
                           const MonteCarloOptions& options);

/// Discretized steady state of the double well: p_k ~ exp((2 x^2 - kappa x^4) / (4 D)).
ProbVector steady_state_1d(double kappa, double diffusion, const Grid& grid);

// Uniform snapshot times 0, dt, ..., n_steps * dt.
std::vector<double> uniform_times(double dt, int n_steps);

}  // namespace fpq
