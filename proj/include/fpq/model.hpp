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

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpq/grid.hpp"

namespace fpq {

// Evaluates a d-component field at a state x; writes into out (size d).
using FieldEvaluator = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Langevin system dx/dt = f(x) + g(x) Gamma(t) with diagonal noise gains and
/// <Gamma_m(t) Gamma_n(t')> = 2 delta_mn delta(t - t').
struct DriftDiffusionModel {
  std::string name;
  std::size_t dimension = 0;
  FieldEvaluator drift;
  FieldEvaluator noise_gains;
  // Set when g does not depend on x; the noise-induced drift is then skipped.
  bool constant_noise = false;
  std::map<std::string, double> parameters;

  // f(x) = x - kappa x^3, g = sqrt(D).
  static DriftDiffusionModel double_well_1d(double kappa, double diffusion);
  // f(x, y) = (x - gamma x y^2, -y - gamma x^2 y), g = sqrt(D) on both axes.
  static DriftDiffusionModel spiral_2d(double gamma, double diffusion);
};

// Looks up a builtin model by name ("double_well_1d", "spiral_2d").
DriftDiffusionModel make_builtin_model(const std::string& name, const std::map<std::string, double>& params);

/// Drift D^(i) and diagonal diffusion D^(ii) sampled on every grid node.
/// Indexing: drift[axis][flat_index].
struct CoefficientField {
  Grid grid;
  std::vector<std::vector<double>> drift;
  std::vector<std::vector<double>> diffusion;
};

CoefficientField eval_coefficients(const DriftDiffusionModel& model, const Grid& grid);

// Per axis: min over interior nodes of |2 D^(ii) / D^(i)|; +inf if the drift
// along that axis vanishes at every interior node.
std::vector<double> mesh_bound(const CoefficientField& field);

}  // namespace fpq
