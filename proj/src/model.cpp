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

#include "fpq/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fpq/errors.hpp"

namespace fpq {

namespace {

double require_param(const std::map<std::string, double>& params, const std::string& model,
                     const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ValidationError("model '" + model + "' needs parameter '" + key + "'");
  return it->second;
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(what + " must be positive and finite");
}

}  // namespace

DriftDiffusionModel DriftDiffusionModel::double_well_1d(double kappa, double diffusion) {
  require_positive(kappa, "double_well_1d: kappa");
  require_positive(diffusion, "double_well_1d: D");
  DriftDiffusionModel m;
  m.name = "double_well_1d";
  m.dimension = 1;
  m.drift = [kappa](std::span<const double> x, std::span<double> out) { out[0] = x[0] - kappa * x[0] * x[0] * x[0]; };
  const double g = std::sqrt(diffusion);
  m.noise_gains = [g](std::span<const double>, std::span<double> out) { out[0] = g; };
  m.constant_noise = true;
  m.parameters = {{"kappa", kappa}, {"D", diffusion}};
  return m;
}

DriftDiffusionModel DriftDiffusionModel::spiral_2d(double gamma, double diffusion) {
  require_positive(gamma, "spiral_2d: gamma");
  require_positive(diffusion, "spiral_2d: D");
  DriftDiffusionModel m;
  m.name = "spiral_2d";
  m.dimension = 2;
  m.drift = [gamma](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] - gamma * x[0] * x[1] * x[1];
    out[1] = -x[1] - gamma * x[0] * x[0] * x[1];
  };
  const double g = std::sqrt(diffusion);
  m.noise_gains = [g](std::span<const double>, std::span<double> out) {
    out[0] = g;
    out[1] = g;
  };
  m.constant_noise = true;
  m.parameters = {{"gamma", gamma}, {"D", diffusion}};
  return m;
}

DriftDiffusionModel make_builtin_model(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "double_well_1d") {
    return DriftDiffusionModel::double_well_1d(require_param(params, name, "kappa"), require_param(params, name, "D"));
  }
  if (name == "spiral_2d") {
    return DriftDiffusionModel::spiral_2d(require_param(params, name, "gamma"), require_param(params, name, "D"));
  }
  throw ValidationError("unknown model '" + name + "' (expected double_well_1d or spiral_2d)");
}

CoefficientField eval_coefficients(const DriftDiffusionModel& model, const Grid& grid) {
  const std::size_t d = grid.dimension();
  if (model.dimension != d) {
    std::ostringstream msg;
    msg << "model '" << model.name << "' has dimension " << model.dimension << " but grid has " << d;
    throw ValidationError(msg.str());
  }
  const std::size_t n = grid.total_points();
  CoefficientField field;
  field.grid = grid;
  field.drift.assign(d, std::vector<double>(n));
  field.diffusion.assign(d, std::vector<double>(n));
  std::vector<std::vector<double>> gains(d, std::vector<double>(n));

  std::vector<double> f(d), g(d);
  for (std::size_t k = 0; k < n; ++k) {
    const auto x = grid.point(k);
    model.drift(x, f);
    model.noise_gains(x, g);
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(f[i]) || !std::isfinite(g[i])) {
        std::ostringstream msg;
        msg << "model '" << model.name << "' returned a non-finite value at grid index " << k;
        throw NumericalError(msg.str());
      }
      field.drift[i][k] = f[i];
      gains[i][k] = g[i];
      field.diffusion[i][k] = g[i] * g[i];
    }
  }
  if (model.constant_noise) return field;

  // Noise-induced drift g_i d_i g_i: central differences, one-sided at the edges.
  for (std::size_t i = 0; i < d; ++i) {
    const auto& axis = grid.axis(i);
    const std::size_t stride = grid.stride(i);
    const double h = axis.spacing();
    for (std::size_t k = 0; k < n; ++k) {
      const int ki = grid.multi_index(k)[i];
      double dg;
      if (ki == 0) {
        dg = (gains[i][k + stride] - gains[i][k]) / h;
      } else if (ki == axis.n_points - 1) {
        dg = (gains[i][k] - gains[i][k - stride]) / h;
      } else {
        dg = (gains[i][k + stride] - gains[i][k - stride]) / (2.0 * h);
      }
      field.drift[i][k] += gains[i][k] * dg;
    }
  }
  return field;
}

std::vector<double> mesh_bound(const CoefficientField& field) {
  const auto& grid = field.grid;
  std::vector<double> bound(grid.dimension(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < grid.dimension(); ++i) {
    const int n = grid.axis(i).n_points;
    for (std::size_t k = 0; k < grid.total_points(); ++k) {
      const int ki = grid.multi_index(k)[i];
      if (ki == 0 || ki == n - 1) continue;
      const double drift = field.drift[i][k];
      if (drift == 0.0) continue;
      bound[i] = std::min(bound[i], std::abs(2.0 * field.diffusion[i][k] / drift));
    }
  }
  return bound;
}

}  // namespace fpq
