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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fpq/grid.hpp"
#include "fpq/model.hpp"

namespace fpq {

enum class Scheme { rates, finite_difference };

enum class BoundaryKind { reflecting, periodic, absorbing_sink, source };

/// Boundary treatment of the master equation. absorbing_sink and source add
/// one auxiliary site (the last index) connected to both edge nodes by a
/// one-way rate `aux_rate`.
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::reflecting;
  double aux_rate = 0.0;

  static BoundaryCondition reflecting() { return {BoundaryKind::reflecting, 0.0}; }
  static BoundaryCondition periodic() { return {BoundaryKind::periodic, 0.0}; }
  static BoundaryCondition absorbing_sink(double rate) { return {BoundaryKind::absorbing_sink, rate}; }
  static BoundaryCondition source(double rate) { return {BoundaryKind::source, rate}; }

  bool conserving() const { return kind == BoundaryKind::reflecting || kind == BoundaryKind::periodic; }
  bool has_auxiliary() const { return !conserving(); }
};

std::string to_string(Scheme scheme);
std::string to_string(BoundaryKind kind);
Scheme parse_scheme(const std::string& name);
BoundaryKind parse_boundary_kind(const std::string& name);

struct GeneratorWarning {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
  std::string message;
};

/// Sparse master-equation generator R (dp/dt = R p). Entry (j, k) is the
/// rate of flow from node k into node j; columns sum to zero.
struct GeneratorMatrix {
  Eigen::SparseMatrix<double> matrix;
  Scheme scheme = Scheme::rates;
  BoundaryCondition bc;
  Grid grid;
  std::vector<GeneratorWarning> warnings;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  bool has_auxiliary() const { return dim() == grid.total_points() + 1; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

// Wraps an explicit matrix (tests, toy models). Grid defaults to a single
// axis [0, dim-1] with unit spacing.
GeneratorMatrix generator_from_dense(const Eigen::MatrixXd& R, Scheme scheme = Scheme::rates,
                                     BoundaryCondition bc = BoundaryCondition::reflecting());

/// Drift and diffusion along one grid line.
struct LineCoefficients {
  Axis axis;
  std::vector<double> drift;
  std::vector<double> diffusion;
};

LineCoefficients line_from_field(const CoefficientField& field);

GeneratorMatrix assemble_1d_rates(const LineCoefficients& line, const BoundaryCondition& bc);
GeneratorMatrix assemble_1d_rates(const CoefficientField& field, const BoundaryCondition& bc);

GeneratorMatrix assemble_1d_finite_difference(const LineCoefficients& line, const BoundaryCondition& bc);
GeneratorMatrix assemble_1d_finite_difference(const CoefficientField& field, const BoundaryCondition& bc);

// Builds the 1D operator of one grid line; used once per line by assemble_multidim.
using LineAssembler = std::function<GeneratorMatrix(const LineCoefficients&)>;

/// R = sum_j R_x(y_j) (x) E_jj + sum_i E_ii (x) R_y(x_i), generalized to d axes:
/// every grid line along axis a contributes the 1D operator built from the
/// coefficients sampled on that line.
GeneratorMatrix assemble_multidim(const CoefficientField& field, const std::vector<LineAssembler>& per_axis);

// Scheme dispatch for any dimension.
GeneratorMatrix assemble_generator(const CoefficientField& field, Scheme scheme, const BoundaryCondition& bc);

struct ValidationReport {
  double max_abs_column_sum = 0.0;
  double max_abs_entry = 0.0;
  double min_off_diagonal = 0.0;
  std::size_t max_column_sparsity = 0;
  // Dense eigensolve; empty above kDenseSpectrumLimit.
  std::optional<double> spectral_abscissa;
  std::size_t negative_off_diagonals = 0;

  static constexpr std::size_t kDenseSpectrumLimit = 2048;
};

ValidationReport validate_generator(const GeneratorMatrix& R);

// Max real part of the spectrum by dense eigensolve.
double spectral_abscissa(const GeneratorMatrix& R);

// Writes "row,col,value" with a header row, column-major order.
void write_triplets_csv(const GeneratorMatrix& R, std::ostream& out);

}  // namespace fpq
