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

#include "fpq/generator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fpq/errors.hpp"

namespace fpq {

namespace {

using Triplet = Eigen::Triplet<double>;

// exp() arguments above this are reported as overflow.
constexpr double kMaxExponent = 700.0;

void check_line(const LineCoefficients& line) {
  line.axis.validate();
  const auto n = static_cast<std::size_t>(line.axis.n_points);
  if (line.drift.size() != n || line.diffusion.size() != n) {
    throw ValidationError("line coefficients do not match the axis size");
  }
}

void check_aux_rate(const BoundaryCondition& bc) {
  if (bc.has_auxiliary() && !(bc.aux_rate >= 0.0 && std::isfinite(bc.aux_rate))) {
    throw ValidationError("auxiliary-site flow rate must be a nonnegative finite number");
  }
}

// Column-sum-zero diagonal plus auxiliary site wiring for a 1D line whose
// off-diagonal entries are already in `entries` (n x n block).
GeneratorMatrix finish_1d(std::vector<Triplet> entries, const LineCoefficients& line, const BoundaryCondition& bc,
                          Scheme scheme) {
  const int n = line.axis.n_points;
  const int dim = bc.has_auxiliary() ? n + 1 : n;
  if (bc.kind == BoundaryKind::absorbing_sink) {
    entries.emplace_back(n, 0, bc.aux_rate);
    entries.emplace_back(n, n - 1, bc.aux_rate);
  } else if (bc.kind == BoundaryKind::source) {
    entries.emplace_back(0, n, bc.aux_rate);
    entries.emplace_back(n - 1, n, bc.aux_rate);
  }
  std::vector<double> column_sum(static_cast<std::size_t>(dim), 0.0);
  for (const auto& t : entries) column_sum[static_cast<std::size_t>(t.col())] += t.value();
  for (int k = 0; k < dim; ++k) entries.emplace_back(k, k, -column_sum[static_cast<std::size_t>(k)]);

  GeneratorMatrix R;
  R.matrix.resize(dim, dim);
  R.matrix.setFromTriplets(entries.begin(), entries.end());
  R.matrix.makeCompressed();
  R.scheme = scheme;
  R.bc = bc;
  R.grid = Grid({line.axis});
  return R;
}

}  // namespace

std::string to_string(Scheme scheme) { return scheme == Scheme::rates ? "rates" : "finite_difference"; }

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::reflecting: return "reflecting";
    case BoundaryKind::periodic: return "periodic";
    case BoundaryKind::absorbing_sink: return "absorbing_sink";
    case BoundaryKind::source: return "source";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "rates") return Scheme::rates;
  if (name == "finite_difference") return Scheme::finite_difference;
  throw ValidationError("unknown scheme '" + name + "' (expected rates or finite_difference)");
}

BoundaryKind parse_boundary_kind(const std::string& name) {
  if (name == "reflecting") return BoundaryKind::reflecting;
  if (name == "periodic") return BoundaryKind::periodic;
  if (name == "absorbing_sink") return BoundaryKind::absorbing_sink;
  if (name == "source") return BoundaryKind::source;
  throw ValidationError("unknown boundary condition '" + name + "'");
}

GeneratorMatrix generator_from_dense(const Eigen::MatrixXd& R, Scheme scheme, BoundaryCondition bc) {
  if (R.rows() != R.cols() || R.rows() == 0) throw ValidationError("generator must be a nonempty square matrix");
  GeneratorMatrix out;
  out.matrix = R.sparseView(0.0, 0.0);
  out.matrix.makeCompressed();
  out.scheme = scheme;
  out.bc = bc;
  // Axes need >= 3 nodes, so tiny toy matrices get a placeholder grid.
  const int n = std::max(static_cast<int>(R.rows()), 3);
  out.grid = Grid({Axis{"index", 0.0, static_cast<double>(n - 1), n}});
  return out;
}

LineCoefficients line_from_field(const CoefficientField& field) {
  if (field.grid.dimension() != 1) throw ValidationError("expected a one-dimensional coefficient field");
  return {field.grid.axis(0), field.drift[0], field.diffusion[0]};
}

GeneratorMatrix assemble_1d_rates(const LineCoefficients& line, const BoundaryCondition& bc) {
  check_line(line);
  check_aux_rate(bc);
  const int n = line.axis.n_points;
  const double h = line.axis.spacing();
  for (int k = 0; k < n; ++k) {
    if (!(line.diffusion[static_cast<std::size_t>(k)] > 0.0)) {
      std::ostringstream msg;
      msg << "rates scheme needs positive diffusion; D = " << line.diffusion[static_cast<std::size_t>(k)]
          << " at site " << k;
      throw ValidationError(msg.str());
    }
  }
  // Pseudo-potential V(x) = -int D^(x)/D^(xx) dx, cumulative trapezoid from x_min.
  std::vector<double> ratio(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ratio[static_cast<std::size_t>(k)] = line.drift[static_cast<std::size_t>(k)] / line.diffusion[static_cast<std::size_t>(k)];
  }
  std::vector<double> V(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k < n; ++k) {
    const auto u = static_cast<std::size_t>(k);
    V[u] = V[u - 1] - 0.5 * h * (ratio[u - 1] + ratio[u]);
  }

  std::vector<Triplet> entries;
  auto add_rate = [&](int from, int to, double dV) {
    const double exponent = -0.5 * dV;
    if (exponent > kMaxExponent || !std::isfinite(exponent)) {
      std::ostringstream msg;
      msg << "transition rate overflows at site " << from << " (exponent " << exponent << ")";
      throw NumericalError(msg.str());
    }
    entries.emplace_back(to, from, line.diffusion[static_cast<std::size_t>(from)] / (h * h) * std::exp(exponent));
  };
  for (int k = 0; k < n; ++k) {
    const auto u = static_cast<std::size_t>(k);
    if (k + 1 < n) add_rate(k, k + 1, V[u + 1] - V[u]);
    if (k > 0) add_rate(k, k - 1, V[u - 1] - V[u]);
  }
  if (bc.kind == BoundaryKind::periodic) {
    // Wrap link treated as one more trapezoid step between x_{N-1} and x_0.
    const auto last = static_cast<std::size_t>(n - 1);
    const double dV = -0.5 * h * (ratio[last] + ratio[0]);
    add_rate(n - 1, 0, dV);
    add_rate(0, n - 1, -dV);
  }
  return finish_1d(std::move(entries), line, bc, Scheme::rates);
}

GeneratorMatrix assemble_1d_rates(const CoefficientField& field, const BoundaryCondition& bc) {
  return assemble_1d_rates(line_from_field(field), bc);
}

GeneratorMatrix assemble_1d_finite_difference(const LineCoefficients& line, const BoundaryCondition& bc) {
  check_line(line);
  check_aux_rate(bc);
  const int n = line.axis.n_points;
  const double h = line.axis.spacing();
  std::vector<Triplet> entries;
  std::vector<GeneratorWarning> warnings;
  auto add = [&](int row, int col, double value) {
    entries.emplace_back(row, col, value);
    if (value < 0.0) {
      std::ostringstream msg;
      msg << "negative off-diagonal " << value << " at (" << row << ", " << col
          << "): spacing exceeds the mesh bound |2 D^(xx) / D^(x)|";
      warnings.push_back({static_cast<std::size_t>(row), static_cast<std::size_t>(col), value, msg.str()});
    }
  };
  // Column k: mass at x_k moves right with (D_k/h + f_k/2)/h and left with (D_k/h - f_k/2)/h.
  for (int k = 0; k < n; ++k) {
    const auto u = static_cast<std::size_t>(k);
    const double right = (0.5 * line.drift[u] + line.diffusion[u] / h) / h;
    const double left = (-0.5 * line.drift[u] + line.diffusion[u] / h) / h;
    if (k + 1 < n) {
      add(k + 1, k, right);
    } else if (bc.kind == BoundaryKind::periodic) {
      add(0, k, right);
    }
    if (k > 0) {
      add(k - 1, k, left);
    } else if (bc.kind == BoundaryKind::periodic) {
      add(n - 1, k, left);
    }
  }
  auto R = finish_1d(std::move(entries), line, bc, Scheme::finite_difference);
  R.warnings = std::move(warnings);
  return R;
}

GeneratorMatrix assemble_1d_finite_difference(const CoefficientField& field, const BoundaryCondition& bc) {
  return assemble_1d_finite_difference(line_from_field(field), bc);
}

GeneratorMatrix assemble_multidim(const CoefficientField& field, const std::vector<LineAssembler>& per_axis) {
  const auto& grid = field.grid;
  const std::size_t d = grid.dimension();
  if (per_axis.size() != d) {
    std::ostringstream msg;
    msg << "got " << per_axis.size() << " per-axis assemblers for a " << d << "-dimensional grid";
    throw ValidationError(msg.str());
  }
  const std::size_t total = grid.total_points();
  std::vector<Triplet> entries;
  entries.reserve(total * (1 + 2 * d) * 2);
  std::vector<GeneratorWarning> warnings;
  std::optional<Scheme> scheme;
  std::optional<BoundaryCondition> bc;

  for (std::size_t a = 0; a < d; ++a) {
    const auto& axis = grid.axis(a);
    const std::size_t stride = grid.stride(a);
    const auto n = static_cast<std::size_t>(axis.n_points);
    LineCoefficients line{axis, std::vector<double>(n), std::vector<double>(n)};
    // Line starts: every node whose index along axis a is zero.
    for (std::size_t start = 0; start < total; ++start) {
      if ((start / stride) % n != 0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        line.drift[k] = field.drift[a][start + k * stride];
        line.diffusion[k] = field.diffusion[a][start + k * stride];
      }
      const GeneratorMatrix local = per_axis[a](line);
      if (local.has_auxiliary() || local.dim() != n) {
        throw ValidationError("multi-dimensional assembly supports reflecting and periodic boundaries only");
      }
      if (!scheme) {
        scheme = local.scheme;
        bc = local.bc;
      } else if (*scheme != local.scheme || bc->kind != local.bc.kind) {
        throw ValidationError("all axes must share the same scheme and boundary family");
      }
      for (int col = 0; col < local.matrix.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(local.matrix, col); it; ++it) {
          const std::size_t r = start + static_cast<std::size_t>(it.row()) * stride;
          const std::size_t c = start + static_cast<std::size_t>(it.col()) * stride;
          entries.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
        }
      }
      for (auto w : local.warnings) {
        w.row = start + w.row * stride;
        w.col = start + w.col * stride;
        warnings.push_back(std::move(w));
      }
    }
  }

  GeneratorMatrix R;
  R.matrix.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  R.matrix.setFromTriplets(entries.begin(), entries.end());
  R.matrix.makeCompressed();
  R.scheme = scheme.value_or(Scheme::rates);
  R.bc = bc.value_or(BoundaryCondition::reflecting());
  R.grid = grid;
  R.warnings = std::move(warnings);
  return R;
}

GeneratorMatrix assemble_generator(const CoefficientField& field, Scheme scheme, const BoundaryCondition& bc) {
  auto one_line = [scheme, bc](const LineCoefficients& line) {
    return scheme == Scheme::rates ? assemble_1d_rates(line, bc) : assemble_1d_finite_difference(line, bc);
  };
  if (field.grid.dimension() == 1) {
    auto R = one_line(line_from_field(field));
    R.grid = field.grid;
    return R;
  }
  if (bc.has_auxiliary()) {
    throw ValidationError("absorbing_sink/source boundaries are supported for one-dimensional grids only");
  }
  return assemble_multidim(field, std::vector<LineAssembler>(field.grid.dimension(), one_line));
}

double spectral_abscissa(const GeneratorMatrix& R) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(R.dense(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed while computing the spectral abscissa");
  return solver.eigenvalues().real().maxCoeff();
}

ValidationReport validate_generator(const GeneratorMatrix& R) {
  ValidationReport report;
  report.min_off_diagonal = std::numeric_limits<double>::infinity();
  const auto& M = R.matrix;
  for (int col = 0; col < M.outerSize(); ++col) {
    double sum = 0.0;
    std::size_t nnz = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, col); it; ++it) {
      sum += it.value();
      report.max_abs_entry = std::max(report.max_abs_entry, std::abs(it.value()));
      if (it.value() != 0.0) ++nnz;
      if (it.row() != it.col()) {
        report.min_off_diagonal = std::min(report.min_off_diagonal, it.value());
        if (it.value() < 0.0) ++report.negative_off_diagonals;
      }
    }
    report.max_abs_column_sum = std::max(report.max_abs_column_sum, std::abs(sum));
    report.max_column_sparsity = std::max(report.max_column_sparsity, nnz);
  }
  if (!std::isfinite(report.min_off_diagonal)) report.min_off_diagonal = 0.0;
  if (R.dim() <= ValidationReport::kDenseSpectrumLimit) report.spectral_abscissa = spectral_abscissa(R);
  return report;
}

void write_triplets_csv(const GeneratorMatrix& R, std::ostream& out) {
  out << "row,col,value\n";
  out << std::setprecision(17);
  for (int col = 0; col < R.matrix.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(R.matrix, col); it; ++it) {
      out << it.row() << ',' << it.col() << ',' << it.value() << '\n';
    }
  }
}

}  // namespace fpq
