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
#include <span>
#include <string>
#include <vector>

namespace fpq {

/// Uniform one-dimensional discretization of [x_min, x_max] with n_points
/// nodes, both end points included.
struct Axis {
  std::string name;
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;

  double spacing() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }
  double coordinate(int k) const { return x_min + static_cast<double>(k) * spacing(); }

  // Throws ValidationError unless n_points >= 3 and x_min < x_max.
  void validate() const;
};

/// Tensor-product grid. Flattened indices are row-major with the first axis
/// slowest, i.e. for two axes p = (p_{0,0}, p_{0,1}, ..., p_{1,0}, ...).
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes);

  std::size_t dimension() const { return axes_.size(); }
  std::size_t total_points() const { return total_; }
  const Axis& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<Axis>& axes() const { return axes_; }

  // Distance in the flat index between neighbours along `axis`.
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> index) const;

  double coordinate(std::size_t flat, std::size_t axis) const;
  std::vector<double> point(std::size_t flat) const;

  // Grid node closest to x (per-axis rounding, clamped into the grid).
  std::size_t nearest_index(std::span<const double> x) const;

  bool operator==(const Grid& other) const;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

Grid build_grid(std::vector<Axis> axes);

}  // namespace fpq
