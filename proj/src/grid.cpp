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

#include "fpq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpq/errors.hpp"

namespace fpq {

void Axis::validate() const {
  if (n_points < 3) {
    std::ostringstream msg;
    msg << "axis '" << name << "': n_points must be >= 3, got " << n_points;
    throw ValidationError(msg.str());
  }
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    std::ostringstream msg;
    msg << "axis '" << name << "': need finite x_min < x_max, got [" << x_min << ", " << x_max << "]";
    throw ValidationError(msg.str());
  }
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw ValidationError("grid needs at least one axis");
  for (const auto& a : axes_) a.validate();
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size() - 1; i > 0; --i) {
    strides_[i - 1] = strides_[i] * static_cast<std::size_t>(axes_[i].n_points);
  }
  total_ = strides_[0] * static_cast<std::size_t>(axes_[0].n_points);
}

std::vector<int> Grid::multi_index(std::size_t flat) const {
  if (flat >= total_) throw ValidationError("flat index out of range");
  std::vector<int> idx(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
  return idx;
}

std::size_t Grid::flat_index(std::span<const int> index) const {
  if (index.size() != axes_.size()) throw ValidationError("multi-index has wrong dimension");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (index[i] < 0 || index[i] >= axes_[i].n_points) throw ValidationError("multi-index out of range");
    flat += static_cast<std::size_t>(index[i]) * strides_[i];
  }
  return flat;
}

double Grid::coordinate(std::size_t flat, std::size_t axis) const {
  const auto k = (flat / strides_.at(axis)) % static_cast<std::size_t>(axes_[axis].n_points);
  return axes_[axis].coordinate(static_cast<int>(k));
}

std::vector<double> Grid::point(std::size_t flat) const {
  std::vector<double> x(axes_.size());
  const auto idx = multi_index(flat);
  for (std::size_t i = 0; i < axes_.size(); ++i) x[i] = axes_[i].coordinate(idx[i]);
  return x;
}

std::size_t Grid::nearest_index(std::span<const double> x) const {
  if (x.size() != axes_.size()) throw ValidationError("point has wrong dimension");
  std::vector<int> idx(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const auto& a = axes_[i];
    const long k = std::lround((x[i] - a.x_min) / a.spacing());
    idx[i] = static_cast<int>(std::clamp<long>(k, 0, a.n_points - 1));
  }
  return flat_index(idx);
}

bool Grid::operator==(const Grid& other) const {
  if (axes_.size() != other.axes_.size()) return false;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const auto& a = axes_[i];
    const auto& b = other.axes_[i];
    if (a.n_points != b.n_points || a.x_min != b.x_min || a.x_max != b.x_max) return false;
  }
  return true;
}

Grid build_grid(std::vector<Axis> axes) { return Grid(std::move(axes)); }

}  // namespace fpq
