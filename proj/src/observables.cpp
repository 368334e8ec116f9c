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

#include "fpq/observables.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "fpq/errors.hpp"

namespace fpq {

namespace {

// Grid-site slice of p, renormalised when an auxiliary site was dropped.
Eigen::VectorXd on_grid(const ProbVector& p, const Grid& grid) {
  const auto n = static_cast<std::size_t>(grid.total_points());
  if (p.size() == n) return p.values();
  if (p.size() == n + 1) {
    Eigen::VectorXd q = p.values().head(static_cast<Eigen::Index>(n));
    const double mass = q.sum();
    if (!(mass > 0.0)) throw NumericalError("no probability left on the grid");
    return q / mass;
  }
  std::ostringstream msg;
  msg << "probability vector has " << p.size() << " entries, grid has " << n;
  throw ValidationError(msg.str());
}

}  // namespace

Eigen::VectorXd mean(const ProbVector& p, const Grid& grid) {
  const Eigen::VectorXd q = on_grid(p, grid);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.dimension()));
  for (Eigen::Index k = 0; k < q.size(); ++k)
    for (Eigen::Index a = 0; a < m.size(); ++a) m[a] += grid.coordinate(static_cast<std::size_t>(k), static_cast<std::size_t>(a)) * q[k];
  return m;
}

Eigen::VectorXd variance(const ProbVector& p, const Grid& grid) {
  const Eigen::VectorXd q = on_grid(p, grid);
  const Eigen::VectorXd m = mean(p, grid);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.dimension()));
  // Centred sum, equal to <x^2> - <x>^2 without the cancellation.
  for (Eigen::Index k = 0; k < q.size(); ++k)
    for (Eigen::Index a = 0; a < m.size(); ++a) {
      const double d = grid.coordinate(static_cast<std::size_t>(k), static_cast<std::size_t>(a)) - m[a];
      v[a] += d * d * q[k];
    }
  if (v.size() && v.minCoeff() < -1e-12) throw NumericalError("negative variance");
  return v;
}

double trace_distance(const ProbVector& pa, const ProbVector& pb) {
  if (pa.size() != pb.size()) {
    std::ostringstream msg;
    msg << "trace distance needs equal lengths, got " << pa.size() << " and " << pb.size();
    throw ValidationError(msg.str());
  }
  return (pa.values() - pb.values()).lpNorm<1>();
}

MomentRecord moments(double time, const ProbVector& p, const Grid& grid) {
  return MomentRecord{time, mean(p, grid), variance(p, grid)};
}

std::vector<MomentRecord> moment_series(const Trajectory& trajectory, const Grid& grid) {
  std::vector<MomentRecord> out;
  out.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) out.push_back(moments(trajectory.times[i], trajectory.states[i], grid));
  return out;
}

void write_moments_csv(const std::vector<MomentRecord>& records, const Grid& grid, std::ostream& out) {
  out << "time";
  for (const auto& ax : grid.axes()) out << ",mean_" << ax.name;
  for (const auto& ax : grid.axes()) out << ",var_" << ax.name;
  out << '\n';
  const auto old = out.precision(17);
  for (const auto& r : records) {
    out << r.time;
    for (Eigen::Index a = 0; a < r.mean.size(); ++a) out << ',' << r.mean[a];
    for (Eigen::Index a = 0; a < r.variance.size(); ++a) out << ',' << r.variance[a];
    out << '\n';
  }
  out.precision(old);
}

}  // namespace fpq
