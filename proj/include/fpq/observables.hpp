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

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "fpq/classical.hpp"
#include "fpq/grid.hpp"
#include "fpq/prob_vector.hpp"

namespace fpq {

// Moments are taken over grid sites only. A trailing auxiliary site (sink or
// source) is dropped and the remaining mass renormalised before averaging.
Eigen::VectorXd mean(const ProbVector& p, const Grid& grid);
Eigen::VectorXd variance(const ProbVector& p, const Grid& grid);

// sum_i |pa_i - pb_i|; both inputs must have the same length, so an auxiliary
// site counts only when both carry one.
double trace_distance(const ProbVector& pa, const ProbVector& pb);

struct MomentRecord {
  double time = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

MomentRecord moments(double time, const ProbVector& p, const Grid& grid);
std::vector<MomentRecord> moment_series(const Trajectory& trajectory, const Grid& grid);

// Header "time,mean_<axis>...,var_<axis>..." using the grid axis names.
void write_moments_csv(const std::vector<MomentRecord>& records, const Grid& grid, std::ostream& out);

}  // namespace fpq
