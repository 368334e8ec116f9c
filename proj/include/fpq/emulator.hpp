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
#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "fpq/classical.hpp"
#include "fpq/prob_vector.hpp"

namespace fpq {

/// Amplitude-encoded probability vector: amplitudes = p / |p|_2.
struct EmulatorState {
  Eigen::VectorXcd amplitudes;
  // Product of the success probabilities of every post-selection so far.
  double cumulative_success = 1.0;
  // |p|_1 / |p|_2 of the represented vector, i.e. the L1 norm of the amplitudes.
  double l1_scale = 1.0;

  static EmulatorState from_probabilities(const ProbVector& p);

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }

  // Real part, L1-normalized. Imaginary parts above 1e-12 (relative to the
  // largest amplitude) throw NumericalError; negative entries are clamped
  // and the pre-clamp minimum is reported through *min_entry.
  ProbVector probabilities(double* min_entry = nullptr) const;
};

struct StepLogEntry {
  int step = 0;
  double success_prob = 1.0;
  double cumulative_success = 1.0;
  double l1_drift = 0.0;
  // LCU only: the two post-selection probabilities.
  double p_a = std::numeric_limits<double>::quiet_NaN();
  double p_a_prime = std::numeric_limits<double>::quiet_NaN();
};

struct QuantumRun {
  Trajectory trajectory;
  std::vector<StepLogEntry> log;
  double cumulative_success = 1.0;
  double mean_success = 1.0;
  double expected_calls = 0.0;
};

/// Average number of calls of a p-probabilistic solver needed to chain n
/// successful steps, E = (p^-n - 1) / (1 - p); tends to n as p -> 1.
double expected_calls(double p, int n);

// "step,success_prob,cumulative_success,l1_drift" (+ ",p_a,p_a_prime").
void write_step_log_csv(const std::vector<StepLogEntry>& log, bool lcu_columns, std::ostream& out);

}  // namespace fpq
