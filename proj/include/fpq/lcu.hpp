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

#include <Eigen/Dense>

#include "fpq/emulator.hpp"
#include "fpq/generator.hpp"

namespace fpq {

/// H_R = [[0, -i R^T], [i R, 0]] on (ancilla a') (x) system, a' most significant.
Eigen::MatrixXcd build_hr(const GeneratorMatrix& R);

/// One forward-Euler step as the combination (U1 + sqrt(dt) U2) / (1 + sqrt(dt))
/// with U1 = I and U2 = X_{a'} exp(-i H_R sqrt(dt)).
struct LcuStep {
  double dt = 0.0;
  double alpha1 = 1.0;
  double alpha2 = 0.0;
  Eigen::Matrix2d B;    // [[sqrt(a1), -sqrt(a2)], [sqrt(a2), sqrt(a1)]] / sqrt(a1 + a2)
  Eigen::MatrixXcd H_R;
  Eigen::MatrixXcd U2;  // 2 dim x 2 dim
  double unitarity_residual = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(H_R.rows() / 2); }
};

LcuStep build_lcu(const GeneratorMatrix& R, double dt);

// Combination matrix from the two weights; orthogonal.
Eigen::Matrix2d lcu_rotation(double alpha1, double alpha2);

/// B^dagger U_com B applied to the full register |0_a 0_a'> (x) psi, laid
/// out as index a * 2 dim + a' * dim + k. Used directly by tests that
/// inspect the branches before any measurement.
Eigen::VectorXcd lcu_apply(const LcuStep& step, const Eigen::VectorXcd& psi);

struct LcuStepOutcome {
  EmulatorState state;
  double p_a = 0.0;
  double p_a_prime = 0.0;
};

/// Post-selects ancilla a on 0, then ancilla a' on 0. Throws NumericalError if
/// either probability falls below 1e-14.
LcuStepOutcome lcu_step(const LcuStep& step, const EmulatorState& state);

QuantumRun run_lcu(const GeneratorMatrix& R, const ProbVector& p0, double dt, int n_steps);

}  // namespace fpq
