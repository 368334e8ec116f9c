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

#include <string>

#include <Eigen/Dense>

#include "fpq/emulator.hpp"
#include "fpq/generator.hpp"

namespace fpq {

/// How the Euler matrix A = I + dt R is placed in the unitary.
///  strict:        A itself, as in U = [[sqrt(I - A^T A), A^T], [A, -sqrt(I - A A^T)]];
///                 requires dt <= max_step_size(R).
///  subnormalized: A / alpha with alpha = max(1, |A|_2); always exists, the
///                 post-selected state is unchanged and the success
///                 probability drops by 1 / alpha^2.
///  automatic:     strict when R + R^T <= 0 and dt is within the bound,
///                 subnormalized otherwise.
enum class EncodingMode { strict, subnormalized, automatic };

EncodingMode parse_encoding_mode(const std::string& name);
std::string to_string(EncodingMode mode);

struct StepSizeBound {
  double value = 0.0;
  double lambda_min_nonzero = 0.0;  // of -R - R^T
  double lambda_max = 0.0;          // of R R^T
};

/// dt <= lambda*_min(-R - R^T) / lambda_max(R R^T). Throws NumericalError if
/// -R - R^T has an eigenvalue below -1e-8 (R is not a contraction generator
/// in the Euclidean norm) or vanishes identically.
StepSizeBound step_size_bound(const GeneratorMatrix& R);
double max_step_size(const GeneratorMatrix& R);

struct BlockEncodedStep {
  double dt = 0.0;
  Eigen::MatrixXd A;        // I + dt R (not subnormalized)
  double alpha = 1.0;       // encoded block is A / alpha
  Eigen::MatrixXcd U;       // 2 dim x 2 dim, ancilla is the most significant index
  double unitarity_residual = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(A.rows()); }
};

BlockEncodedStep build_block_encoding(const GeneratorMatrix& R, double dt,
                                      EncodingMode mode = EncodingMode::strict);

struct BlockStepOutcome {
  EmulatorState state;
  double success_prob = 0.0;
  // |A psi|^2 for the normalized input, i.e. the success probability of the
  // block encoding without subnormalization.
  double branch_norm_sq = 0.0;
};

/// U on |0_a> (x) psi, projection of the ancilla onto |1_a>, bit flip,
/// renormalization. Throws NumericalError if the branch probability is
/// below 1e-14.
BlockStepOutcome block_euler_step(const BlockEncodedStep& step, const EmulatorState& state);

/// Follows the successful branch for n_steps; the trajectory holds the
/// L1-normalized probability vectors at t = m dt.
QuantumRun run_block_euler(const GeneratorMatrix& R, const ProbVector& p0, double dt, int n_steps,
                           EncodingMode mode = EncodingMode::automatic);

}  // namespace fpq
