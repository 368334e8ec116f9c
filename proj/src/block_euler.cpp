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

#include "fpq/block_euler.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fpq/errors.hpp"
#include "fpq/linalg.hpp"

namespace fpq {

namespace {

constexpr double kNegativeEigenTolerance = 1e-8;
constexpr double kZeroModeRelative = 1e-10;
constexpr double kSqrtClamp = 1e-12;
constexpr double kUnitarityTolerance = 1e-8;
constexpr double kAnnihilated = 1e-14;

}  // namespace

EncodingMode parse_encoding_mode(const std::string& name) {
  if (name == "strict") return EncodingMode::strict;
  if (name == "subnormalized") return EncodingMode::subnormalized;
  if (name == "automatic" || name == "auto") return EncodingMode::automatic;
  throw ValidationError("unknown encoding mode '" + name + "' (expected strict, subnormalized or automatic)");
}

std::string to_string(EncodingMode mode) {
  switch (mode) {
    case EncodingMode::strict: return "strict";
    case EncodingMode::subnormalized: return "subnormalized";
    case EncodingMode::automatic: return "automatic";
  }
  return "unknown";
}

StepSizeBound step_size_bound(const GeneratorMatrix& R) {
  const Eigen::MatrixXd Rd = R.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dissipation(-(Rd + Rd.transpose()), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(Rd * Rd.transpose(), Eigen::EigenvaluesOnly);
  if (dissipation.info() != Eigen::Success || gram.info() != Eigen::Success) {
    throw NumericalError("eigensolver failed in max_step_size");
  }
  const Eigen::VectorXd& mu = dissipation.eigenvalues();
  if (mu[0] < -kNegativeEigenTolerance) {
    std::ostringstream msg;
    msg << "-R - R^T has eigenvalue " << mu[0] << " < 0: the generator is not contractive in the 2-norm";
    throw NumericalError(msg.str());
  }
  const double mu_max = mu[mu.size() - 1];
  if (!(mu_max > 0.0)) throw NumericalError("R + R^T vanishes; no step-size bound");
  StepSizeBound bound;
  bound.lambda_min_nonzero = mu_max;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] > kZeroModeRelative * mu_max) {
      bound.lambda_min_nonzero = mu[i];
      break;
    }
  }
  bound.lambda_max = gram.eigenvalues()[gram.eigenvalues().size() - 1];
  bound.value = bound.lambda_min_nonzero / bound.lambda_max;
  return bound;
}

double max_step_size(const GeneratorMatrix& R) { return step_size_bound(R).value; }

BlockEncodedStep build_block_encoding(const GeneratorMatrix& R, double dt, EncodingMode mode) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ValidationError("block encoding needs dt >= 0");
  const auto n = static_cast<Eigen::Index>(R.dim());
  BlockEncodedStep step;
  step.dt = dt;
  step.A = Eigen::MatrixXd::Identity(n, n) + dt * R.dense();

  if (mode == EncodingMode::automatic) {
    mode = EncodingMode::subnormalized;
    try {
      if (dt <= max_step_size(R)) mode = EncodingMode::strict;
    } catch (const NumericalError&) {
    }
    if (dt == 0.0) mode = EncodingMode::strict;
  }
  if (mode == EncodingMode::strict && dt > 0.0) {
    const double bound = max_step_size(R);
    if (dt > bound * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "dt = " << dt << " exceeds the block-encoding step-size bound " << bound;
      throw NumericalError(msg.str());
    }
  }
  if (mode == EncodingMode::subnormalized) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(step.A);
    step.alpha = std::max(1.0, svd.singularValues()[0]);
  }

  const Eigen::MatrixXd B = step.A / step.alpha;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd top_left = psd_sqrt(I - B.transpose() * B, kSqrtClamp, kNegativeEigenTolerance);
  const Eigen::MatrixXd bottom_right = psd_sqrt(I - B * B.transpose(), kSqrtClamp, kNegativeEigenTolerance);

  Eigen::MatrixXd U(2 * n, 2 * n);
  U.topLeftCorner(n, n) = top_left;
  U.topRightCorner(n, n) = B.transpose();
  U.bottomLeftCorner(n, n) = B;
  U.bottomRightCorner(n, n) = -bottom_right;
  step.U = U.cast<std::complex<double>>();
  step.unitarity_residual = max_abs(U.transpose() * U - Eigen::MatrixXd::Identity(2 * n, 2 * n));
  if (step.unitarity_residual > kUnitarityTolerance) {
    std::ostringstream msg;
    msg << "block encoding is not unitary: residual " << step.unitarity_residual;
    throw NumericalError(msg.str());
  }
  return step;
}

BlockStepOutcome block_euler_step(const BlockEncodedStep& step, const EmulatorState& state) {
  const auto n = static_cast<Eigen::Index>(step.dim());
  if (state.amplitudes.size() != n) throw ValidationError("state dimension does not match the block encoding");

  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(2 * n);
  full.head(n) = state.amplitudes;
  const Eigen::VectorXcd out = step.U * full;
  // Ancilla measured in |1>, then flipped back to |0>.
  Eigen::VectorXcd branch = out.tail(n);
  const double prob = branch.squaredNorm();
  if (prob < kAnnihilated) {
    std::ostringstream msg;
    msg << "post-selection probability " << prob << " below " << kAnnihilated;
    throw NumericalError(msg.str());
  }
  BlockStepOutcome result;
  result.success_prob = prob;
  result.branch_norm_sq = prob * step.alpha * step.alpha;
  result.state.amplitudes = branch / std::sqrt(prob);
  result.state.cumulative_success = state.cumulative_success * prob;
  result.state.l1_scale = result.state.amplitudes.real().cwiseAbs().sum();
  return result;
}

QuantumRun run_block_euler(const GeneratorMatrix& R, const ProbVector& p0, double dt, int n_steps,
                           EncodingMode mode) {
  if (p0.size() != R.dim()) throw ValidationError("initial vector does not match the generator");
  if (n_steps < 0) throw ValidationError("n_steps must be nonnegative");
  QuantumRun run;
  run.trajectory.metadata["solver"] = "q_block";
  run.trajectory.push(0.0, p0);
  if (n_steps == 0) return run;

  const BlockEncodedStep step = build_block_encoding(R, dt, mode);
  run.trajectory.metadata["encoding_alpha"] = std::to_string(step.alpha);
  EmulatorState state = EmulatorState::from_probabilities(p0);
  double success_sum = 0.0;
  for (int m = 1; m <= n_steps; ++m) {
    // Conservation check on the represented vector: A p for the L1-normalized p.
    const ProbVector previous = state.probabilities();
    const double l1_after = (step.A * previous.values()).sum();

    auto outcome = block_euler_step(step, state);
    state = std::move(outcome.state);
    double min_value = 0.0;
    auto p = state.probabilities(&min_value);
    run.trajectory.push(static_cast<double>(m) * dt, std::move(p), std::abs(1.0 - l1_after), min_value);
    run.log.push_back({m, outcome.success_prob, state.cumulative_success, std::abs(1.0 - l1_after)});
    success_sum += outcome.success_prob;
  }
  run.cumulative_success = state.cumulative_success;
  run.mean_success = success_sum / n_steps;
  run.expected_calls = expected_calls(std::min(run.mean_success, 1.0), n_steps);
  return run;
}

}  // namespace fpq
