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

#include "fpq/lcu.hpp"

#include <cmath>
#include <sstream>

#include "fpq/errors.hpp"
#include "fpq/linalg.hpp"

namespace fpq {

namespace {
constexpr double kUnitarityTolerance = 1e-10;
constexpr double kAnnihilated = 1e-14;
const std::complex<double> kI(0.0, 1.0);
}  // namespace

Eigen::MatrixXcd build_hr(const GeneratorMatrix& R) {
  const Eigen::MatrixXcd Rc = R.dense().cast<std::complex<double>>();
  const auto n = Rc.rows();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  H.topRightCorner(n, n) = -kI * Rc.adjoint();
  H.bottomLeftCorner(n, n) = kI * Rc;
  return H;
}

Eigen::Matrix2d lcu_rotation(double alpha1, double alpha2) {
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0) || !(alpha1 + alpha2 > 0.0)) {
    throw ValidationError("LCU weights must be nonnegative and not both zero");
  }
  const double a = std::sqrt(alpha1);
  const double b = std::sqrt(alpha2);
  Eigen::Matrix2d B;
  B << a, -b, b, a;
  return B / std::sqrt(alpha1 + alpha2);
}

LcuStep build_lcu(const GeneratorMatrix& R, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("LCU step needs dt > 0");
  LcuStep step;
  step.dt = dt;
  step.alpha1 = 1.0;
  step.alpha2 = std::sqrt(dt);
  step.B = lcu_rotation(step.alpha1, step.alpha2);
  step.H_R = build_hr(R);

  const auto n = static_cast<Eigen::Index>(R.dim());
  Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  swap.topRightCorner(n, n).setIdentity();
  swap.bottomLeftCorner(n, n).setIdentity();
  step.U2 = swap * hermitian_propagator(step.H_R, std::sqrt(dt));
  step.unitarity_residual = max_abs(step.U2.adjoint() * step.U2 - Eigen::MatrixXcd::Identity(2 * n, 2 * n));
  if (step.unitarity_residual > kUnitarityTolerance) {
    std::ostringstream msg;
    msg << "LCU unitary U2 has unitarity residual " << step.unitarity_residual;
    throw NumericalError(msg.str());
  }
  return step;
}

Eigen::VectorXcd lcu_apply(const LcuStep& step, const Eigen::VectorXcd& psi) {
  const auto n = static_cast<Eigen::Index>(step.dim());
  if (psi.size() != n) throw ValidationError("state dimension does not match the LCU step");
  const auto m = 2 * n;
  // |0_a'> (x) psi
  Eigen::VectorXcd reg = Eigen::VectorXcd::Zero(m);
  reg.head(n) = psi;
  // B on ancilla a: column 0 of B.
  Eigen::VectorXcd branch0 = step.B(0, 0) * reg;
  Eigen::VectorXcd branch1 = step.B(1, 0) * reg;
  // U_com: U1 = I on a = 0, U2 on a = 1.
  branch1 = step.U2 * branch1;
  // B^dagger = B^T (real).
  Eigen::VectorXcd out(2 * m);
  out.head(m) = step.B(0, 0) * branch0 + step.B(1, 0) * branch1;
  out.tail(m) = step.B(0, 1) * branch0 + step.B(1, 1) * branch1;
  return out;
}

LcuStepOutcome lcu_step(const LcuStep& step, const EmulatorState& state) {
  const auto n = static_cast<Eigen::Index>(step.dim());
  const Eigen::VectorXcd out = lcu_apply(step, state.amplitudes);
  const Eigen::VectorXcd after_a = out.head(2 * n);
  const double p_a = after_a.squaredNorm();
  if (p_a < kAnnihilated) throw NumericalError("LCU post-selection on ancilla a failed (probability ~ 0)");
  const Eigen::VectorXcd after_both = out.head(n);
  const double p_both = after_both.squaredNorm();
  if (p_both < kAnnihilated * p_a) throw NumericalError("LCU post-selection on ancilla a' failed (probability ~ 0)");

  LcuStepOutcome result;
  result.p_a = p_a;
  result.p_a_prime = p_both / p_a;
  result.state.amplitudes = after_both / std::sqrt(p_both);
  result.state.cumulative_success = state.cumulative_success * p_both;
  result.state.l1_scale = result.state.amplitudes.real().cwiseAbs().sum();
  return result;
}

QuantumRun run_lcu(const GeneratorMatrix& R, const ProbVector& p0, double dt, int n_steps) {
  if (p0.size() != R.dim()) throw ValidationError("initial vector does not match the generator");
  if (n_steps < 0) throw ValidationError("n_steps must be nonnegative");
  QuantumRun run;
  run.trajectory.metadata["solver"] = "q_lcu";
  run.trajectory.push(0.0, p0);
  if (n_steps == 0) return run;

  const LcuStep step = build_lcu(R, dt);
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(R.dim()), static_cast<Eigen::Index>(R.dim())) + dt * R.dense();
  EmulatorState state = EmulatorState::from_probabilities(p0);
  double success_sum = 0.0;
  for (int m = 1; m <= n_steps; ++m) {
    const double l1_after = (A * state.probabilities().values()).sum();
    auto outcome = lcu_step(step, state);
    state = std::move(outcome.state);
    double min_value = 0.0;
    auto p = state.probabilities(&min_value);
    const double success = outcome.p_a * outcome.p_a_prime;
    run.trajectory.push(static_cast<double>(m) * dt, std::move(p), std::abs(1.0 - l1_after), min_value);
    run.log.push_back({m, success, state.cumulative_success, std::abs(1.0 - l1_after), outcome.p_a, outcome.p_a_prime});
    success_sum += success;
  }
  run.cumulative_success = state.cumulative_success;
  run.mean_success = success_sum / n_steps;
  run.expected_calls = expected_calls(run.mean_success, n_steps);
  return run;
}

}  // namespace fpq
