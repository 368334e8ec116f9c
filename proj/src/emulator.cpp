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

#include "fpq/emulator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fpq/errors.hpp"

namespace fpq {

namespace {
constexpr double kImagTolerance = 1e-12;
}

EmulatorState EmulatorState::from_probabilities(const ProbVector& p) {
  EmulatorState s;
  const double l2 = p.values().norm();
  s.amplitudes = (p.values() / l2).cast<std::complex<double>>();
  s.l1_scale = p.values().sum() / l2;
  return s;
}

ProbVector EmulatorState::probabilities(double* min_entry) const {
  const double scale = amplitudes.cwiseAbs().maxCoeff();
  const double max_imag = amplitudes.imag().cwiseAbs().maxCoeff();
  if (max_imag > kImagTolerance * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "emulated state has an imaginary part of " << max_imag << " (construction error)";
    throw NumericalError(msg.str());
  }
  return ProbVector::clamped(amplitudes.real(), min_entry);
}

double expected_calls(double p, int n) {
  if (n <= 0) return 0.0;
  if (!(p > 0.0) || p > 1.0 + 1e-10) throw ValidationError("success probability must lie in (0, 1]");
  if (1.0 - p < 1e-12) return static_cast<double>(n);
  return (std::pow(p, -static_cast<double>(n)) - 1.0) / (1.0 - p);
}

void write_step_log_csv(const std::vector<StepLogEntry>& log, bool lcu_columns, std::ostream& out) {
  out << "step,success_prob,cumulative_success,l1_drift";
  if (lcu_columns) out << ",p_a,p_a_prime";
  out << '\n' << std::setprecision(17);
  for (const auto& e : log) {
    out << e.step << ',' << e.success_prob << ',' << e.cumulative_success << ',' << e.l1_drift;
    if (lcu_columns) out << ',' << e.p_a << ',' << e.p_a_prime;
    out << '\n';
  }
}

}  // namespace fpq
