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

#include "fpq/prob_vector.hpp"

#include <cmath>
#include <sstream>

#include "fpq/errors.hpp"

namespace fpq {

namespace {

void clamp_roundoff(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NumericalError("probability vector has a non-finite entry");
    if (v[i] < 0.0) {
      if (v[i] < -ProbVector::kNegativeTolerance) {
        std::ostringstream msg;
        msg << "probability vector entry " << i << " is negative (" << v[i] << ")";
        throw NumericalError(msg.str());
      }
      v[i] = 0.0;
    }
  }
}

}  // namespace

ProbVector::ProbVector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() == 0) throw ValidationError("empty probability vector");
  clamp_roundoff(values_);
  const double l1 = values_.sum();
  if (std::abs(l1 - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "probability vector has L1 norm " << l1 << ", expected 1";
    throw ValidationError(msg.str());
  }
}

ProbVector ProbVector::normalized(Eigen::VectorXd values, double* l1_before) {
  if (values.size() == 0) throw ValidationError("empty probability vector");
  clamp_roundoff(values);
  const double l1 = values.sum();
  if (!(l1 > 0.0)) throw NumericalError("probability vector has zero mass");
  if (l1_before) *l1_before = l1;
  ProbVector p;
  p.values_ = values / l1;
  return p;
}

ProbVector ProbVector::clamped(Eigen::VectorXd values, double* min_entry, double* l1_before) {
  if (values.size() == 0) throw ValidationError("empty probability vector");
  if (!values.allFinite()) throw NumericalError("probability vector has a non-finite entry");
  if (min_entry) *min_entry = values.minCoeff();
  values = values.cwiseMax(0.0);
  return normalized(std::move(values), l1_before);
}

}  // namespace fpq
