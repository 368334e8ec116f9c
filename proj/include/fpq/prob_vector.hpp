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

#include <Eigen/Dense>

namespace fpq {

/// Nonnegative vector with unit L1 norm. Entries in [-1e-14, 0) are treated
/// as roundoff and clamped to zero on construction.
class ProbVector {
 public:
  static constexpr double kNormTolerance = 1e-12;
  static constexpr double kNegativeTolerance = 1e-14;

  ProbVector() = default;
  // Throws ValidationError if `values` is not already a probability vector.
  explicit ProbVector(Eigen::VectorXd values);

  // Clamps tiny negatives, then divides by the L1 norm. The norm before
  // rescaling is written to *l1_before when given. Throws if any entry is
  // below -kNegativeTolerance or the norm is not positive.
  static ProbVector normalized(Eigen::VectorXd values, double* l1_before = nullptr);

  // Like normalized(), but clamps every negative entry; the pre-clamp
  // minimum is written to *min_entry when given.
  static ProbVector clamped(Eigen::VectorXd values, double* min_entry = nullptr, double* l1_before = nullptr);

  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  Eigen::VectorXd values_;
};

}  // namespace fpq
