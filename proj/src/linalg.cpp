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

#include "fpq/linalg.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>

#include "fpq/errors.hpp"

namespace fpq {

Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& H, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
  if (eig.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const std::complex<double> minus_i(0.0, -1.0);
  Eigen::VectorXcd phase = (minus_i * t * lambda.cast<std::complex<double>>()).array().exp();
  return eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S, double clamp_below, double reject_below) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -reject_below) {
      std::ostringstream msg;
      msg << "matrix is not positive semidefinite: eigenvalue " << lambda[i];
      throw NumericalError(msg.str());
    }
    lambda[i] = lambda[i] < clamp_below ? 0.0 : std::sqrt(lambda[i]);
  }
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace fpq
