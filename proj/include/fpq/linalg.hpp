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

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace fpq {

/// Matrix exponential by scaling and squaring with diagonal Pade
/// approximants of degree 3, 5, 7, 9 or 13 (Higham, SIAM J. Matrix Anal.
/// Appl. 26(4), 2005). Works for real and complex dense matrices.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = A.rows();
  const Mat I = Mat::Identity(n, n);
  if (n == 0) return Mat(0, 0);

  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  auto pade = [&](const Mat& X, const auto& b) -> Mat {
    // Odd coefficients go to U, even ones to V.
    const Mat X2 = X * X;
    Mat P = Mat::Identity(n, n);
    Mat U = Mat::Zero(n, n);
    Mat V = Mat::Zero(n, n);
    for (std::size_t k = 0; k < b.size(); k += 2) {
      V += static_cast<double>(b[k]) * P;
      if (k + 1 < b.size()) U += static_cast<double>(b[k + 1]) * P;
      P = P * X2;
    }
    U = X * U;
    return (V - U).partialPivLu().solve(V + U);
  };

  static constexpr std::array<double, 4> b3{120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                            25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                             2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  if (norm1 <= 1.495585217958292e-2) return pade(A, b3);
  if (norm1 <= 2.539398330063230e-1) return pade(A, b5);
  if (norm1 <= 9.504178996162932e-1) return pade(A, b7);
  if (norm1 <= 2.097847961257068e0) return pade(A, b9);

  constexpr double theta13 = 5.371920351148152;
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Mat X = A / std::ldexp(1.0, s);

  static constexpr std::array<double, 14> b{64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                            1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                            670442572800.0,      33522128640.0,       1323241920.0,
                                            40840800.0,          960960.0,            16380.0,
                                            182.0,               1.0};
  const Mat X2 = X * X;
  const Mat X4 = X2 * X2;
  const Mat X6 = X4 * X2;
  const Mat U = X * (X6 * (b[13] * X6 + b[11] * X4 + b[9] * X2) + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * I);
  const Mat V = X6 * (b[12] * X6 + b[10] * X4 + b[8] * X2) + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * I;
  Mat E = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < s; ++k) E = E * E;
  return E;
}

/// exp(-i H t) for Hermitian H via eigendecomposition.
Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& H, double t);

/// Principal square root of a symmetric matrix that should be positive
/// semidefinite. Eigenvalues in [-reject_below, clamp_below) are set to zero;
/// anything more negative throws NumericalError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S, double clamp_below, double reject_below);

// max_ij |M_ij|
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& M) {
  return M.size() == 0 ? 0.0 : static_cast<double>(M.cwiseAbs().maxCoeff());
}

}  // namespace fpq
