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

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fpq/classical.hpp"
#include "fpq/generator.hpp"

namespace fpq {

/// Symmetric grid eta_k = k d_eta, |k| <= K = round(eta_max / d_eta), with
/// weights w(eta) = 2 / (1 + 4 pi^2 eta^2), the Fourier transform of e^{-|w|}.
struct FourierRegister {
  double eta_max = 0.0;
  double d_eta = 0.0;
  std::vector<double> eta;
  std::vector<double> weights;

  static FourierRegister make(double eta_max, double d_eta);

  std::size_t size() const { return eta.size(); }
  std::size_t half_size() const { return (eta.size() - 1) / 2; }  // K
  std::size_t zero_index() const { return half_size(); }
  // Conjugate grid: spacing 1 / (2 eta_max), nonnegative extent [0, 1 / (2 d_eta)).
  double d_w() const { return 1.0 / (2.0 * eta_max); }
  std::size_t w_points() const;
};

/// R = R_h + R_a with R_h = (R + R^T) / 2 and R_a = (R - R^T) / 2.
struct HermitianSplit {
  Eigen::SparseMatrix<double> hermitian;
  Eigen::SparseMatrix<double> anti_hermitian;

  std::size_t dim() const { return static_cast<std::size_t>(hermitian.rows()); }
};

HermitianSplit split_hermitian(const GeneratorMatrix& R);

/// H_S(eta) = 2 pi eta R_h + i R_a (dense); Hermiticity is asserted.
Eigen::MatrixXcd build_hs(const HermitianSplit& split, double eta);

// Gershgorin interval [lo, hi] containing the spectrum of H_S(eta).
std::pair<double, double> hs_spectral_bounds(const HermitianSplit& split, double eta);

/// exp(-i H_S(eta) tau) v by Chebyshev expansion on the Gershgorin interval,
/// Bessel coefficients truncated below 1e-17 relative magnitude. H_S is kept
/// in real 2n x 2n form [[s R_h, -R_a], [R_a, s R_h]], s = 2 pi eta.
class ChebyshevPropagator {
 public:
  ChebyshevPropagator(const HermitianSplit& split, double eta);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double tau) const;

  double center() const { return center_; }
  double half_width() const { return half_width_; }

 private:
  Eigen::SparseMatrix<double> block_;
  Eigen::Index n_ = 0;
  double center_ = 0.0;
  double half_width_ = 0.0;
};

// J_0(z), ..., J_K(z) for z >= 0 by backward recurrence, truncated where the
// terms fall below 1e-17 past the turning point k ~ z.
std::vector<double> bessel_j_sequence(double z);

struct SchrodOptions {
  // Recovery integrates w over [w_start, 1 / (2 d_eta)) and rescales by
  // e^{w_start}. Zero reproduces the plain integral over w >= 0.
  enum class RecoveryStart { zero, spectral } recovery_start = RecoveryStart::zero;
  // Restart interval. Zero evolves each snapshot in one shot from p0; a
  // positive value recovers p and re-encodes the register every `step` time
  // units, so snapshot times must be multiples of it.
  double step = 0.0;
  // Skips the spectral-abscissa precondition (for deliberately invalid inputs in tests).
  bool check_precondition = true;
};

// Max real part of the spectrum (dense up to 2048, power iteration above).
double spectral_abscissa_estimate(const GeneratorMatrix& R);

/// pbar(t, eta_k) = exp(-i H_S(eta_k) t) (w(eta_k) p0) for every register point.
std::vector<Eigen::VectorXcd> schrod_evolve(const FourierRegister& reg, const HermitianSplit& split,
                                            const ProbVector& p0, double t);

struct Recovery {
  ProbVector p;
  double min_entry = 0.0;    // before clamping
  double max_imag = 0.0;     // largest |Im| of the raw recovered vector
  double raw_l1 = 0.0;       // L1 norm before renormalization
  bool aliasing_flag = false;  // min_entry < -1e-3
};

/// p = e^{w_start} sum_m c_m dw Re ptilde(w_m), ptilde(w) = d_eta sum_k
/// e^{2 pi i w eta_k} pbar_k, trapezoid weights c_m (half at the first node).
Recovery schrod_recover(const FourierRegister& reg, std::span<const Eigen::VectorXcd> pbar, double w_start = 0.0);

// Per-eta recovery weights K_k such that p = Re sum_k K_k pbar_k.
std::vector<std::complex<double>> recovery_kernel(const FourierRegister& reg, double w_start);

struct SchrodRun {
  Trajectory trajectory;
  std::vector<double> raw_min_entry;
  std::vector<bool> aliasing_flags;
  // max over eta and time of | |pbar(t, eta)| / |pbar(0, eta)| - 1 |
  double max_norm_deviation = 0.0;
  int restarts = 0;
  std::vector<double> eta_norms;  // |pbar(T, eta_k)|_2 at the final time, eta_k >= 0
};

/// Full emulation at the requested times. Without restarts, uses pbar(t, -eta) = conj pbar(t, eta)
/// (real R and p0), so only eta >= 0 is propagated.
SchrodRun schrod_propagate(const GeneratorMatrix& R, const ProbVector& p0, const FourierRegister& reg,
                           std::span<const double> times, const SchrodOptions& options = {});

/// max |P_S(t, s) - e^{-s} e^{R t}| with P_S(t, s) = int w(eta)
/// exp(-2 pi i eta (R_h t - s) + R_a t) d eta by the trapezoid rule on
/// [-eta_max, eta_max]. Dense; dim <= 64.
double propagator_check(const GeneratorMatrix& R, double t, double s, double eta_max, double d_eta);

}  // namespace fpq
