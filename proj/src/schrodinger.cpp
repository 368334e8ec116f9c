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

#include "fpq/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fpq/errors.hpp"
#include "fpq/linalg.hpp"

namespace fpq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using cd = std::complex<double>;

double hermitian_lambda_max(const Eigen::SparseMatrix<double>& S) {
  if (S.rows() == 0) return 0.0;
  if (S.rows() <= static_cast<Eigen::Index>(ValidationReport::kDenseSpectrumLimit)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(S), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  // Gershgorin upper bound.
  Eigen::VectorXd centre = Eigen::VectorXd::Zero(S.rows());
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(S.rows());
  for (Eigen::Index j = 0; j < S.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, j); it; ++it) {
      if (it.row() == j) centre[j] += it.value();
      else radius[j] += std::abs(it.value());
    }
  return (centre + radius).maxCoeff();
}

}  // namespace

FourierRegister FourierRegister::make(double eta_max, double d_eta) {
  if (!(eta_max > 0.0) || !(d_eta > 0.0) || !std::isfinite(eta_max) || !std::isfinite(d_eta))
    throw ValidationError("Fourier register needs eta_max > 0 and d_eta > 0");
  const double ratio = eta_max / d_eta;
  const double K = std::round(ratio);
  if (std::abs(ratio - K) > 1e-9 * std::max(1.0, ratio))
    throw ValidationError("eta_max must be an integer multiple of d_eta");
  if (K < 8.0) {
    std::ostringstream msg;
    msg << "Fourier register resolves only " << K << " nonnegative w points (need >= 8); raise eta_max / d_eta";
    throw ValidationError(msg.str());
  }
  FourierRegister reg;
  reg.eta_max = eta_max;
  reg.d_eta = d_eta;
  const auto k_max = static_cast<long>(K);
  reg.eta.reserve(static_cast<std::size_t>(2 * k_max + 1));
  reg.weights.reserve(reg.eta.capacity());
  for (long k = -k_max; k <= k_max; ++k) {
    const double e = static_cast<double>(k) * d_eta;
    reg.eta.push_back(e);
    reg.weights.push_back(2.0 / (1.0 + kTwoPi * kTwoPi * e * e));
  }
  return reg;
}

std::size_t FourierRegister::w_points() const { return half_size(); }

HermitianSplit split_hermitian(const GeneratorMatrix& R) {
  const Eigen::SparseMatrix<double> Rt = R.matrix.transpose();
  HermitianSplit split;
  split.hermitian = 0.5 * (R.matrix + Rt);
  split.anti_hermitian = 0.5 * (R.matrix - Rt);
  split.hermitian.prune(0.0);
  split.anti_hermitian.prune(0.0);
  return split;
}

Eigen::MatrixXcd build_hs(const HermitianSplit& split, double eta) {
  const Eigen::MatrixXd h = Eigen::MatrixXd(split.hermitian);
  const Eigen::MatrixXd a = Eigen::MatrixXd(split.anti_hermitian);
  Eigen::MatrixXcd H(h.rows(), h.cols());
  H.real() = kTwoPi * eta * h;
  H.imag() = a;
  const double asym = max_abs(Eigen::MatrixXcd(H - H.adjoint()));
  if (asym > 1e-12 * std::max(1.0, max_abs(H))) throw NumericalError("H_S is not Hermitian");
  return H;
}

std::pair<double, double> hs_spectral_bounds(const HermitianSplit& split, double eta) {
  const Eigen::Index n = split.hermitian.rows();
  if (n == 0) return {0.0, 0.0};
  const double s = kTwoPi * eta;
  Eigen::SparseMatrix<cd> H = (s * split.hermitian).cast<cd>() + cd(0.0, 1.0) * split.anti_hermitian.cast<cd>();
  Eigen::VectorXd centre = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < H.outerSize(); ++j)
    for (Eigen::SparseMatrix<cd>::InnerIterator it(H, j); it; ++it) {
      if (it.row() == j) centre[j] += it.value().real();
      else radius[j] += std::abs(it.value());
    }
  return {(centre - radius).minCoeff(), (centre + radius).maxCoeff()};
}

std::vector<double> bessel_j_sequence(double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw ValidationError("Bessel argument must be finite and >= 0");
  if (z == 0.0) return {1.0};
  const int top = static_cast<int>(std::ceil(z + 30.0 + 10.0 * std::cbrt(z))) + 20;
  std::vector<double> j(static_cast<std::size_t>(top) + 2, 0.0);
  j[static_cast<std::size_t>(top)] = 1e-300;
  for (int k = top; k >= 1; --k) {
    const auto uk = static_cast<std::size_t>(k);
    j[uk - 1] = (2.0 * k / z) * j[uk] - j[uk + 1];
    if (std::abs(j[uk - 1]) > 1e250)
      for (std::size_t m = uk - 1; m < j.size(); ++m) j[m] *= 1e-250;
  }
  double norm = j[0];
  for (std::size_t k = 2; k < j.size(); k += 2) norm += 2.0 * j[k];
  for (double& v : j) v /= norm;
  std::size_t last = 0;
  for (std::size_t k = 0; k < j.size(); ++k)
    if (std::abs(j[k]) > 1e-17) last = k;
  j.resize(last + 1);
  return j;
}

ChebyshevPropagator::ChebyshevPropagator(const HermitianSplit& split, double eta) : n_(split.hermitian.rows()) {
  const double s = kTwoPi * eta;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(2 * (split.hermitian.nonZeros() + split.anti_hermitian.nonZeros())));
  for (Eigen::Index j = 0; j < split.hermitian.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(split.hermitian, j); it; ++it) {
      trips.emplace_back(it.row(), j, s * it.value());
      trips.emplace_back(it.row() + n_, j + n_, s * it.value());
    }
  for (Eigen::Index j = 0; j < split.anti_hermitian.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(split.anti_hermitian, j); it; ++it) {
      trips.emplace_back(it.row() + n_, j, it.value());
      trips.emplace_back(it.row(), j + n_, -it.value());
    }
  block_.resize(2 * n_, 2 * n_);
  block_.setFromTriplets(trips.begin(), trips.end());
  const auto [lo, hi] = hs_spectral_bounds(split, eta);
  center_ = 0.5 * (lo + hi);
  half_width_ = 0.5 * (hi - lo);
}

Eigen::VectorXcd ChebyshevPropagator::apply(const Eigen::VectorXcd& v, double tau) const {
  if (v.size() != n_) throw ValidationError("Chebyshev propagator: vector size mismatch");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("Chebyshev propagator needs tau >= 0");
  const cd phase = std::polar(1.0, -center_ * tau);
  if (tau == 0.0 || half_width_ <= 1e-300) return phase * v;

  const Eigen::Index n = n_;
  Eigen::VectorXd acc_re = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd acc_im = Eigen::VectorXd::Zero(n);
  auto accumulate = [&](cd c, const Eigen::VectorXd& t) {
    acc_re += c.real() * t.head(n) - c.imag() * t.tail(n);
    acc_im += c.real() * t.tail(n) + c.imag() * t.head(n);
  };
  auto apply_x = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd {
    return (block_ * t - center_ * t) / half_width_;
  };

  const std::vector<double> J = bessel_j_sequence(half_width_ * tau);
  static const cd kMinusIPow[4] = {cd(1, 0), cd(0, -1), cd(-1, 0), cd(0, 1)};

  Eigen::VectorXd t_prev(2 * n);
  t_prev << v.real(), v.imag();
  accumulate(cd(J[0], 0.0), t_prev);
  if (J.size() > 1) {
    Eigen::VectorXd t_cur = apply_x(t_prev);
    accumulate(2.0 * J[1] * kMinusIPow[1], t_cur);
    for (std::size_t k = 2; k < J.size(); ++k) {
      Eigen::VectorXd t_next = 2.0 * apply_x(t_cur) - t_prev;
      accumulate(2.0 * J[k] * kMinusIPow[k % 4], t_next);
      t_prev.swap(t_cur);
      t_cur.swap(t_next);
    }
  }
  Eigen::VectorXcd out(n);
  out.real() = acc_re;
  out.imag() = acc_im;
  return phase * out;
}

double spectral_abscissa_estimate(const GeneratorMatrix& R) {
  const Eigen::Index n = R.matrix.rows();
  if (n == 0) return 0.0;
  if (n <= static_cast<Eigen::Index>(ValidationReport::kDenseSpectrumLimit)) return spectral_abscissa(R);
  // Power iteration on I + hR; for small h the dominant modulus tracks the
  // rightmost eigenvalue.
  double diag_max = 0.0;
  for (Eigen::Index j = 0; j < R.matrix.outerSize(); ++j) diag_max = std::max(diag_max, std::abs(R.matrix.coeff(j, j)));
  const double h = diag_max > 0.0 ? 0.5 / diag_max : 1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double rho = 1.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd y = x + h * (R.matrix * x);
    rho = y.norm();
    if (rho == 0.0) return -1.0 / h;
    x = y / rho;
  }
  return (rho - 1.0) / h;
}

std::vector<Eigen::VectorXcd> schrod_evolve(const FourierRegister& reg, const HermitianSplit& split,
                                            const ProbVector& p0, double t) {
  if (p0.size() != split.dim()) throw ValidationError("initial state size does not match the generator");
  std::vector<Eigen::VectorXcd> out;
  out.reserve(reg.size());
  for (std::size_t k = 0; k < reg.size(); ++k) {
    const Eigen::VectorXcd v0 = (reg.weights[k] * p0.values()).cast<cd>();
    out.push_back(ChebyshevPropagator(split, reg.eta[k]).apply(v0, t));
  }
  return out;
}

std::vector<cd> recovery_kernel(const FourierRegister& reg, double w_start) {
  const std::size_t m_count = reg.w_points();
  const double dw = reg.d_w();
  const double scale = std::exp(w_start) * dw * reg.d_eta;
  std::vector<cd> kernel(reg.size());
  for (std::size_t k = 0; k < reg.size(); ++k) {
    const double eta = reg.eta[k];
    const double q = (k == 0 || k + 1 == reg.size()) ? 0.5 : 1.0;
    cd sum;
    if (eta == 0.0) {
      sum = cd(static_cast<double>(m_count) - 0.5, 0.0);
    } else {
      // sum_{m < M} z^m - 1/2 with z = exp(2 pi i dw eta)
      const cd z = std::polar(1.0, kTwoPi * dw * eta);
      const cd zM = std::polar(1.0, kTwoPi * dw * eta * static_cast<double>(m_count));
      sum = (1.0 - zM) / (1.0 - z) - 0.5;
    }
    kernel[k] = scale * q * std::polar(1.0, kTwoPi * w_start * eta) * sum;
  }
  return kernel;
}

Recovery schrod_recover(const FourierRegister& reg, std::span<const Eigen::VectorXcd> pbar, double w_start) {
  if (pbar.size() != reg.size()) throw ValidationError("recovery needs one vector per register point");
  if (pbar.empty()) throw ValidationError("empty register");
  const std::vector<cd> kernel = recovery_kernel(reg, w_start);
  Eigen::VectorXcd raw = Eigen::VectorXcd::Zero(pbar.front().size());
  for (std::size_t k = 0; k < reg.size(); ++k) raw += kernel[k] * pbar[k];
  Recovery r;
  r.max_imag = raw.size() ? raw.imag().cwiseAbs().maxCoeff() : 0.0;
  r.p = ProbVector::clamped(raw.real(), &r.min_entry, &r.raw_l1);
  r.aliasing_flag = r.min_entry < -1e-3;
  return r;
}

namespace {

void check_schrod_inputs(const GeneratorMatrix& R, const ProbVector& p0, std::span<const double> times,
                         const SchrodOptions& options) {
  if (p0.size() != static_cast<std::size_t>(R.dim())) throw ValidationError("initial state size does not match the generator");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0.0) || !std::isfinite(times[j])) throw ValidationError("snapshot times must be finite and >= 0");
    if (j > 0 && times[j] < times[j - 1]) throw ValidationError("snapshot times must be nondecreasing");
  }
  if (!(options.step >= 0.0) || !std::isfinite(options.step)) throw ValidationError("restart step must be >= 0");
  if (options.check_precondition) {
    const double abscissa = spectral_abscissa_estimate(R);
    if (abscissa > 1e-8) {
      std::ostringstream msg;
      msg << "generator spectral abscissa " << abscissa << " > 1e-8; Schrodingerisation recovery is invalid";
      throw ValidationError(msg.str());
    }
  }
}

// One register pass: encode p, evolve every eta >= 0 for tau, recover.
Eigen::VectorXd register_pass(const HermitianSplit& split, const FourierRegister& reg, const Eigen::VectorXd& p,
                              double tau, const std::vector<cd>& kernel, double& norm_dev) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p.size());
  const double p_norm = p.norm();
  for (std::size_t k = 0; k <= reg.half_size(); ++k) {
    const std::size_t idx = reg.zero_index() + k;
    const Eigen::VectorXcd v0 = (reg.weights[idx] * p).cast<cd>();
    const Eigen::VectorXcd v = ChebyshevPropagator(split, reg.eta[idx]).apply(v0, tau);
    const double ref = reg.weights[idx] * p_norm;
    if (ref > 0.0) norm_dev = std::max(norm_dev, std::abs(v.norm() / ref - 1.0));
    const cd c = kernel[idx];
    acc += (k == 0 ? 1.0 : 2.0) * (c.real() * v.real() - c.imag() * v.imag());
  }
  return acc;
}

}  // namespace

SchrodRun schrod_propagate(const GeneratorMatrix& R, const ProbVector& p0, const FourierRegister& reg,
                           std::span<const double> times, const SchrodOptions& options) {
  check_schrod_inputs(R, p0, times, options);
  const HermitianSplit split = split_hermitian(R);
  const double lambda_max = std::max(0.0, hermitian_lambda_max(split.hermitian));
  const bool spectral = options.recovery_start == SchrodOptions::RecoveryStart::spectral;
  auto kernel_for = [&](double tau) { return recovery_kernel(reg, spectral ? lambda_max * tau : 0.0); };

  const Eigen::Index n = R.dim();
  SchrodRun run;
  const std::size_t K = reg.half_size();
  run.eta_norms.assign(K + 1, 0.0);
  auto record = [&](double t, const Eigen::VectorXd& raw, double worst_min) {
    double min_entry = 0.0;
    double l1 = 0.0;
    ProbVector p = ProbVector::clamped(raw, &min_entry, &l1);
    min_entry = std::min(min_entry, worst_min);
    run.raw_min_entry.push_back(min_entry);
    run.aliasing_flags.push_back(min_entry < -1e-3);
    run.trajectory.push(t, std::move(p), std::abs(1.0 - l1), min_entry);
  };

  if (options.step > 0.0) {
    Eigen::VectorXd p = p0.values();
    double t_now = 0.0;
    for (double t : times) {
      const double span = t - t_now;
      const double ratio = span / options.step;
      const double n_sub = std::round(ratio);
      if (std::abs(ratio - n_sub) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "snapshot time " << t << " is not a multiple of the restart step " << options.step;
        throw ValidationError(msg.str());
      }
      Eigen::VectorXd raw = p;
      double worst_min = 0.0;
      if (n_sub > 0.0) {
        const double tau = span / n_sub;
        const std::vector<cd> kernel = kernel_for(tau);
        for (long s = 0; s < static_cast<long>(n_sub); ++s) {
          raw = register_pass(split, reg, p, tau, kernel, run.max_norm_deviation);
          double m = 0.0;
          p = ProbVector::clamped(raw, &m).values();
          worst_min = std::min(worst_min, m);
          ++run.restarts;
        }
      }
      record(t, raw, worst_min);
      t_now = t;
    }
    for (std::size_t k = 0; k <= K; ++k) run.eta_norms[k] = reg.weights[reg.zero_index() + k] * p.norm();
  } else {
    std::vector<std::vector<cd>> kernels;
    kernels.reserve(times.size());
    for (double t : times) kernels.push_back(kernel_for(t));
    std::vector<Eigen::VectorXd> acc(times.size(), Eigen::VectorXd::Zero(n));
    const double p0_norm = p0.values().norm();
    for (std::size_t k = 0; k <= K; ++k) {
      const std::size_t idx = reg.zero_index() + k;
      const ChebyshevPropagator prop(split, reg.eta[idx]);
      const double mult = k == 0 ? 1.0 : 2.0;
      const double ref_norm = reg.weights[idx] * p0_norm;
      Eigen::VectorXcd v = (reg.weights[idx] * p0.values()).cast<cd>();
      double t_prev = 0.0;
      for (std::size_t j = 0; j < times.size(); ++j) {
        v = prop.apply(v, times[j] - t_prev);
        t_prev = times[j];
        if (ref_norm > 0.0) run.max_norm_deviation = std::max(run.max_norm_deviation, std::abs(v.norm() / ref_norm - 1.0));
        const cd c = kernels[j][idx];
        acc[j] += mult * (c.real() * v.real() - c.imag() * v.imag());
      }
      run.eta_norms[k] = v.norm();
    }
    for (std::size_t j = 0; j < times.size(); ++j) record(times[j], acc[j], 0.0);
  }

  auto& meta = run.trajectory.metadata;
  meta["solver"] = "schrodingerisation";
  meta["eta_max"] = std::to_string(reg.eta_max);
  meta["d_eta"] = std::to_string(reg.d_eta);
  meta["recovery_start"] = spectral ? "spectral" : "zero";
  meta["restart_step"] = std::to_string(options.step);
  meta["lambda_max_hermitian"] = std::to_string(lambda_max);
  return run;
}

double propagator_check(const GeneratorMatrix& R, double t, double s, double eta_max, double d_eta) {
  if (R.dim() > 64) throw ValidationError("propagator check is dense; dimension must be <= 64");
  if (!(t >= 0.0) || !(s > 0.0)) throw ValidationError("propagator check needs t >= 0 and s > 0");
  const FourierRegister reg = FourierRegister::make(eta_max, d_eta);
  const HermitianSplit split = split_hermitian(R);
  const Eigen::Index n = R.dim();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < reg.size(); ++k) {
    const double q = (k == 0 || k + 1 == reg.size()) ? 0.5 : 1.0;
    const cd c = q * reg.d_eta * reg.weights[k] * std::polar(1.0, kTwoPi * reg.eta[k] * s);
    P += c * hermitian_propagator(build_hs(split, reg.eta[k]), t);
  }
  const Eigen::MatrixXd exact = std::exp(-s) * expm<double>(Eigen::MatrixXd(R.matrix) * t);
  return max_abs(Eigen::MatrixXcd(P - exact.cast<cd>()));
}

}  // namespace fpq
