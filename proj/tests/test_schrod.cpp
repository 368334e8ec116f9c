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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fpq/classical.hpp"
#include "fpq/errors.hpp"
#include "fpq/observables.hpp"
#include "fpq/schrodinger.hpp"
#include "models.hpp"
#include "oracles.hpp"

namespace fpq {
namespace {

using testing::exp1_generator;
using cd = std::complex<double>;
const cd kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

ProbVector centre_delta() {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(21);
  v[10] = 1.0;
  return ProbVector(v);
}

TEST(Register, Layout) {
  const auto reg = FourierRegister::make(10.0, 0.01);
  ASSERT_EQ(reg.size(), 2001u);
  EXPECT_EQ(reg.half_size(), 1000u);
  EXPECT_EQ(reg.eta[reg.zero_index()], 0.0);
  EXPECT_NEAR(reg.weights[reg.zero_index()], 2.0, 1e-15);
  for (std::size_t k = 0; k < reg.size(); ++k) {
    EXPECT_NEAR(reg.eta[k], -reg.eta[reg.size() - 1 - k], 1e-12);
    EXPECT_EQ(reg.weights[k], reg.weights[reg.size() - 1 - k]);
    EXPECT_GT(reg.weights[k], 0.0);
    EXPECT_NEAR(reg.weights[k], 2.0 / (1.0 + 4.0 * kPi * kPi * reg.eta[k] * reg.eta[k]), 1e-15);
  }
  EXPECT_NEAR(reg.d_w(), 0.05, 1e-15);
  EXPECT_EQ(reg.w_points(), 1000u);
}

TEST(Register, Rejections) {
  EXPECT_THROW(FourierRegister::make(0.05, 0.01), ValidationError);  // too few w points
  EXPECT_THROW(FourierRegister::make(1.0, 0.3), ValidationError);
  EXPECT_THROW(FourierRegister::make(-1.0, 0.01), ValidationError);
}

TEST(Split, Identities) {
  const auto R = exp1_generator();
  const auto split = split_hermitian(R);
  const Eigen::MatrixXd H(split.hermitian), A(split.anti_hermitian);
  EXPECT_LE((H + A - R.dense()).cwiseAbs().maxCoeff(), 1e-15 * R.dense().cwiseAbs().maxCoeff());
  EXPECT_EQ((H - H.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((A + A.transpose()).cwiseAbs().maxCoeff(), 0.0);

  Eigen::MatrixXd S = oracle::random_conserving(5, 2);
  S = (S + S.transpose()).eval();
  EXPECT_EQ(Eigen::MatrixXd(split_hermitian(generator_from_dense(S)).anti_hermitian).cwiseAbs().maxCoeff(), 0.0);
  Eigen::MatrixXd K = oracle::random_conserving(5, 3);
  K = (K - K.transpose()).eval();
  EXPECT_EQ(Eigen::MatrixXd(split_hermitian(generator_from_dense(K)).hermitian).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, MatchesDirectExponential) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Eigen::MatrixXd R = oracle::random_conserving(4, seed);
    const auto split = split_hermitian(generator_from_dense(R));
    const Eigen::MatrixXd Rh = 0.5 * (R + R.transpose()), Ra = 0.5 * (R - R.transpose());
    for (double eta : {0.0, 0.7, -2.5}) {
      const Eigen::MatrixXcd H = build_hs(split, eta);
      EXPECT_LE((H - H.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
      const double t = 0.8;
      const Eigen::MatrixXcd lhs = oracle::taylor_expm(Eigen::MatrixXcd(-kI * t * H));
      const Eigen::MatrixXcd rhs = oracle::taylor_expm(
          Eigen::MatrixXcd(t * (-2.0 * kPi * kI * eta * Rh.cast<cd>() + Ra.cast<cd>())));
      EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_LE((build_hs(split, 0.0) - kI * Ra.cast<cd>()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Bessel, MatchesStandardLibrary) {
  for (double z : {0.0, 0.1, 1.0, 7.3, 40.0, 250.0, 1500.0}) {
    const auto J = bessel_j_sequence(z);
    ASSERT_GE(J.size(), 1u);
    for (std::size_t k = 0; k < J.size() && k < 60; ++k)
      EXPECT_NEAR(J[k], std::cyl_bessel_j(static_cast<double>(k), z), 1e-12) << "z=" << z << " k=" << k;
  }
  const auto J = bessel_j_sequence(30.0);
  EXPECT_GT(J.size(), 30u);
  EXPECT_LE(std::abs(J.back()), 1e-16);
}

TEST(Chebyshev, MatchesDenseExponential) {
  const auto R = exp1_generator();
  const auto split = split_hermitian(R);
  const Eigen::VectorXcd v = oracle::random_probability(21, 4).cast<cd>();
  for (double eta : {0.0, 0.37, -1.3, 9.99}) {
    const ChebyshevPropagator prop(split, eta);
    const Eigen::MatrixXcd H = build_hs(split, eta);
    for (double tau : {0.0, 0.1, 1.0}) {
      const Eigen::VectorXcd exact = oracle::taylor_expm(Eigen::MatrixXcd(-kI * tau * H)) * v;
      const Eigen::VectorXcd got = prop.apply(v, tau);
      EXPECT_LE((got - exact).cwiseAbs().maxCoeff(), 1e-10) << "eta=" << eta << " tau=" << tau;
      EXPECT_NEAR(got.norm(), v.norm(), 1e-12);
    }
  }
  EXPECT_THROW(ChebyshevPropagator(split, 0.5).apply(v, -1.0), ValidationError);
}

TEST(Chebyshev, GershgorinIntervalContainsSpectrum) {
  const auto split = split_hermitian(exp1_generator());
  for (double eta : {0.0, 2.0, -5.0}) {
    const auto [lo, hi] = hs_spectral_bounds(split, eta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(build_hs(split, eta));
    EXPECT_GE(es.eigenvalues().minCoeff(), lo - 1e-12);
    EXPECT_LE(es.eigenvalues().maxCoeff(), hi + 1e-12);
  }
}

TEST(Evolve, InitialAndNormPreservation) {
  const auto reg = FourierRegister::make(2.0, 0.05);
  const auto split = split_hermitian(exp1_generator());
  const auto p0 = centre_delta();
  const auto at0 = schrod_evolve(reg, split, p0, 0.0);
  const auto at1 = schrod_evolve(reg, split, p0, 1.0);
  for (std::size_t k = 0; k < reg.size(); ++k) {
    EXPECT_LE((at0[k] - reg.weights[k] * p0.values().cast<cd>()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(at1[k].norm(), reg.weights[k] * p0.values().norm(), 1e-12);
  }
}

TEST(Evolve, ZeroGeneratorIsStatic) {
  const auto reg = FourierRegister::make(2.0, 0.05);
  const auto split = split_hermitian(generator_from_dense(Eigen::MatrixXd::Zero(3, 3)));
  const ProbVector p0(Eigen::Vector3d(0.2, 0.5, 0.3));
  const auto a = schrod_evolve(reg, split, p0, 0.0), b = schrod_evolve(reg, split, p0, 3.0);
  for (std::size_t k = 0; k < reg.size(); ++k) EXPECT_LE((a[k] - b[k]).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Recover, ZeroGeneratorQuadrature) {
  // The raw integral is the discretized int_0^inf e^{-w} dw = 1.
  const auto reg = FourierRegister::make(10.0, 0.01);
  const auto split = split_hermitian(generator_from_dense(Eigen::MatrixXd::Zero(3, 3)));
  const ProbVector p0(Eigen::Vector3d(0.2, 0.5, 0.3));
  const auto rec = schrod_recover(reg, schrod_evolve(reg, split, p0, 2.0));
  EXPECT_NEAR(rec.raw_l1, 1.0, 1e-3);
  EXPECT_LE((rec.p.values() - p0.values()).lpNorm<1>(), 1e-3);
  EXPECT_FALSE(rec.aliasing_flag);
}

TEST(Recover, KernelMatchesDirectSum) {
  const auto reg = FourierRegister::make(1.0, 0.1);
  const auto K = recovery_kernel(reg, 0.0);
  ASSERT_EQ(K.size(), reg.size());
  const double dw = reg.d_w();
  const std::size_t M = reg.w_points();
  for (std::size_t k = 0; k < reg.size(); ++k) {
    cd direct = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const double w = dw * static_cast<double>(m);
      const double q = (k == 0 || k + 1 == reg.size()) ? 0.5 : 1.0;
      direct += (m == 0 ? 0.5 : 1.0) * dw * reg.d_eta * q * std::exp(2.0 * kPi * kI * w * reg.eta[k]);
    }
    EXPECT_NEAR(std::abs(K[k] - direct), 0.0, 1e-12);
  }
}

TEST(Recover, RealOutputBySymmetry) {
  const auto reg = FourierRegister::make(5.0, 0.01);
  const auto split = split_hermitian(exp1_generator());
  const auto rec = schrod_recover(reg, schrod_evolve(reg, split, centre_delta(), 0.5));
  EXPECT_LE(rec.max_imag, 1e-8);
}

TEST(Propagate, SingleShotMatchesEvolveAndRecover) {
  const auto reg = FourierRegister::make(5.0, 0.01);
  const auto R = exp1_generator();
  const auto split = split_hermitian(R);
  const std::vector<double> times{0.0, 0.3};
  const auto run = schrod_propagate(R, centre_delta(), reg, times);
  const auto rec = schrod_recover(reg, schrod_evolve(reg, split, centre_delta(), 0.3));
  EXPECT_LE(trace_distance(run.trajectory.states[1], rec.p), 1e-10);
  EXPECT_LE(trace_distance(run.trajectory.states[0], centre_delta()), 1e-3);
}

TEST(Propagate, SteppedSpectralTracksExpm) {
  const auto reg = FourierRegister::make(10.0, 0.01);
  const auto R = exp1_generator();
  const auto times = uniform_times(0.1, 20);
  SchrodOptions opt;
  opt.recovery_start = SchrodOptions::RecoveryStart::spectral;
  opt.step = 0.1;
  const auto run = schrod_propagate(R, centre_delta(), reg, times, opt);
  const auto ref = expm_propagate(R, centre_delta(), times);
  double gap = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) gap = std::max(gap, trace_distance(run.trajectory.states[i], ref.states[i]));
  EXPECT_LE(gap, 0.05);
  EXPECT_EQ(run.restarts, 20);
  EXPECT_LE(run.max_norm_deviation, 1e-10);
}

TEST(Propagate, RegisterResolutionConvergence) {
  const auto R = exp1_generator();
  const auto times = uniform_times(0.1, 10);
  SchrodOptions opt;
  opt.recovery_start = SchrodOptions::RecoveryStart::spectral;
  opt.step = 0.1;
  const auto ref = expm_propagate(R, centre_delta(), times).states.back();
  std::vector<double> err;
  for (double d_eta : {0.04, 0.02, 0.01}) {
    const auto reg = FourierRegister::make(10.0, d_eta);
    err.push_back(trace_distance(schrod_propagate(R, centre_delta(), reg, times, opt).trajectory.states.back(), ref));
  }
  EXPECT_LE(err[1], err[0]);
  EXPECT_LE(err[2], err[1]);
}

TEST(Propagate, Preconditions) {
  const auto reg = FourierRegister::make(2.0, 0.05);
  Eigen::MatrixXd M(2, 2);
  M << 0.5, 0.0, 0.0, -0.5;
  const std::vector<double> times{1.0};
  EXPECT_THROW(schrod_propagate(generator_from_dense(M), ProbVector(Eigen::Vector2d(0.5, 0.5)), reg, times),
               ValidationError);
  SchrodOptions opt;
  opt.step = 0.3;
  const std::vector<double> bad{0.0, 0.5};
  EXPECT_THROW(schrod_propagate(exp1_generator(), centre_delta(), reg, bad, opt), ValidationError);
}

TEST(PropagatorCheck, ZeroGenerator) {
  // int w(eta) e^{2 pi i eta s} d eta = e^{-s}; the only error is quadrature.
  const auto R = generator_from_dense(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_LE(propagator_check(R, 1.0, 1.0, 50.0, 0.002), 1e-3);
}

TEST(PropagatorCheck, RandomGenerators) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto R = generator_from_dense(oracle::random_doubly_conserving(4, seed));
    EXPECT_LE(propagator_check(R, 0.5, 0.3, 50.0, 0.002), 1e-3);
    const double r1 = propagator_check(R, 0.5, 0.3, 25.0, 0.002);
    const double r2 = propagator_check(R, 0.5, 0.3, 50.0, 0.002);
    const double r3 = propagator_check(R, 0.5, 0.3, 100.0, 0.002);
    EXPECT_LT(r2, r1);
    EXPECT_LT(r3, r2);
  }
  EXPECT_THROW(propagator_check(exp1_generator(), 0.5, 0.0, 10.0, 0.01), ValidationError);
}

}  // namespace
}  // namespace fpq
