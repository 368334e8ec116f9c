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
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fpq/classical.hpp"
#include "fpq/errors.hpp"
#include "fpq/linalg.hpp"
#include "fpq/observables.hpp"
#include "models.hpp"
#include "oracles.hpp"

namespace fpq {
namespace {

using testing::custom_1d;
using testing::exp1_generator;

ProbVector delta(std::size_t n, std::size_t k) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(k)] = 1.0;
  return ProbVector(v);
}

const Grid& paper_grid() {
  static const Grid g = build_grid({Axis{"x", -2.0, 2.0, 21}});
  return g;
}

TEST(Expm, ZeroGeneratorIsIdentity) {
  const auto R = generator_from_dense(Eigen::MatrixXd::Zero(4, 4));
  const ProbVector p0(oracle::random_probability(4, 3));
  const std::vector<double> times{0.0, 1.0, 7.5};
  const auto traj = expm_propagate(R, p0, times);
  for (const auto& p : traj.states) EXPECT_LE((p.values() - p0.values()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Expm, TwoStateClosedForm) {
  const double a = 0.7, b = 0.2;
  Eigen::MatrixXd M(2, 2);
  M << -a, b, a, -b;
  const std::vector<double> times{0.0, 0.3, 1.0, 4.0, 20.0};
  const auto traj = expm_propagate(generator_from_dense(M), delta(2, 0), times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double p1 = b / (a + b) + a / (a + b) * std::exp(-(a + b) * times[i]);
    EXPECT_NEAR(traj.states[i][0], p1, 1e-12);
    EXPECT_NEAR(traj.states[i][1], 1.0 - p1, 1e-12);
  }
}

TEST(Expm, AgreesWithTaylorOnRandomGenerators) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd M = oracle::random_conserving(8, seed);
    EXPECT_LE((expm<double>(M) - oracle::taylor_expm(M)).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::MatrixXd M3 = 3.0 * M;
    EXPECT_LE((expm<double>(M3) - oracle::taylor_expm(M3)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Expm, LongTimeApproachesAnalyticSteadyState) {
  const std::vector<double> times{20.0};
  const auto traj = expm_propagate(exp1_generator(), delta(21, 10), times);
  const auto ps = steady_state_1d(0.5, 0.15, paper_grid());
  // The rates scheme's stationary state exp(-V) differs from the analytic one
  // only through the trapezoid quadrature of V.
  EXPECT_LE(trace_distance(traj.states.back(), ps), 0.05);
}

TEST(Expm, RejectsOversizedDimension) {
  const Grid g = build_grid({Axis{"x", -2, 2, 70}, Axis{"y", -2, 2, 70}});
  const auto R = assemble_generator(eval_coefficients(DriftDiffusionModel::spiral_2d(0.1, 0.15), g), Scheme::rates,
                                    BoundaryCondition::reflecting());
  const std::vector<double> times{1.0};
  EXPECT_THROW(expm_propagate(R, delta(R.dim(), 0), times), ValidationError);
}

TEST(Euler, ZeroStepsEchoesInitial) {
  const auto traj = euler_propagate(exp1_generator(), delta(21, 10), 0.1, 0);
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_EQ(traj.states[0][10], 1.0);
}

TEST(Euler, OneStepErrorIsSecondOrder) {
  const auto R = exp1_generator();
  const ProbVector p0(oracle::random_probability(21, 5));
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005}) {
    const Eigen::VectorXd exact = oracle::taylor_expm(Eigen::MatrixXd(dt * R.dense())) * p0.values();
    const auto e = euler_propagate(R, p0, dt, 1);
    err.push_back((e.states.back().values() - exact).lpNorm<1>());
  }
  EXPECT_NEAR(err[0] / err[1], 4.0, 0.4);
  EXPECT_NEAR(err[1] / err[2], 4.0, 0.4);
}

TEST(Euler, GlobalErrorIsFirstOrder) {
  const auto R = exp1_generator();
  const std::vector<double> T{1.0};
  const auto exact = expm_propagate(R, delta(21, 10), T).states.back();
  std::vector<double> gap;
  for (int n : {20, 40, 80}) gap.push_back(trace_distance(euler_propagate(R, delta(21, 10), 1.0 / n, n).states.back(), exact));
  EXPECT_NEAR(gap[0] / gap[1], 2.0, 0.2);
  EXPECT_NEAR(gap[1] / gap[2], 2.0, 0.2);
}

TEST(Euler, PaperRunIsBimodalNearFixedPoints) {
  const auto traj = euler_propagate(exp1_generator(), delta(21, 10), 0.1, 40);
  const Eigen::VectorXd& p = traj.states.back().values();
  // local maxima at the grid nodes nearest +-sqrt(2)
  Eigen::Index left = 0, right = 0;
  p.head(10).maxCoeff(&left);
  p.tail(10).maxCoeff(&right);
  EXPECT_NEAR(paper_grid().coordinate(static_cast<std::size_t>(left), 0), -std::sqrt(2.0), 0.2);
  EXPECT_NEAR(paper_grid().coordinate(static_cast<std::size_t>(right + 11), 0), std::sqrt(2.0), 0.2);
  EXPECT_GT(p[left], p[10]);
  EXPECT_NEAR(p[left], p[right + 11], 1e-12);
}

TEST(Euler, UnstableStepRaises) {
  const auto R = exp1_generator();
  const double dt = 3.0 / R.dense().diagonal().cwiseAbs().maxCoeff();
  EXPECT_THROW(euler_propagate(R, delta(21, 10), dt, 5), NumericalError);
}

TEST(MonteCarlo, NoDriftNoNoiseStaysPut) {
  const Grid g = build_grid({Axis{"x", -1, 1, 11}});
  const auto model = custom_1d([](double) { return 0.0; }, 0.0);
  const std::vector<double> x0{0.4};
  const auto h = sde_monte_carlo(model, g, x0, MonteCarloOptions{1e-3, 100, 500, 1});
  EXPECT_EQ(h[7], 1.0);
}

TEST(MonteCarlo, HeatKernelVariance) {
  const Grid g = build_grid({Axis{"x", -5, 5, 101}});
  const auto model = custom_1d([](double) { return 0.0; }, 0.15);
  const std::vector<double> x0{0.0};
  const auto h = sde_monte_carlo(model, g, x0, MonteCarloOptions{1e-3, 1000, 20000, 7});
  // 2 D t = 0.3; sampling sd 0.3 sqrt(2/n) ~ 0.003, binning adds h^2/12
  EXPECT_NEAR(variance(h, g)[0], 0.3, 0.015);
  EXPECT_NEAR(mean(h, g)[0], 0.0, 0.02);
}

TEST(MonteCarlo, DeterministicGivenSeed) {
  const auto model = DriftDiffusionModel::double_well_1d(0.5, 0.15);
  const std::vector<double> x0{0.0};
  const MonteCarloOptions opt{1e-2, 100, 2000, 42};
  const auto a = sde_monte_carlo(model, paper_grid(), x0, opt);
  const auto b = sde_monte_carlo(model, paper_grid(), x0, opt);
  EXPECT_TRUE(a.values() == b.values());
  MonteCarloOptions other = opt;
  other.seed = 43;
  EXPECT_FALSE(a.values() == sde_monte_carlo(model, paper_grid(), x0, other).values());
}

TEST(MonteCarlo, DoubleWellMatchesExpm) {
  const auto model = DriftDiffusionModel::double_well_1d(0.5, 0.15);
  const std::vector<double> x0{0.0};
  const auto h = sde_monte_carlo(model, paper_grid(), x0, MonteCarloOptions{1e-3, 4000, 20000, 3});
  const std::vector<double> T{4.0};
  const auto ref = expm_propagate(exp1_generator(), delta(21, 10), T).states.back();
  EXPECT_LE(trace_distance(h, ref), 0.08);
}

TEST(SteadyState, RatioAtFixedPoint) {
  const double r = std::sqrt(2.0);
  const Grid g = build_grid({Axis{"x", -r, r, 3}});
  const auto p = steady_state_1d(0.5, 0.15, g);
  EXPECT_NEAR(p[2] / p[1], std::exp(10.0 / 3.0), 1e-10);
  EXPECT_NEAR(std::exp(10.0 / 3.0), 28.03, 0.01);
  EXPECT_NEAR(p.values().sum(), 1.0, 1e-15);
}

TEST(SteadyState, SymmetricWithMaximaAtFixedPoints) {
  const Grid g = build_grid({Axis{"x", -2, 2, 401}});
  const auto p = steady_state_1d(0.5, 0.15, g);
  for (int k = 0; k < 401; ++k) EXPECT_NEAR(p[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(400 - k)], 1e-15);
  Eigen::Index arg = 0;
  p.values().tail(200).maxCoeff(&arg);
  EXPECT_NEAR(g.coordinate(static_cast<std::size_t>(arg + 201), 0), std::sqrt(2.0), 0.01);
}

TEST(SteadyState, FixedPointResidualShrinksUnderRefinement) {
  std::vector<double> res;
  for (int n : {21, 41, 81}) {
    const Grid g = build_grid({Axis{"x", -2, 2, n}});
    const auto R = assemble_generator(eval_coefficients(DriftDiffusionModel::double_well_1d(0.5, 0.15), g),
                                      Scheme::rates, BoundaryCondition::reflecting());
    const auto ps = steady_state_1d(0.5, 0.15, g);
    const std::vector<double> T{1.0};
    res.push_back(trace_distance(expm_propagate(R, ps, T).states.back(), ps));
  }
  EXPECT_LT(res[1], res[0]);
  EXPECT_LT(res[2], res[1]);
}

TEST(Export, TrajectoryCsvLayout) {
  const auto traj = euler_propagate(exp1_generator(), delta(21, 10), 0.1, 2);
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header.substr(0, 7), "time,p0");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace fpq
