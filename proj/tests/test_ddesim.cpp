#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "delyap/ddesim.hpp"
#include "delyap/errors.hpp"
#include "delyap/odec.hpp"
#include "support.hpp"

using namespace delyap;
using delyap::testing::random_stable_system;
using delyap::testing::scalar_system;

namespace {

TimeDelaySystem delay_free_identity(double h) {
  TimeDelaySystem s;
  s.A0 = -Matrix::Identity(2, 2);
  s.A1 = Matrix::Zero(2, 2);
  s.Ad = Matrix::Zero(1, 1);
  s.Bd = Matrix::Zero(1, 2);
  s.Cd = Matrix::Zero(2, 1);
  s.h = h;
  return s;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Simulate, DelayFreeExponential) {
  const Vector x0 = v2(1.0, -2.0);
  const Trajectory tr =
      simulate(delay_free_identity(1.0), HistorySpec::point_mass(x0), 5.0, 1.0 / 50);
  double worst = 0.0;
  for (Index k = 0; k <= tr.steps(); ++k) {
    worst = std::max(worst, max_abs(tr.x(k) - std::exp(-tr.time(k)) * x0));
  }
  EXPECT_LE(worst, 1e-8);
  EXPECT_NEAR(tr.final_time(), 5.0, 1e-12);
}

TEST(Simulate, GridMustDivideDelay) {
  const TimeDelaySystem s = example1_system();
  const HistorySpec hist = HistorySpec::point_mass(v2(1, 0));
  EXPECT_THROW(simulate(s, hist, 1.0, 0.07), DomainError);
  EXPECT_THROW(simulate(s, hist, 1.0, 0.1), DomainError);  // m = 10 < 20
  EXPECT_NO_THROW(simulate(s, hist, 1.0, 0.05));
  EXPECT_NO_THROW(simulate(scalar_system(-1, 0, 0.0), HistorySpec::point_mass(Vector::Ones(1)), 1.0, 0.013));
}

TEST(Simulate, Example1Decays) {
  const Trajectory tr = simulate(example1_system(),
                                 HistorySpec::point_mass(v2(1, 0)), 20.0, 0.01);
  EXPECT_LT(tr.x(tr.steps()).norm(), 1e-2);
  EXPECT_EQ(tr.x(0), v2(1, 0));
  EXPECT_EQ(tr.y(0), Matrix::Zero(2, 1));
}

TEST(Simulate, BlowUpReportsTime) {
  const TimeDelaySystem s = scalar_system(50.0, 0.0, 1.0);
  try {
    simulate(s, HistorySpec::point_mass(Vector::Ones(1)), 100.0, 0.01);
    FAIL() << "expected SimulationBlowUp";
  } catch (const SimulationBlowUp& e) {
    EXPECT_GT(e.time(), 5.0);
    EXPECT_LT(e.time(), 20.0);
  }
}

TEST(Simulate, PureDelayMethodOfSteps) {
  // x' = -x(t-1) with φ ≡ 1: x = 1 - t on [0,1], 1 - t + (t-1)²/2 on [1,2].
  Matrix samples = Matrix::Ones(1, 11);
  const HistorySpec hist = HistorySpec::sampled(samples, 1.0);
  const Trajectory tr = simulate(scalar_system(0.0, -1.0, 1.0), hist, 2.0, 0.02);
  for (Index k = 0; k <= tr.steps(); ++k) {
    const double t = tr.time(k);
    const double exact = t <= 1.0 ? 1.0 - t : 1.0 - t + 0.5 * (t - 1) * (t - 1);
    EXPECT_NEAR(tr.x(k)(0, 0), exact, 1e-12) << t;
  }
}

TEST(Simulate, SampledHistoryInitializesAccumulator) {
  // y(0) = ∫ e^{Ad θ} Bd φ(θ) dθ; with φ ≡ x0, Ad = a, Bd = 1 that is
  // (1 - e^{-a h}) / a · x0.
  TimeDelaySystem s = scalar_system(-2.0, 0.0, 1.0);
  s.Ad(0, 0) = 0.7;
  s.Bd(0, 0) = 1.0;
  s.Cd(0, 0) = 0.3;
  const HistorySpec hist = HistorySpec::sampled(Matrix::Constant(1, 5, 2.0), 1.0);
  const Trajectory tr = simulate(s, hist, 1.0, 0.05);
  EXPECT_NEAR(tr.y(0)(0, 0), 2.0 * (1.0 - std::exp(-0.7)) / 0.7, 1e-12);
}

TEST(Simulate, AugmentedFormReproducesDistributedDelay) {
  std::vector<double> times;
  for (int i = 1; i <= 40; ++i) times.push_back(0.137 * i);
  const Trajectory tr = simulate(example1_system(),
                                 HistorySpec::point_mass(v2(1, 0.5)), 6.0, 0.01);
  EXPECT_LE(delay_equation_residual(example1_system(), tr, times), 1e-5);

  const TimeDelaySystem r = random_stable_system(11, 2, 2, 0.6);
  const Trajectory tr2 = simulate(r, HistorySpec::point_mass(v2(-1, 1)), 5.0, 0.01);
  std::vector<double> t2;
  for (int i = 1; i <= 30; ++i) t2.push_back(0.151 * i);
  EXPECT_LE(delay_equation_residual(r, tr2, t2), 1e-5);
}

TEST(Simulate, FourthOrderConvergence) {
  // Global error against e^{-t} on the delay-free benchmark.
  const Vector x0 = v2(1.0, 1.0);
  double prev = 0.0;
  for (int m : {20, 40, 80}) {
    TimeDelaySystem s = delay_free_identity(2.0);
    s.A0(0, 1) = 3.0;  // non-normal, still exactly solvable
    const Trajectory tr = simulate(s, HistorySpec::point_mass(x0), 4.0, 2.0 / m);
    double err = 0.0;
    for (Index k = 0; k <= tr.steps(); ++k) {
      const double t = tr.time(k);
      Vector exact(2);
      exact << std::exp(-t) * (1.0 + 3.0 * t), std::exp(-t);
      err = std::max(err, max_abs(tr.x(k) - exact));
    }
    if (prev > 0.0) EXPECT_GE(prev / err, 8.0) << m;
    prev = err;
  }
}

TEST(Fundamental, DelayFreeMatchesExpm) {
  TimeDelaySystem s = delay_free_identity(1.0);
  s.A0 << -1.0, 2.0, -0.5, -1.5;
  const Trajectory tr = fundamental_matrix(s, 5.0, 1.0 / 50);
  EXPECT_EQ(tr.x(0), Matrix::Identity(2, 2));
  double worst = 0.0;
  for (Index k = 0; k <= tr.steps(); ++k) {
    worst = std::max(worst, max_abs(tr.x(k) - expm(s.A0, tr.time(k))));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Fundamental, Example1Decays) {
  const Trajectory tr = fundamental_matrix(example1_system(), 20.0, 0.01);
  EXPECT_LT(tr.x(tr.steps()).norm(), 1e-2);
}

TEST(Cost, DelayFreeScalar) {
  const Trajectory tr = simulate(scalar_system(-1.0, 0.0, 1.0),
                                 HistorySpec::point_mass(Vector::Ones(1)), 20.0, 0.01);
  const CostEstimate c = cost_quadrature(tr, Matrix::Ones(1, 1));
  EXPECT_NEAR(c.value + c.tail, 0.5, 1e-6);
  EXPECT_FALSE(c.tail_warning);
  EXPECT_EQ(cost_quadrature(tr, Matrix::Zero(1, 1)).value, 0.0);
}

TEST(Cost, NonDecayingTailWarns) {
  const Trajectory tr = simulate(scalar_system(0.0, 0.0, 1.0),
                                 HistorySpec::point_mass(Vector::Ones(1)), 5.0, 0.05);
  EXPECT_TRUE(cost_quadrature(tr, Matrix::Ones(1, 1)).tail_warning);
}

TEST(Cost, Example1MatchesLyapunovMatrix) {
  const TimeDelaySystem s = example1_system();
  const LyapunovSolution sol = solve(s, Weight(Matrix::Identity(2, 2)));
  for (const Vector& x0 : {v2(1, 0), v2(0, 1), v2(1, 1)}) {
    const Trajectory tr = simulate(s, HistorySpec::point_mass(x0), 20.0, 0.01);
    const CostEstimate c = cost_quadrature(tr, Matrix::Identity(2, 2));
    const double expected = x0.dot(sol.P_at(0.0) * x0);
    EXPECT_LE(std::abs(c.value - expected), 1e-3 * std::max(1.0, expected));
  }
}

TEST(Simpson, Rules) {
  // Exact for cubics with both even and odd interval counts.
  for (int intervals : {4, 5, 6, 7}) {
    std::vector<double> f;
    const double dt = 1.0 / intervals;
    for (int i = 0; i <= intervals; ++i) {
      const double t = i * dt;
      f.push_back(t * t * t - 2 * t + 1);
    }
    EXPECT_NEAR(simpson(f, dt), 0.25 - 1.0 + 1.0, 1e-14) << intervals;
  }
}

TEST(Oracle, DelayFreeScalar) {
  const std::vector<double> taus{0.0, 0.25, 0.5, 0.75, 1.0};
  const OracleResult r = oracle_P(scalar_system(-1.0, 0.0, 1.0), Matrix::Ones(1, 1), taus);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    EXPECT_NEAR(r.P[i](0, 0), 0.5 * std::exp(-taus[i]), 1e-5);
  }
}

TEST(Oracle, Example1AndZeroWeight) {
  const TimeDelaySystem s = example1_system();
  const Matrix p0 = oracle_P(s, Matrix::Identity(2, 2), 0.0);
  EXPECT_LE(max_abs(p0 - 0.7072 * Matrix::Identity(2, 2)), 1e-3);
  EXPECT_LE(max_abs(p0 - p0.transpose()), 1e-10);
  EXPECT_EQ(oracle_P(s, Matrix::Zero(2, 2), 0.5), Matrix::Zero(2, 2));
}

TEST(Oracle, AgreesWithAnalyticSolution) {
  for (int seed = 0; seed < 4; ++seed) {
    const Index n = 1 + seed % 2, nd = 1 + seed / 2;
    const TimeDelaySystem s = random_stable_system(500 + seed, n, nd, 0.5 + 0.25 * seed);
    const Matrix q = Matrix::Identity(n, n);
    const LyapunovSolution sol = solve(s, Weight(q));
    const auto taus = uniform_grid(s.h, 5);
    const OracleResult r = oracle_P(s, q, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      EXPECT_LE(max_abs(r.P[i] - sol.P_at(taus[i])), 1e-3) << seed << " " << taus[i];
    }
  }
}

TEST(Trajectory, CsvLayout) {
  const Trajectory tr = simulate(example1_system(),
                                 HistorySpec::point_mass(v2(1, 0)), 0.1, 0.05);
  std::ostringstream os;
  tr.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x_1,x_2,y_1,y_2");
  std::getline(is, line);
  EXPECT_EQ(line, "0,1,0,0,0");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Trajectory, StateAtInterpolates) {
  const Trajectory tr = simulate(delay_free_identity(1.0),
                                 HistorySpec::point_mass(v2(1, 0)), 2.0, 0.05);
  EXPECT_NEAR(tr.state_at(0.123)(0, 0), std::exp(-0.123), 1e-7);
  EXPECT_EQ(tr.state_at(-0.5), Matrix::Zero(2, 1));
  EXPECT_THROW(tr.state_at(2.5), DomainError);
}
