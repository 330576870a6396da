#include <cmath>
#include <future>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "delyap/errors.hpp"
#include "delyap/odec.hpp"
#include "support.hpp"

using namespace delyap;
using delyap::testing::literal_algebraic;
using delyap::testing::literal_boundary_rows;
using delyap::testing::literal_omega_rhs;
using delyap::testing::random_blocks;
using delyap::testing::random_matrix;
using delyap::testing::random_system;
using delyap::testing::stack_blocks;
using delyap::testing::random_stable_system;
using delyap::testing::random_symmetric;
using delyap::testing::scalar_system;

namespace {

Vector example1_vec(std::initializer_list<double> v) {
  Vector out(Index(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(Layout, StateCount) {
  EXPECT_EQ(OmegaLayout(2, 2).size(), 24);
  EXPECT_EQ(OmegaLayout(1, 1).size(), 6);
  EXPECT_EQ(OmegaLayout(3, 1).size(), 2 * 9 + 12);
  EXPECT_EQ(assemble(example1_system()).ns(), 24);
  EXPECT_EQ(assemble(scalar_system(-1, 0, 1)).ns(), 6);
}

TEST(Layout, BlocksRoundTrip) {
  std::mt19937_64 rng(1);
  const auto w = random_blocks(rng, 3, 2);
  const OmegaBlocks ob = OmegaBlocks::from_blocks(OmegaLayout(3, 2), w);
  EXPECT_EQ(ob.stacked(), stack_blocks(w));
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(ob.block(k), w[k - 1]);
}

TEST(Assemble, DynamicsMatchLiteralEquations) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 3, nd = 1 + (trial / 3) % 3;
    const TimeDelaySystem s = random_system(rng, n, nd);
    const OdecOperator op = assemble(s);
    const auto w = random_blocks(rng, n, nd);
    worst = std::max(worst, max_abs(op.E * stack_blocks(w) - stack_blocks(literal_omega_rhs(s, w))));
  }
  EXPECT_LE(worst, 1e-13);
}

TEST(Assemble, BoundaryMatchesLiteralEquations) {
  std::mt19937_64 rng(4048);
  double worst = 0.0, worst_literal = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 3, nd = 1 + (trial / 3) % 3;
    const TimeDelaySystem s = random_system(rng, n, nd);
    const OdecOperator op = assemble(s);
    auto a = random_blocks(rng, n, nd);
    auto b = random_blocks(rng, n, nd);
    const Vector got = op.F1 * stack_blocks(a) + op.F2 * stack_blocks(b);
    worst = std::max(worst, max_abs(got - stack_blocks(literal_boundary_rows(s, a, b))));

    // On pairs meeting Ω3(0) = 0 and Ω6(h) = 0 the stated condition agrees.
    a[2].setZero();
    b[5].setZero();
    const Vector adm = op.F1 * stack_blocks(a) + op.F2 * stack_blocks(b);
    worst_literal = std::max(
        worst_literal,
        max_abs(adm.head(n * n) - vec(literal_algebraic(s, a, b))));
  }
  EXPECT_LE(worst, 1e-13);
  EXPECT_LE(worst_literal, 1e-13);
}

TEST(Assemble, CombinedBoundaryMatrix) {
  std::mt19937_64 rng(5);
  const TimeDelaySystem s = random_system(rng, 2, 1);
  const OdecOperator op = assemble(s);
  EXPECT_LE(max_abs(op.G - (op.F1 + op.F2 * (op.E * s.h).exp())), 1e-12);
  EXPECT_EQ(op.h, s.h);
}

TEST(Assemble, RejectsInvalidSystem) {
  TimeDelaySystem s = example1_system();
  s.Cd = Matrix::Zero(3, 2);
  EXPECT_THROW(assemble(s), DimensionError);
}

TEST(OmegaRhs, AgreesWithE) {
  std::mt19937_64 rng(6);
  const TimeDelaySystem s = random_system(rng, 2, 3);
  const OdecOperator op = assemble(s);
  const OmegaBlocks w(op.layout, random_matrix(rng, op.ns(), 1));
  EXPECT_LE(max_abs(omega_rhs(s, w).stacked() - op.E * w.stacked()), 1e-13);
}

TEST(SolveBoundary, Example1) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Identity(2, 2)));
  const OmegaBlocks& w = sol.omega0();
  const double tol = 5e-4;
  EXPECT_LE(max_abs(vec(w.block(1)) - example1_vec({.7072, 0, 0, .7072})), tol);
  EXPECT_LE(max_abs(vec(w.block(2)) - example1_vec({.2636, .3165, -.3165, .2636})), tol);
  EXPECT_LE(max_abs(vec(w.block(4)) - example1_vec({.1909, -.3642, .3642, .1909})), tol);
  EXPECT_LE(max_abs(vec(w.block(6)) - example1_vec({-.1909, .3642, -.3642, -.1909})), tol);
  EXPECT_LE(max_abs(w.block(3)), 1e-12);
  EXPECT_LE(max_abs(w.block(5)), 1e-12);
  EXPECT_EQ(sol.diagnostics().spectrum.verdict, SpectrumVerdict::satisfied);
  EXPECT_FALSE(sol.diagnostics().near_singular);
}

TEST(SolveBoundary, SatisfiesLinearSystem) {
  const OdecOperator op = assemble(example1_system());
  Matrix q(2, 2);
  q << 2.0, 0.3, 0.3, 1.0;
  const OmegaBlocks w = solve_boundary(op, Weight(q));
  Vector rhs = Vector::Zero(op.ns());
  rhs.head(4) = -vec(q);
  EXPECT_LE(max_abs(op.G * w.stacked() - rhs), 1e-12);
}

TEST(SolveBoundary, ZeroWeightGivesZero) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Zero(2, 2)));
  EXPECT_EQ(sol.omega0().stacked(), Vector::Zero(24));
}

TEST(SolveBoundary, DelayFreeScalar) {
  for (double h : {0.0, 0.5, 1.0, 3.0}) {
    const LyapunovSolution sol =
        solve(scalar_system(-1.0, 0.0, h), Weight(Matrix::Ones(1, 1)));
    EXPECT_NEAR(sol.omega0().block(1)(0, 0), 0.5, 1e-13) << h;
    for (int i = 0; i <= 10; ++i) {
      const double tau = h * i / 10.0;
      EXPECT_NEAR(sol.P_at(tau)(0, 0), 0.5 * std::exp(-tau), 1e-12) << h;
    }
  }
}

TEST(SolveBoundary, DelayFreeMatrixLyapunov) {
  // With no delay terms P(τ) = P0 e^{A0 τ}, A0ᵀP0 + P0 A0 = -Q.
  std::mt19937_64 rng(7);
  const Index n = 3;
  TimeDelaySystem s;
  s.A0 = random_matrix(rng, n, n) - 2.5 * Matrix::Identity(n, n);
  s.A1 = Matrix::Zero(n, n);
  s.Ad = random_matrix(rng, 2, 2);
  s.Bd = Matrix::Zero(2, n);
  s.Cd = random_matrix(rng, n, 2);
  s.h = 0.7;
  const Matrix q = random_symmetric(rng, n) + 2.0 * Matrix::Identity(n, n);
  const Matrix I = Matrix::Identity(n, n);
  const Matrix lyap = Eigen::kroneckerProduct(I, s.A0.transpose()).eval() +
                      Eigen::kroneckerProduct(s.A0.transpose(), I).eval();
  const Vector qv = Eigen::Map<const Vector>(q.data(), n * n);
  const Vector p0v = lyap.partialPivLu().solve(-qv);
  const Matrix p0 = Eigen::Map<const Matrix>(p0v.data(), n, n);

  const LyapunovSolution sol = solve(s, Weight(q));
  for (double tau : {0.0, 0.2, 0.7}) {
    const Matrix expected = p0 * (s.A0 * tau).exp();
    EXPECT_LE(max_abs(sol.P_at(tau) - expected), 1e-11) << tau;
  }
}

TEST(SolveBoundary, SingularSpectrumThrows) {
  const OdecOperator op = assemble(scalar_system(0.0, 0.0, 1.0));
  try {
    solve_boundary(op, Weight(Matrix::Ones(1, 1)));
    FAIL() << "expected SpectrumConditionViolated";
  } catch (const SpectrumConditionViolated& e) {
    EXPECT_LT(e.sigma_min_relative(), 1e-12);
  }
}

TEST(SolveBoundary, LinearInWeight) {
  const OdecOperator op = assemble(example1_system());
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix q1 = random_symmetric(rng, 2), q2 = random_symmetric(rng, 2);
    const Vector w1 = solve_boundary(op, Weight(q1)).stacked();
    const Vector w2 = solve_boundary(op, Weight(q2)).stacked();
    const Vector w12 = solve_boundary(op, Weight(q1 + q2)).stacked();
    EXPECT_LE(max_abs(w12 - w1 - w2) / max_abs(w12), 1e-10);
  }
}

TEST(Evaluate, ZeroIsInitialState) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Identity(2, 2)));
  EXPECT_EQ(sol.evaluate_omega(0.0).stacked(), sol.omega0().stacked());
}

TEST(Evaluate, PropagatedEndpoint) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Identity(2, 2)));
  const OmegaBlocks end = sol.evaluate_omega(1.0);
  EXPECT_LE(max_abs(end.block(2) - sol.omega0().block(1)), 1e-8);
  EXPECT_LE(max_abs(end.block(4)), 1e-9);
  EXPECT_LE(max_abs(end.block(6)), 1e-9);
}

TEST(PAt, Example1) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Identity(2, 2)));
  EXPECT_LE(max_abs(sol.P_at(0.0) - 0.7072 * Matrix::Identity(2, 2)), 5e-4);
  EXPECT_EQ(sol.P_at(0.0), sol.P_at(0.0).transpose());
  EXPECT_EQ(sol.P_at(-0.3), sol.P_at(0.3).transpose());
  EXPECT_NO_THROW(sol.P_at(1.0));
  EXPECT_NO_THROW(sol.P_at(-1.0));
  EXPECT_THROW(sol.P_at(1.001), DomainError);
  EXPECT_THROW(sol.P_at(-1.5), DomainError);
  // Symmetrized extraction equals Ω1 itself up to rounding.
  for (double tau : {0.1, 0.5, 0.9}) {
    EXPECT_LE(max_abs(sol.P_at(tau) - sol.evaluate_omega(tau).block(1)), 1e-9);
  }
}

TEST(PAt, ConcurrentEvaluation) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Identity(2, 2)));
  const auto grid = uniform_grid(1.0, 64);
  std::vector<Matrix> serial;
  for (double t : grid) serial.push_back(sol.P_at(t));
  std::vector<std::future<Matrix>> jobs;
  for (double t : grid) {
    jobs.push_back(std::async(std::launch::async, [&sol, t] { return sol.P_at(t); }));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(jobs[i].get(), serial[i]);
}

TEST(Residuals, Example1) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Identity(2, 2)));
  EXPECT_LE(residual_dde(sol, uniform_grid(1.0, 21)), 1e-5);
  EXPECT_LE(residual_algebraic(sol), 1e-6);
  for (double r : residual_collapsed(sol, uniform_grid(1.0, 11))) EXPECT_LE(r, 1e-6);
  EXPECT_LE(residual_flip(sol, uniform_grid(1.0, 11)), 1e-8);
  EXPECT_LE(residual_symmetry(sol), 1e-9);
  EXPECT_LE(residual_endpoint(sol), 1e-9);
}

TEST(Residuals, CollapsedAtEndpoints) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Identity(2, 2)));
  const auto at0 = residual_collapsed(sol, {0.0});
  EXPECT_LE(at0[0], 1e-15);
  EXPECT_LE(at0[2], 1e-15);
  const auto ath = residual_collapsed(sol, {1.0});
  EXPECT_LE(ath[1], 1e-8);
  EXPECT_LE(ath[3], 1e-8);
}

TEST(Residuals, DelayFreeScalar) {
  const LyapunovSolution sol =
      solve(scalar_system(-1.0, 0.0, 1.0), Weight(Matrix::Ones(1, 1)));
  EXPECT_LE(residual_dde(sol, uniform_grid(1.0, 21)), 1e-8);
  EXPECT_LE(residual_algebraic(sol), 1e-12);
}

TEST(Residuals, ZeroWeight) {
  const LyapunovSolution sol = solve(example1_system(), Weight(Matrix::Zero(2, 2)));
  EXPECT_LE(residual_dde(sol, uniform_grid(1.0, 21)), 1e-12);
  EXPECT_LE(residual_algebraic(sol), 1e-12);
}

TEST(Residuals, RandomStableSystems) {
  int seed = 100;
  for (Index n = 1; n <= 3; ++n) {
    for (Index nd = 1; nd <= 2; ++nd) {
      const TimeDelaySystem s = random_stable_system(seed++, n, nd, 0.4 + 0.3 * n);
      std::mt19937_64 rng(seed);
      const Matrix q = random_symmetric(rng, n) + 2.0 * Matrix::Identity(n, n);
      const LyapunovSolution sol = solve(s, Weight(q));
      const ResidualReport r = certify(sol, uniform_grid(s.h, 11));
      EXPECT_LE(r.dde, 1e-5) << n << " " << nd;
      EXPECT_LE(r.algebraic, 1e-6) << n << " " << nd;
      for (double c : r.collapsed) EXPECT_LE(c, 1e-6) << n << " " << nd;
      EXPECT_LE(r.flip, 1e-8) << n << " " << nd;
      EXPECT_LE(r.symmetry, 1e-9) << n << " " << nd;
      EXPECT_LE(r.endpoint, 1e-9) << n << " " << nd;
    }
  }
}

TEST(UniformGrid, CoversInterval) {
  const auto g = uniform_grid(2.0, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 2.0);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_EQ(uniform_grid(1.0, 1), std::vector<double>{0.0});
}
