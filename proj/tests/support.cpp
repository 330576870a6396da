#include "support.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "delyap/quadrature.hpp"

namespace delyap::testing {

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  }
  return m;
}

Matrix random_symmetric(std::mt19937_64& rng, Index n) {
  const Matrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.transpose());
}

TimeDelaySystem scalar_system(double a0, double a1, double h) {
  TimeDelaySystem sys;
  sys.A0 = Matrix::Constant(1, 1, a0);
  sys.A1 = Matrix::Constant(1, 1, a1);
  sys.Ad = Matrix::Zero(1, 1);
  sys.Bd = Matrix::Zero(1, 1);
  sys.Cd = Matrix::Zero(1, 1);
  sys.h = h;
  return sys;
}

namespace {

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

double log_norm(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Matrix>(sym).eigenvalues().maxCoeff();
}

}  // namespace

TimeDelaySystem random_stable_system(std::uint64_t seed, Index n, Index nd,
                                     double h, double margin) {
  std::mt19937_64 rng(seed);
  TimeDelaySystem sys;
  sys.h = h;
  sys.A0 = random_matrix(rng, n, n);
  sys.A1 = 0.5 * random_matrix(rng, n, n);
  sys.Ad = random_matrix(rng, nd, nd);
  sys.Bd = random_matrix(rng, nd, n);
  sys.Cd = random_matrix(rng, n, nd);

  // ∫_{-h}^{0} ‖Cd e^{Ad θ} Bd‖ dθ on a fine midpoint grid.
  const int m = 400;
  double kernel_mass = 0.0;
  for (int i = 0; i < m; ++i) {
    const double theta = -h + (i + 0.5) * h / m;
    kernel_mass += spectral_norm(kernel_at(sys, theta)) * h / m;
  }
  const double target = -(spectral_norm(sys.A1) + kernel_mass + margin);
  sys.A0 += (target - log_norm(sys.A0)) * Matrix::Identity(n, n);
  return sys;
}

TimeDelaySystem random_system(std::mt19937_64& rng, Index n, Index nd) {
  std::uniform_real_distribution<double> uh(0.1, 2.0);
  TimeDelaySystem s;
  s.A0 = random_matrix(rng, n, n);
  s.A1 = random_matrix(rng, n, n);
  s.Ad = random_matrix(rng, nd, nd);
  s.Bd = random_matrix(rng, nd, n);
  s.Cd = random_matrix(rng, n, nd);
  s.h = uh(rng);
  return s;
}

std::array<Matrix, 6> random_blocks(std::mt19937_64& rng, Index n, Index nd) {
  return {random_matrix(rng, n, n),  random_matrix(rng, n, n),
          random_matrix(rng, n, nd), random_matrix(rng, n, nd),
          random_matrix(rng, nd, n), random_matrix(rng, nd, n)};
}

Vector stack_blocks(const std::array<Matrix, 6>& w) {
  Index total = 0;
  for (const Matrix& m : w) total += m.size();
  Vector v(total);
  Index at = 0;
  for (const Matrix& m : w) {
    v.segment(at, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
    at += m.size();
  }
  return v;
}

std::array<Matrix, 6> literal_omega_rhs(const TimeDelaySystem& s,
                                        const std::array<Matrix, 6>& w) {
  // Eigen's own exponential, so the reference shares nothing with expm().
  const Matrix CdE = s.Cd * (-s.Ad * s.h).exp();
  return {
      w[0] * s.A0 + w[1] * s.A1 + w[2] * s.Bd + w[3] * s.Bd,
      -s.A1.transpose() * w[0] - s.A0.transpose() * w[1] -
          s.Bd.transpose() * w[4] - s.Bd.transpose() * w[5],
      -w[2] * s.Ad + w[0] * s.Cd,
      -w[3] * s.Ad - w[1] * CdE,
      s.Ad.transpose() * w[4] + CdE.transpose() * w[0],
      s.Ad.transpose() * w[5] - s.Cd.transpose() * w[1],
  };
}

std::array<Matrix, 6> literal_boundary_rows(const TimeDelaySystem& s,
                                            const std::array<Matrix, 6>& a,
                                            const std::array<Matrix, 6>& b) {
  const Matrix alg = a[0] * s.A0 + a[1] * s.A1 + a[2] * s.Bd + a[3] * s.Bd +
                     s.A1.transpose() * b[0] + s.A0.transpose() * b[1] +
                     s.Bd.transpose() * b[4] + s.Bd.transpose() * b[5];
  return {alg, a[0] - b[1], a[2], a[4], b[3], b[5]};
}

Matrix literal_algebraic(const TimeDelaySystem& s,
                         const std::array<Matrix, 6>& a,
                         const std::array<Matrix, 6>& b) {
  return a[0] * s.A0 + a[1] * s.A1 + a[3] * s.Bd + s.A1.transpose() * b[0] +
         s.A0.transpose() * b[1] + s.Bd.transpose() * b[4];
}

}  // namespace delyap::testing
