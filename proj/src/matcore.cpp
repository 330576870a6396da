#include "delyap/matcore.hpp"

#include <array>
#include <cmath>
#include <string>

#include "delyap/errors.hpp"

namespace delyap {

namespace {

// Padé degree thresholds on ||A||_1 (Higham, 2005).
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2,
                                          2.539398330063230e-1,
                                          9.504178996162932e-1,
                                          2.097847961257068e0,
                                          5.371920351148152e0};

Matrix pade_low(const Matrix& a, int degree) {
  static constexpr std::array<double, 4> b3 = {120., 60., 12., 1.};
  static constexpr std::array<double, 6> b5 = {30240., 15120., 3360.,
                                               420.,   30.,    1.};
  static constexpr std::array<double, 8> b7 = {17297280., 8648640., 1995840.,
                                               277200.,   25200.,   1512.,
                                               56.,       1.};
  static constexpr std::array<double, 10> b9 = {
      17643225600., 8821612800., 2075673600., 302702400., 30270240.,
      2162160.,     110880.,     3960.,       90.,        1.};
  const double* b = nullptr;
  switch (degree) {
    case 3: b = b3.data(); break;
    case 5: b = b5.data(); break;
    case 7: b = b7.data(); break;
    default: b = b9.data(); break;
  }
  const Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;
  Matrix u_inner = b[1] * ident;
  Matrix v = b[0] * ident;
  for (int k = 2; k <= degree; k += 2) {
    power = power * a2;
    v += b[k] * power;
    u_inner += b[k + 1] * power;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000., 32382376266240000., 7771770303897600.,
      1187353796428800.,  129060195264000.,   10559470521600.,
      670442572800.,      33522128640.,       1323241920.,
      40840800.,          960960.,            16380.,
      182.,               1.};
  const Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
           b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + " has non-finite entries");
  }
}

Vector vec(const Matrix& m) {
  require_finite(m, "vec argument");
  Vector out(m.size());
  Index k = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) out(k++) = m(i, j);
  }
  return out;
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw DimensionError("unvec: vector of length " + std::to_string(v.size()) +
                         " cannot be reshaped to " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
  Matrix out(rows, cols);
  Index k = 0;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = v(k++);
  }
  return out;
}

Matrix kron(const Matrix& y, const Matrix& z) {
  require_finite(y, "kron left factor");
  require_finite(z, "kron right factor");
  Matrix out(y.rows() * z.rows(), y.cols() * z.cols());
  for (Index i = 0; i < y.rows(); ++i) {
    for (Index j = 0; j < y.cols(); ++j) {
      out.block(i * z.rows(), j * z.cols(), z.rows(), z.cols()) = y(i, j) * z;
    }
  }
  return out;
}

Matrix expm(const Matrix& m, double scale) {
  if (m.rows() != m.cols()) {
    throw DimensionError("expm: matrix must be square");
  }
  require_finite(m, "expm argument");
  if (!std::isfinite(scale)) throw DomainError("expm: scale is not finite");
  const Index n = m.rows();
  if (scale == 0.0 || n == 0) return Matrix::Identity(n, n);

  Matrix a = m * scale;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  Matrix result;
  if (norm1 <= kTheta[0]) {
    result = pade_low(a, 3);
  } else if (norm1 <= kTheta[1]) {
    result = pade_low(a, 5);
  } else if (norm1 <= kTheta[2]) {
    result = pade_low(a, 7);
  } else if (norm1 <= kTheta[3]) {
    result = pade_low(a, 9);
  } else {
    int squarings = 0;
    if (norm1 > kTheta[4]) {
      squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta[4])));
    }
    a /= std::ldexp(1.0, squarings);
    result = pade13(a);
    for (int k = 0; k < squarings; ++k) {
      result = result * result;
      if (!result.allFinite()) break;
    }
  }
  if (!result.allFinite()) {
    throw OverflowError("expm: result overflows double precision");
  }
  return result;
}

LinearSolveResult solve_linear(const Matrix& a, const Vector& b,
                               double min_rcond) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw DimensionError("solve_linear: need square A and matching b");
  }
  require_finite(a, "solve_linear matrix");
  require_finite(b, "solve_linear right-hand side");
  Eigen::PartialPivLU<Matrix> lu(a);
  // PartialPivLU reports rcond 0 only for exact zero pivots; guard NaN too.
  double rcond = lu.rcond();
  if (!std::isfinite(rcond)) rcond = 0.0;
  if (rcond < min_rcond) {
    throw SingularSystem(
        "solve_linear: matrix is numerically singular (rcond = " +
            std::to_string(rcond) + ")",
        rcond);
  }
  return {lu.solve(b), rcond};
}

double smallest_singular_value(const Matrix& a) {
  require_finite(a, "singular value argument");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().minCoeff();
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace delyap
