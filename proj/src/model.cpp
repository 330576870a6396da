#include "delyap/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "delyap/errors.hpp"

namespace delyap {

namespace {

void check_shape(std::vector<std::string>& out, const Matrix& m,
                 const char* name, Index rows, Index cols,
                 const char* rows_name, const char* cols_name) {
  if (m.rows() != rows) {
    out.push_back(std::string(name) + " rows ≠ " + rows_name);
  }
  if (m.cols() != cols) {
    out.push_back(std::string(name) + " cols ≠ " + cols_name);
  }
  if (!m.allFinite()) out.push_back(std::string(name) + " has non-finite entries");
}

std::string join(const std::vector<std::string>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << "; ";
    os << items[i];
  }
  return os.str();
}

}  // namespace

std::vector<std::string> validate(const TimeDelaySystem& sys) {
  std::vector<std::string> out;
  const Index n = sys.A0.rows();
  const Index nd = sys.Ad.rows();
  if (n < 1) out.emplace_back("n must be ≥ 1");
  if (nd < 1) out.emplace_back("n_d must be ≥ 1");
  if (sys.A0.cols() != n) out.emplace_back("A0 must be square");
  if (!sys.A0.allFinite()) out.emplace_back("A0 has non-finite entries");
  if (sys.Ad.cols() != nd) out.emplace_back("Ad must be square");
  if (!sys.Ad.allFinite()) out.emplace_back("Ad has non-finite entries");
  check_shape(out, sys.A1, "A1", n, n, "n", "n");
  check_shape(out, sys.Bd, "Bd", nd, n, "n_d", "n");
  check_shape(out, sys.Cd, "Cd", n, nd, "n", "n_d");
  if (!std::isfinite(sys.h)) {
    out.emplace_back("h must be finite");
  } else if (sys.h < 0.0) {
    out.emplace_back("h must be ≥ 0");
  }
  return out;
}

void require_valid(const TimeDelaySystem& sys) {
  const auto violations = validate(sys);
  if (violations.empty()) return;
  for (const auto& v : violations) {
    if (v.find("rows") != std::string::npos ||
        v.find("cols") != std::string::npos ||
        v.find("square") != std::string::npos ||
        v.find("≥ 1") != std::string::npos) {
      throw DimensionError("invalid system: " + join(violations));
    }
  }
  throw DomainError("invalid system: " + join(violations));
}

TimeDelaySystem make_sincos_system(const Matrix& A0, const Matrix& A1,
                                   const Matrix& B0, const Matrix& B1,
                                   double frequency, double h) {
  const Index n = A0.rows();
  if (B0.rows() != n || B0.cols() != n || B1.rows() != n || B1.cols() != n) {
    throw DimensionError("sin/cos kernel: B0 and B1 must be n x n");
  }
  TimeDelaySystem sys{A0, A1, Matrix(), Matrix(), Matrix(), h};

  Matrix rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  if (n == 2 && max_abs(B0 - rot * B1) <= 1e-14 * std::max(1.0, max_abs(B0))) {
    sys.Ad = frequency * rot;
    sys.Cd = Matrix::Identity(2, 2);
    sys.Bd = B1;
  } else {
    sys.Ad = Matrix::Zero(2 * n, 2 * n);
    sys.Ad.topRightCorner(n, n) = -frequency * Matrix::Identity(n, n);
    sys.Ad.bottomLeftCorner(n, n) = frequency * Matrix::Identity(n, n);
    sys.Cd = Matrix::Zero(n, 2 * n);
    sys.Cd.leftCols(n) = Matrix::Identity(n, n);
    sys.Bd.resize(2 * n, n);
    sys.Bd << B1, -B0;
  }
  require_valid(sys);
  return sys;
}

Matrix kernel_at(const TimeDelaySystem& sys, double theta) {
  if (!(theta >= -sys.h && theta <= 0.0)) {
    throw DomainError("kernel_at: θ = " + std::to_string(theta) +
                      " outside [-h, 0]");
  }
  return kernel_unchecked(sys, theta);
}

Matrix kernel_unchecked(const TimeDelaySystem& sys, double theta) {
  return sys.Cd * expm(sys.Ad, theta) * sys.Bd;
}

Weight::Weight(const Matrix& q, double tolerance) {
  if (q.rows() != q.cols() || q.rows() < 1) {
    throw DimensionError("Q must be square and non-empty");
  }
  require_finite(q, "Q");
  const double asym = max_abs(q - q.transpose());
  if (asym > tolerance * std::max(1.0, max_abs(q))) {
    throw DomainError("Q is not symmetric (max |Q - Qᵀ| = " +
                      std::to_string(asym) + ")");
  }
  q_ = 0.5 * (q + q.transpose());
}

TimeDelaySystem example1_system() {
  Matrix A0 = -Matrix::Identity(2, 2);
  Matrix A1(2, 2);
  A1 << 0.0, 1.0, -1.0, 0.0;
  Matrix B0 = 0.3 * Matrix::Identity(2, 2);
  Matrix B1 = A1 * B0;
  return make_sincos_system(A0, A1, B0, B1, std::numbers::pi, 1.0);
}

}  // namespace delyap
