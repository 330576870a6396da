#pragma once

// Dense real-matrix primitives.
//
// Storage is Eigen's default column-major layout, so vec(M) is the raw
// memory of M read front to back. vec() never relies on that, however: it
// is defined by column stacking and tested as such.

#include <Eigen/Dense>

namespace delyap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws DomainError if any entry of `m` is NaN or infinite. `what` names
/// the argument in the message.
void require_finite(const Matrix& m, const char* what);

/// Stacks the columns of `m` into one vector, first column on top.
Vector vec(const Matrix& m);

/// Inverse of vec(). Throws DimensionError if v.size() != rows * cols.
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Kronecker product: block (i, j) of the result is y(i, j) * z.
Matrix kron(const Matrix& y, const Matrix& z);

/// e^{m * scale} by scaling and squaring with a diagonal Padé approximant
/// whose degree (3, 5, 7, 9 or 13) is picked from the 1-norm of m * scale.
/// expm(m, 0) is exactly the identity. Throws OverflowError when the
/// result is not representable.
Matrix expm(const Matrix& m, double scale = 1.0);

struct LinearSolveResult {
  Vector x;
  /// Reciprocal 1-norm condition estimate from the LU factorization.
  double rcond = 0.0;
};

/// Solves a * x = b by partial-pivot LU. Throws SingularSystem (carrying
/// the estimate) when the reciprocal condition number is below `min_rcond`.
LinearSolveResult solve_linear(const Matrix& a, const Vector& b,
                               double min_rcond = 1e-12);

/// Smallest singular value of `a` (min(rows, cols) of them are considered).
double smallest_singular_value(const Matrix& a);

/// Largest absolute entry.
double max_abs(const Matrix& m);

}  // namespace delyap
