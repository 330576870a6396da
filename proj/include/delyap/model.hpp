#pragma once

#include <string>
#include <vector>

#include "delyap/matcore.hpp"

namespace delyap {

/// Linear system with one lumped and one distributed delay,
///
///   x'(t) = A0 x(t) + A1 x(t - h) + ∫_{-h}^{0} A_D(θ) x(t + θ) dθ,
///
/// where the kernel is kept in factored form A_D(θ) = Cd e^{Ad θ} Bd.
struct TimeDelaySystem {
  Matrix A0;  // n x n
  Matrix A1;  // n x n
  Matrix Ad;  // nd x nd
  Matrix Bd;  // nd x n
  Matrix Cd;  // n x nd
  double h = 0.0;

  Index n() const { return A0.rows(); }
  Index nd() const { return Ad.rows(); }
};

/// Every violated invariant of `sys`, as human-readable messages. Empty
/// means the system is valid.
std::vector<std::string> validate(const TimeDelaySystem& sys);

/// Throws DimensionError or DomainError listing all violations.
void require_valid(const TimeDelaySystem& sys);

/// Builds a system whose kernel is A_D(θ) = sin(ωθ) B0 + cos(ωθ) B1.
///
/// When n = 2 and B0 = R B1 with R = [[0,-1],[1,0]], the kernel collapses to
/// Ad = ωR, Cd = I, Bd = B1 (nd = 2). Otherwise the general factorization
/// Ad = ω[[0,-I],[I,0]], Cd = [I 0], Bd = [B1; -B0] (nd = 2n) is used.
TimeDelaySystem make_sincos_system(const Matrix& A0, const Matrix& A1,
                                   const Matrix& B0, const Matrix& B1,
                                   double frequency, double h);

/// Cd e^{Ad θ} Bd. Throws DomainError unless -h <= θ <= 0.
Matrix kernel_at(const TimeDelaySystem& sys, double theta);

/// Same product without the domain check; used by integrators that need
/// the kernel slightly outside [-h, 0].
Matrix kernel_unchecked(const TimeDelaySystem& sys, double theta);

/// Symmetric cost weight Q = Qᵀ.
class Weight {
 public:
  /// Symmetrizes (Q + Qᵀ)/2. Throws DomainError when
  /// max|Q - Qᵀ| > tolerance * max(1, max|Q|), DimensionError if not square.
  explicit Weight(const Matrix& q, double tolerance = 1e-12);

  const Matrix& matrix() const noexcept { return q_; }
  Index n() const noexcept { return q_.rows(); }

 private:
  Matrix q_;
};

/// System of the running example: A0 = -I, A1 = [[0,1],[-1,0]],
/// A_D(θ) = sin(πθ) 0.3 I + cos(πθ) A1 0.3 I, h = 1.
TimeDelaySystem example1_system();

}  // namespace delyap
