#pragma once

// Auxiliary delay-free ODE with coupled split-boundary conditions whose
// solution yields the delay Lyapunov matrix P(τ).
//
// Six matrix states are propagated together:
//
//   Ω1' =  Ω1 A0 + Ω2 A1 + Ω3 Bd + Ω4 Bd
//   Ω2' = -A1ᵀ Ω1 - A0ᵀ Ω2 - Bdᵀ Ω5 - Bdᵀ Ω6
//   Ω3' = -Ω3 Ad + Ω1 Cd
//   Ω4' = -Ω4 Ad - Ω2 Cd e^{-Ad h}
//   Ω5' =  Adᵀ Ω5 + (Cd e^{-Ad h})ᵀ Ω1
//   Ω6' =  Adᵀ Ω6 - Cdᵀ Ω2
//
// with boundary conditions
//
//   -Q = Ω1(0) A0 + Ω2(0) A1 + Ω4(0) Bd + A1ᵀ Ω1(h) + A0ᵀ Ω2(h) + Bdᵀ Ω5(h)
//    0 = Ω1(0) - Ω2(h),   0 = Ω3(0) = Ω4(h) = Ω5(0) = Ω6(h).
//
// Under vec() the dynamics become ω' = E ω and the boundary conditions
// F1 ω(0) + F2 ω(h) = [-vec(Q); 0], so ω(0) solves G ω(0) = [-vec(Q); 0]
// with G = F1 + F2 e^{Eh}. Ω1, Ω2 are n x n; Ω3, Ω4 are n x nd; Ω5, Ω6 are
// nd x n.

#include <array>
#include <vector>

#include "delyap/matcore.hpp"
#include "delyap/model.hpp"
#include "delyap/quadrature.hpp"
#include "delyap/spectrum.hpp"

namespace delyap {

/// Position of the six Ω blocks inside the stacked state.
class OmegaLayout {
 public:
  OmegaLayout() = default;
  OmegaLayout(Index n, Index nd);

  Index n() const noexcept { return n_; }
  Index nd() const noexcept { return nd_; }
  /// n_s = 2n² + 4 n nd.
  Index size() const noexcept { return 2 * n_ * n_ + 4 * n_ * nd_; }
  /// Block index k is 1-based, 1..6.
  Index offset(int k) const;
  Index rows(int k) const;
  Index cols(int k) const;
  Index length(int k) const { return rows(k) * cols(k); }

 private:
  Index n_ = 0;
  Index nd_ = 0;
};

/// Stacked state [vec Ω1; ...; vec Ω6].
class OmegaBlocks {
 public:
  OmegaBlocks() = default;
  OmegaBlocks(OmegaLayout layout, Vector stacked);
  static OmegaBlocks from_blocks(const OmegaLayout& layout,
                                 const std::array<Matrix, 6>& blocks);

  const Vector& stacked() const noexcept { return stacked_; }
  const OmegaLayout& layout() const noexcept { return layout_; }
  /// Ω_k as a matrix, k in 1..6.
  Matrix block(int k) const;

 private:
  OmegaLayout layout_;
  Vector stacked_;
};

struct OdecOperator {
  OmegaLayout layout;
  double h = 0.0;
  Matrix E;
  Matrix F1;
  Matrix F2;
  /// F1 + F2 e^{E h}
  Matrix G;

  Index ns() const noexcept { return layout.size(); }
};

/// Builds E, F1, F2 and G for `sys`. Throws on an invalid system.
OdecOperator assemble(const TimeDelaySystem& sys);

/// Right-hand side of the Ω dynamics evaluated block by block (no
/// Kronecker products). Used to cross-check E.
OmegaBlocks omega_rhs(const TimeDelaySystem& sys, const OmegaBlocks& omega);

struct SolveOptions {
  SpectrumThresholds thresholds;
};

/// Initial state ω(0) of the boundary problem for weight Q.
/// Throws SpectrumConditionViolated when G is numerically singular.
OmegaBlocks solve_boundary(const OdecOperator& op, const Weight& q,
                           const SolveOptions& options = {});

struct SolveDiagnostics {
  SpectrumReport spectrum;
  double rcond = 0.0;
  /// Set when the spectrum verdict is borderline; results may be inaccurate.
  bool near_singular = false;
};

/// Solved boundary problem. Immutable; evaluation is thread-safe.
class LyapunovSolution {
 public:
  LyapunovSolution(TimeDelaySystem sys, Weight q, OdecOperator op,
                   OmegaBlocks omega0, SolveDiagnostics diagnostics);

  const TimeDelaySystem& system() const noexcept { return sys_; }
  const Weight& weight() const noexcept { return q_; }
  const OdecOperator& op() const noexcept { return op_; }
  const OmegaBlocks& omega0() const noexcept { return omega0_; }
  const SolveDiagnostics& diagnostics() const noexcept { return diag_; }
  double h() const noexcept { return sys_.h; }

  /// e^{E τ} ω(0), valid for any finite τ.
  OmegaBlocks evaluate_omega(double tau) const;

  /// Delay Lyapunov matrix on [-h, h]: ½[Ω1(τ) + Ω2(h-τ)ᵀ] for τ >= 0 and
  /// P(-τ)ᵀ for τ < 0; P(0) comes back exactly symmetric. Throws
  /// DomainError for |τ| > h.
  Matrix P_at(double tau) const;

  /// The τ >= 0 branch ½[Ω1(τ) + Ω2(h-τ)ᵀ] without the domain check. It is
  /// analytic in τ, so it can be differenced across the endpoints.
  Matrix P_branch(double tau) const;

 private:
  TimeDelaySystem sys_;
  Weight q_;
  OdecOperator op_;
  OmegaBlocks omega0_;
  SolveDiagnostics diag_;
};

/// assemble + spectrum check + solve_boundary.
LyapunovSolution solve(const TimeDelaySystem& sys, const Weight& q,
                       const SolveOptions& options = {});

struct ResidualOptions {
  quad::Options quadrature;
  /// Central-difference step as a fraction of h (absolute when h = 0).
  double fd_step = 1e-6;
};

/// max over the grid of |P'(τ) - P(τ)A0 - P(τ-h)A1 - ∫ P(τ+θ)A_D(θ)dθ|.
double residual_dde(const LyapunovSolution& sol,
                    const std::vector<double>& grid,
                    const ResidualOptions& options = {});

/// max|A0ᵀP(0) + P(0)A0 + A1ᵀP(h) + P(-h)A1
///     + ∫ [A_D(θ)ᵀP(-θ) + P(θ)A_D(θ)] dθ + Q|.
double residual_algebraic(const LyapunovSolution& sol,
                          const ResidualOptions& options = {});

/// Distance of the propagated Ω3..Ω6 from their integral representations
/// in terms of Ω1, Ω2, as {r3, r4, r5, r6}.
std::array<double, 4> residual_collapsed(const LyapunovSolution& sol,
                                         const std::vector<double>& grid,
                                         const ResidualOptions& options = {});

/// max over the grid of the three flip identities
/// Ω1(τ) = Ω2(h-τ)ᵀ, Ω3(τ) = Ω6(h-τ)ᵀ, Ω4(τ) = Ω5(h-τ)ᵀ.
double residual_flip(const LyapunovSolution& sol,
                     const std::vector<double>& grid);

/// max|Ω1(0) - Ω1(0)ᵀ|
double residual_symmetry(const LyapunovSolution& sol);

/// max of |Ω1(0) - Ω2(h)|, |Ω3(0)|, |Ω4(h)|, |Ω5(0)|, |Ω6(h)|.
double residual_endpoint(const LyapunovSolution& sol);

struct ResidualReport {
  double dde = 0.0;
  double algebraic = 0.0;
  std::array<double, 4> collapsed{};
  double flip = 0.0;
  double symmetry = 0.0;
  double endpoint = 0.0;
};

ResidualReport certify(const LyapunovSolution& sol,
                       const std::vector<double>& grid,
                       const ResidualOptions& options = {});

/// `count` equally spaced points covering [0, h] (count >= 1).
std::vector<double> uniform_grid(double h, int count);

}  // namespace delyap
