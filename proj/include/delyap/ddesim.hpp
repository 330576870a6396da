#pragma once

// Simulation path used to cross-check the analytic delay Lyapunov matrix.
//
// The distributed delay is replaced by the accumulator
// y(t) = ∫_{-h}^{0} e^{Ad θ} Bd x(t + θ) dθ, which turns the plant into
//
//   x' = A0 x + Cd y + A1 x(t - h)
//   y' = Bd x - Ad y - e^{-Ad h} Bd x(t - h),
//
// integrated by classical RK4 on a grid with dt = h / m. Delayed values are
// read from a cubic Hermite interpolant of already computed steps, so every
// delayed read falls inside one past step (method of steps).
//
// The accumulator form carries extra modes e^{-Ad t} that the original
// plant does not have; they grow from rounding noise whenever Ad has an
// eigenvalue with negative real part. After every step y is therefore
// recomputed from its defining integral over the dense record (3-point
// Gauss per step on the Hermite interpolant), which keeps it on the
// constraint and the scheme fourth order.

#include <iosfwd>
#include <optional>
#include <vector>

#include "delyap/matcore.hpp"
#include "delyap/model.hpp"

namespace delyap {

/// Initial function φ on [-h, 0]. The state may be a vector (one column)
/// or a matrix (fundamental-matrix runs).
class HistorySpec {
 public:
  enum class Kind { point_mass, sampled };

  /// φ(0) = x0, φ(θ) = 0 for θ < 0.
  static HistorySpec point_mass(const Vector& x0);
  /// φ(0) = I_n, φ(θ) = 0 for θ < 0.
  static HistorySpec fundamental(Index n);
  /// Column j of `samples` is φ(-h + j h / (cols - 1)); cubic interpolation
  /// between samples. Needs at least two columns.
  static HistorySpec sampled(const Matrix& samples, double h);

  Kind kind() const noexcept { return kind_; }
  Index n() const noexcept { return initial_.rows(); }
  /// Number of state columns (1 for vector histories).
  Index columns() const noexcept { return initial_.cols(); }
  const Matrix& initial() const noexcept { return initial_; }

  /// φ(θ) for θ in [-h, 0]. For a point mass this is the left limit (zero)
  /// everywhere except θ = 0 itself when `at_origin_exact` is set.
  Matrix value(double theta, bool at_origin_exact = true) const;

  /// Interior sample abscissae, where φ may lose smoothness.
  std::vector<double> knots() const;

 private:
  Kind kind_ = Kind::point_mass;
  Matrix initial_;
  Matrix samples_;
  double h_ = 0.0;
};

/// Dense record of one simulation.
class Trajectory {
 public:
  Trajectory(double h, double dt, HistorySpec history);

  double dt() const noexcept { return dt_; }
  double h() const noexcept { return h_; }
  Index steps() const noexcept { return static_cast<Index>(x_.size()) - 1; }
  double time(Index k) const noexcept { return static_cast<double>(k) * dt_; }
  double final_time() const noexcept { return time(steps()); }
  const Matrix& x(Index k) const { return x_.at(k); }
  const Matrix& y(Index k) const { return y_.at(k); }
  /// x'(t_k); the right-sided derivative where x' jumps.
  Matrix xdot(Index k) const;
  const HistorySpec& history() const noexcept { return history_; }

  /// x(t) by cubic Hermite interpolation inside the step containing t;
  /// history values for t < 0. Throws DomainError beyond the final time.
  Matrix state_at(double t) const;

  /// Hermite interpolant restricted to step k, s in [0, 1].
  Matrix interpolate(Index k, double s) const;

  /// Writes t, x_1..x_n, y_1..y_nd (or x_i_j / y_i_j for matrix states).
  void write_csv(std::ostream& os) const;

  /// x' at the left and right ends of step k (the Hermite slopes).
  const Matrix& slope_start(Index k) const { return dstart_.at(k); }
  const Matrix& slope_end(Index k) const { return dend_.at(k); }

  // Builder interface used by simulate().
  void push(Matrix x, Matrix y);
  void push_derivatives(Matrix start, Matrix end);

 private:
  double h_;
  double dt_;
  HistorySpec history_;
  std::vector<Matrix> x_;
  std::vector<Matrix> y_;
  std::vector<Matrix> dstart_;  // x' at the left end of each step
  std::vector<Matrix> dend_;    // x' at the right end of each step
};

/// Integrates the augmented system over [0, T]. Requires dt = h / m with
/// integer m >= 20 (any dt > 0 when h = 0). The step count is
/// ceil(T / dt). Throws DomainError on a bad grid and SimulationBlowUp when
/// the state stops being finite.
Trajectory simulate(const TimeDelaySystem& sys, const HistorySpec& history,
                    double T, double dt);

/// simulate() with Φ0(0) = I, Φ0(θ < 0) = 0.
Trajectory fundamental_matrix(const TimeDelaySystem& sys, double T, double dt);

/// max over `times` of |x'(t) - A0 x(t) - A1 x(t-h) - ∫ A_D(θ) x(t+θ) dθ|,
/// the kernel integral done by quadrature on the simulated path. Checks
/// that the accumulator form reproduces the distributed delay.
double delay_equation_residual(const TimeDelaySystem& sys,
                               const Trajectory& traj,
                               const std::vector<double>& times);

struct CostEstimate {
  /// ∫_0^T xᵀ Q x dt by composite Simpson.
  double value = 0.0;
  /// Estimate of ∫_T^∞ from the decay over the last tenth of the run.
  double tail = 0.0;
  /// Set when the tail is not small relative to the value (> 10%).
  bool tail_warning = false;
};

CostEstimate cost_quadrature(const Trajectory& traj, const Matrix& Q);

struct OracleOptions {
  /// Horizon; 0 selects max(20, 20 h).
  double T = 0.0;
  /// Time step; 0 selects h / 100 (0.01 when h = 0).
  double dt = 0.0;
  /// Double T until the tail estimate drops below this, at most
  /// `max_doublings` times.
  double tail_target = 1e-5;
  int max_doublings = 8;
};

struct OracleResult {
  std::vector<Matrix> P;
  double tail = 0.0;
  double horizon = 0.0;
  bool tail_warning = false;
};

/// P(τ) = ∫_0^∞ Φ0(t)ᵀ Q Φ0(t + τ) dt, truncated at the horizon and
/// evaluated by Simpson's rule on the simulation grid, for each τ in [0, h].
OracleResult oracle_P(const TimeDelaySystem& sys, const Matrix& Q,
                      const std::vector<double>& taus,
                      const OracleOptions& options = {});

/// Single-τ convenience wrapper.
Matrix oracle_P(const TimeDelaySystem& sys, const Matrix& Q, double tau,
                const OracleOptions& options = {});

/// Composite Simpson over equally spaced samples (3/8 rule on the last
/// three intervals when the interval count is odd).
double simpson(const std::vector<double>& samples, double dt);

}  // namespace delyap
