#include "delyap/ddesim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "delyap/errors.hpp"
#include "delyap/quadrature.hpp"

namespace delyap {

namespace {

// Cubic Hermite basis on s in [0, 1] for values (p0, p1) and slopes already
// scaled by the interval width (m0, m1).
Matrix hermite(const Matrix& p0, const Matrix& m0, const Matrix& p1,
               const Matrix& m1, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 +
         (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1;
}

std::vector<double> simpson_weights(Index intervals) {
  std::vector<double> w(intervals + 1, 0.0);
  if (intervals == 0) return w;
  if (intervals == 1) {
    w[0] = w[1] = 0.5;
    return w;
  }
  const Index simpson_part = intervals % 2 == 0 ? intervals : intervals - 3;
  for (Index i = 0; i + 2 <= simpson_part; i += 2) {
    w[i] += 1.0 / 3.0;
    w[i + 1] += 4.0 / 3.0;
    w[i + 2] += 1.0 / 3.0;
  }
  if (simpson_part != intervals) {
    const Index i = simpson_part;
    w[i] += 3.0 / 8.0;
    w[i + 1] += 9.0 / 8.0;
    w[i + 2] += 9.0 / 8.0;
    w[i + 3] += 3.0 / 8.0;
  }
  return w;
}

// Envelope decay over the last tenth of the samples: compare the peak of
// the two halves of that window and extrapolate exponentially.
double exponential_tail(const std::vector<double>& g, double dt) {
  const Index count = static_cast<Index>(g.size());
  const Index window = std::max<Index>(4, count / 10);
  if (count < window + 1) return 0.0;
  const Index half = window / 2;
  const Index start = count - window;
  double first = 0.0;
  double second = 0.0;
  for (Index i = start; i < start + half; ++i) first = std::max(first, std::abs(g[i]));
  for (Index i = start + half; i < count; ++i) second = std::max(second, std::abs(g[i]));
  if (second == 0.0) return 0.0;
  if (second >= first) return std::numeric_limits<double>::infinity();
  const double rate = std::log(first / second) / (static_cast<double>(half) * dt);
  return second / rate;
}

// y(t) = ∫_{-h}^{0} e^{Ad θ} Bd x(t + θ) dθ evaluated at grid times from the
// trajectory record. The record part is summed step by step with 3-point
// Gauss on the Hermite interpolant; since the Hermite basis at fixed nodes
// is linear in (x_j, dt x'_j, x_{j+1}, dt x'_{j+1}), the weights collapse
// into four nd x n matrices per step of lag.
class Accumulator {
 public:
  Accumulator(const TimeDelaySystem& sys, const HistorySpec& history,
              Index lag, double dt)
      : history_(history), lag_(lag) {
    if (sys.h == 0.0) return;
    static constexpr double kNode[3] = {0.5 - 0.3872983346207417, 0.5,
                                        0.5 + 0.3872983346207417};
    static constexpr double kWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    for (Index r = 0; r < lag; ++r) {
      std::array<Matrix, 4> w;
      for (Matrix& m : w) m = Matrix::Zero(sys.nd(), sys.n());
      for (int q = 0; q < 3; ++q) {
        const double s = kNode[q];
        const double theta = -(static_cast<double>(r) + 1.0 - s) * dt;
        const Matrix kernel = kWeight[q] * dt * (expm(sys.Ad, theta) * sys.Bd);
        const double s2 = s * s;
        const double s3 = s2 * s;
        w[0] += (2 * s3 - 3 * s2 + 1) * kernel;
        w[1] += (s3 - 2 * s2 + s) * dt * kernel;
        w[2] += (-2 * s3 + 3 * s2) * kernel;
        w[3] += (s3 - s2) * dt * kernel;
      }
      weights_.push_back(std::move(w));
    }
    // History part of the window for the first lag grid times.
    if (history.kind() == HistorySpec::Kind::sampled) {
      const auto knots = history.knots();
      for (Index i = 1; i < lag; ++i) {
        const double t = static_cast<double>(i) * dt;
        history_part_.push_back(quad::integrate(
            [&](double u) {
              return Matrix(expm(sys.Ad, u - t) * sys.Bd * history.value(u));
            },
            t - sys.h, 0.0, knots));
      }
    }
  }

  // y at t_{k+1}; step k (not yet stored) runs from traj.x(k) to x_end.
  Matrix at_step_end(const Trajectory& traj, Index k, const Matrix& x_end,
                     const Matrix& slope_start, const Matrix& slope_end) const {
    const auto& w0 = weights_[0];
    Matrix y = w0[0] * traj.x(k) + w0[1] * slope_start + w0[2] * x_end +
               w0[3] * slope_end;
    for (Index r = 1; r < lag_ && r <= k; ++r) {
      const Index j = k - r;
      const auto& w = weights_[r];
      y += w[0] * traj.x(j) + w[1] * traj.slope_start(j) +
           w[2] * traj.x(j + 1) + w[3] * traj.slope_end(j);
    }
    const Index i = k + 1;
    if (i < lag_ && history_.kind() == HistorySpec::Kind::sampled) {
      y += history_part_[i - 1];
    }
    return y;
  }

 private:
  const HistorySpec& history_;
  Index lag_;
  std::vector<std::array<Matrix, 4>> weights_;
  std::vector<Matrix> history_part_;
};

Index steps_per_delay(double h, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("simulate: dt must be positive and finite");
  }
  if (h == 0.0) return 0;
  const double ratio = h / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError("simulate: dt = " + std::to_string(dt) +
                      " does not divide h = " + std::to_string(h));
  }
  if (rounded < 20) {
    throw DomainError("simulate: need dt ≤ h/20 (got h/dt = " +
                      std::to_string(rounded) + ")");
  }
  return static_cast<Index>(rounded);
}

}  // namespace

// ---------------------------------------------------------------------------
// HistorySpec

HistorySpec HistorySpec::point_mass(const Vector& x0) {
  require_finite(x0, "history x0");
  HistorySpec spec;
  spec.kind_ = Kind::point_mass;
  spec.initial_ = x0;
  return spec;
}

HistorySpec HistorySpec::fundamental(Index n) {
  HistorySpec spec;
  spec.kind_ = Kind::point_mass;
  spec.initial_ = Matrix::Identity(n, n);
  return spec;
}

HistorySpec HistorySpec::sampled(const Matrix& samples, double h) {
  require_finite(samples, "history samples");
  if (samples.cols() < 2) {
    throw DimensionError("sampled history needs at least two samples");
  }
  if (!(h > 0.0)) throw DomainError("sampled history needs h > 0");
  HistorySpec spec;
  spec.kind_ = Kind::sampled;
  spec.samples_ = samples;
  spec.h_ = h;
  spec.initial_ = samples.col(samples.cols() - 1);
  return spec;
}

Matrix HistorySpec::value(double theta, bool at_origin_exact) const {
  if (kind_ == Kind::point_mass) {
    if (theta == 0.0 && at_origin_exact) return initial_;
    return Matrix::Zero(initial_.rows(), initial_.cols());
  }
  const Index last = samples_.cols() - 1;
  const double spacing = h_ / static_cast<double>(last);
  const double u = std::clamp((theta + h_) / spacing, 0.0, double(last));
  const Index j = std::min<Index>(static_cast<Index>(std::floor(u)), last - 1);
  const double s = u - static_cast<double>(j);
  auto slope = [&](Index i) -> Matrix {
    if (i == 0) return samples_.col(1) - samples_.col(0);
    if (i == last) return samples_.col(last) - samples_.col(last - 1);
    return 0.5 * (samples_.col(i + 1) - samples_.col(i - 1));
  };
  return hermite(samples_.col(j), slope(j), samples_.col(j + 1), slope(j + 1), s);
}

std::vector<double> HistorySpec::knots() const {
  std::vector<double> out;
  if (kind_ != Kind::sampled) return out;
  const Index last = samples_.cols() - 1;
  for (Index j = 1; j < last; ++j) out.push_back(-h_ + h_ * j / last);
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(double h, double dt, HistorySpec history)
    : h_(h), dt_(dt), history_(std::move(history)) {}

void Trajectory::push(Matrix x, Matrix y) {
  x_.push_back(std::move(x));
  y_.push_back(std::move(y));
}

void Trajectory::push_derivatives(Matrix start, Matrix end) {
  dstart_.push_back(std::move(start));
  dend_.push_back(std::move(end));
}

Matrix Trajectory::xdot(Index k) const {
  if (k < static_cast<Index>(dstart_.size())) return dstart_.at(k);
  return dend_.at(k - 1);
}

Matrix Trajectory::interpolate(Index k, double s) const {
  if (s == 0.0) return x_.at(k);
  if (s == 1.0) return x_.at(k + 1);
  return hermite(x_.at(k), dt_ * dstart_.at(k), x_.at(k + 1),
                 dt_ * dend_.at(k), s);
}

Matrix Trajectory::state_at(double t) const {
  if (t < 0.0) {
    if (t < -h_ * (1.0 + 1e-12)) {
      throw DomainError("state_at: t before the start of the history");
    }
    return history_.value(std::max(t, -h_), false);
  }
  const double end = final_time();
  if (t > end * (1.0 + 1e-12) + 1e-300) {
    throw DomainError("state_at: t = " + std::to_string(t) +
                      " beyond the simulated horizon");
  }
  const Index steps = this->steps();
  if (steps == 0) return x_.front();
  const double u = std::min(t / dt_, static_cast<double>(steps));
  const Index k = std::min<Index>(static_cast<Index>(std::floor(u)), steps - 1);
  return interpolate(k, u - static_cast<double>(k));
}

void Trajectory::write_csv(std::ostream& os) const {
  const Index n = x_.front().rows();
  const Index nd = y_.front().rows();
  const Index m = x_.front().cols();
  os << "t";
  auto header = [&](const char* name, Index rows) {
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < rows; ++i) {
        os << ',' << name << '_' << (i + 1);
        if (m > 1) os << '_' << (j + 1);
      }
    }
  };
  header("x", n);
  header("y", nd);
  os << '\n';
  std::ostringstream line;
  line.precision(17);
  for (Index k = 0; k <= steps(); ++k) {
    line.str("");
    line << time(k);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n; ++i) line << ',' << x_[k](i, j);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < nd; ++i) line << ',' << y_[k](i, j);
    os << line.str() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Integration

Trajectory simulate(const TimeDelaySystem& sys, const HistorySpec& history,
                    double T, double dt) {
  require_valid(sys);
  if (history.n() != sys.n()) {
    throw DimensionError("history dimension does not match the system");
  }
  const Index lag = steps_per_delay(sys.h, dt);
  if (!(T >= dt) || !std::isfinite(T)) {
    throw DomainError("simulate: need finite T ≥ dt");
  }
  const Index steps = static_cast<Index>(std::ceil(T / dt - 1e-9));
  const bool delay_free = sys.h == 0.0;

  const Matrix delayed_input = expm(sys.Ad, -sys.h) * sys.Bd;
  Trajectory traj(sys.h, dt, history);

  Matrix x = history.initial();
  Matrix y = Matrix::Zero(sys.nd(), history.columns());
  if (history.kind() == HistorySpec::Kind::sampled && !delay_free) {
    const auto knots = history.knots();
    y = quad::integrate(
        [&](double theta) {
          return Matrix(expm(sys.Ad, theta) * sys.Bd * history.value(theta));
        },
        -sys.h, 0.0, knots);
  }
  traj.push(x, y);
  const Accumulator accumulator(sys, history, lag, dt);

  // x(t_k + s dt - h): step k - lag of the record, or the history.
  auto delayed = [&](Index k, double s, const Matrix& current) -> Matrix {
    if (delay_free) return current;
    const Index j = k - lag;
    if (j >= 0) return traj.interpolate(j, s);
    return history.value((static_cast<double>(j) + s) * dt, false);
  };
  auto fx = [&](const Matrix& xs, const Matrix& ys, const Matrix& xd) {
    return Matrix(sys.A0 * xs + sys.Cd * ys + sys.A1 * xd);
  };
  auto fy = [&](const Matrix& xs, const Matrix& ys, const Matrix& xd) {
    return Matrix(sys.Bd * xs - sys.Ad * ys - delayed_input * xd);
  };

  for (Index k = 0; k < steps; ++k) {
    const Matrix d0 = delayed(k, 0.0, x);
    const Matrix k1x = fx(x, y, d0);
    const Matrix k1y = fy(x, y, d0);

    Matrix xs = x + 0.5 * dt * k1x;
    Matrix ys = y + 0.5 * dt * k1y;
    const Matrix dh = delayed(k, 0.5, xs);
    const Matrix k2x = fx(xs, ys, dh);
    const Matrix k2y = fy(xs, ys, dh);

    xs = x + 0.5 * dt * k2x;
    ys = y + 0.5 * dt * k2y;
    const Matrix dh2 = delay_free ? xs : dh;
    const Matrix k3x = fx(xs, ys, dh2);
    const Matrix k3y = fy(xs, ys, dh2);

    xs = x + dt * k3x;
    ys = y + dt * k3y;
    const Matrix d1 = delayed(k, 1.0, xs);
    const Matrix k4x = fx(xs, ys, d1);
    const Matrix k4y = fy(xs, ys, d1);

    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    if (!x.allFinite() || !y.allFinite()) {
      throw SimulationBlowUp("simulate: state blew up at t = " +
                                 std::to_string(traj.time(k + 1)),
                             traj.time(k + 1));
    }
    if (!delay_free) {
      const Matrix predicted_slope = fx(x, y, delayed(k, 1.0, x));
      y = accumulator.at_step_end(traj, k, x, k1x, predicted_slope);
    }
    const Matrix end_slope = fx(x, y, delayed(k, 1.0, x));
    traj.push_derivatives(k1x, end_slope);
    traj.push(x, y);
  }
  return traj;
}

Trajectory fundamental_matrix(const TimeDelaySystem& sys, double T, double dt) {
  return simulate(sys, HistorySpec::fundamental(sys.n()), T, dt);
}

double delay_equation_residual(const TimeDelaySystem& sys,
                               const Trajectory& traj,
                               const std::vector<double>& times) {
  const double h = sys.h;
  double worst = 0.0;
  for (double t : times) {
    if (t < 0.0 || t > traj.final_time() * (1.0 + 1e-12)) {
      throw DomainError("delay_equation_residual: t outside the run");
    }
    const Index k = static_cast<Index>(std::llround(t / traj.dt()));
    const bool on_node = std::abs(t - traj.time(k)) <= 1e-12 * std::max(1.0, t);
    Matrix lhs;
    if (on_node) {
      lhs = traj.xdot(k);
    } else {
      const double step = 1e-6 * traj.dt();
      lhs = (traj.state_at(t + step) - traj.state_at(t - step)) / (2 * step);
    }
    const Matrix x = traj.state_at(t);
    const Matrix xd =
        h == 0.0 ? x
                 : (t - h == 0.0 ? traj.history().initial() : traj.state_at(t - h));
    Matrix rhs = sys.A0 * x + sys.A1 * xd;
    if (h > 0.0) {
      // x(t+θ) loses smoothness where t+θ hits a multiple of h.
      std::vector<double> breaks;
      for (double s = std::floor((t - h) / h) * h; s <= t; s += h) {
        breaks.push_back(s - t);
      }
      for (double knot : traj.history().knots()) breaks.push_back(knot - t);
      rhs += quad::integrate(
          [&](double theta) {
            return Matrix(kernel_unchecked(sys, theta) * traj.state_at(t + theta));
          },
          -h, 0.0, breaks);
    }
    worst = std::max(worst, max_abs(lhs - rhs));
  }
  return worst;
}

double simpson(const std::vector<double>& samples, double dt) {
  if (samples.empty()) return 0.0;
  const auto w = simpson_weights(static_cast<Index>(samples.size()) - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) sum += w[i] * samples[i];
  return sum * dt;
}

CostEstimate cost_quadrature(const Trajectory& traj, const Matrix& Q) {
  if (traj.x(0).cols() != 1) {
    throw DimensionError("cost_quadrature needs a vector trajectory");
  }
  if (Q.rows() != traj.x(0).rows() || Q.cols() != Q.rows()) {
    throw DimensionError("cost_quadrature: Q has the wrong size");
  }
  std::vector<double> g(traj.steps() + 1);
  for (Index k = 0; k <= traj.steps(); ++k) {
    g[k] = (traj.x(k).transpose() * Q * traj.x(k))(0, 0);
  }
  CostEstimate est;
  est.value = simpson(g, traj.dt());
  est.tail = exponential_tail(g, traj.dt());
  est.tail_warning = est.tail > 0.1 * std::abs(est.value);
  return est;
}

namespace {

struct OracleRun {
  std::vector<Matrix> P;
  double tail = 0.0;
};

OracleRun oracle_once(const TimeDelaySystem& sys, const Matrix& Q,
                      const std::vector<double>& taus, double T, double dt) {
  const Index steps = static_cast<Index>(std::ceil(T / dt - 1e-9));
  const Trajectory phi = fundamental_matrix(sys, steps * dt + sys.h, dt);
  const auto w = simpson_weights(steps);

  OracleRun run;
  for (double tau : taus) {
    Matrix sum = Matrix::Zero(sys.n(), sys.n());
    const double shift = tau / dt;
    const bool aligned = std::abs(shift - std::round(shift)) < 1e-9;
    const Index offset = static_cast<Index>(std::llround(shift));
    for (Index k = 0; k <= steps; ++k) {
      const Matrix ahead =
          aligned ? phi.x(k + offset) : phi.state_at(phi.time(k) + tau);
      sum += w[k] * (phi.x(k).transpose() * Q * ahead);
    }
    run.P.push_back(dt * sum);
  }
  std::vector<double> g(steps + 1);
  const double qnorm = max_abs(Q);
  for (Index k = 0; k <= steps; ++k) g[k] = qnorm * phi.x(k).squaredNorm();
  run.tail = exponential_tail(g, dt);
  return run;
}

}  // namespace

OracleResult oracle_P(const TimeDelaySystem& sys, const Matrix& Q,
                      const std::vector<double>& taus,
                      const OracleOptions& options) {
  require_valid(sys);
  for (double tau : taus) {
    if (!(tau >= 0.0 && tau <= sys.h * (1.0 + 1e-12))) {
      throw DomainError("oracle_P: τ must lie in [0, h]");
    }
  }
  double dt = options.dt > 0.0 ? options.dt
                               : (sys.h > 0.0 ? sys.h / 100.0 : 0.01);
  double T = options.T > 0.0 ? options.T : std::max(20.0, 20.0 * sys.h);

  OracleRun run = oracle_once(sys, Q, taus, T, dt);
  for (int d = 0; d < options.max_doublings && run.tail > options.tail_target;
       ++d) {
    T *= 2.0;
    run = oracle_once(sys, Q, taus, T, dt);
  }
  OracleResult result;
  result.P = std::move(run.P);
  result.tail = run.tail;
  result.horizon = T;
  double scale = 0.0;
  for (const Matrix& p : result.P) scale = std::max(scale, max_abs(p));
  result.tail_warning = result.tail > 0.1 * scale;
  return result;
}

Matrix oracle_P(const TimeDelaySystem& sys, const Matrix& Q, double tau,
                const OracleOptions& options) {
  return oracle_P(sys, Q, std::vector<double>{tau}, options).P.front();
}

}  // namespace delyap
