#include "delyap/odec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delyap/errors.hpp"

namespace delyap {

// ---------------------------------------------------------------------------
// Layout

OmegaLayout::OmegaLayout(Index n, Index nd) : n_(n), nd_(nd) {
  if (n < 1 || nd < 1) throw DimensionError("OmegaLayout: n, nd must be ≥ 1");
}

Index OmegaLayout::rows(int k) const {
  switch (k) {
    case 1: case 2: case 3: case 4: return n_;
    case 5: case 6: return nd_;
    default: throw DomainError("Ω block index must be in 1..6");
  }
}

Index OmegaLayout::cols(int k) const {
  switch (k) {
    case 1: case 2: case 5: case 6: return n_;
    case 3: case 4: return nd_;
    default: throw DomainError("Ω block index must be in 1..6");
  }
}

Index OmegaLayout::offset(int k) const {
  Index off = 0;
  for (int j = 1; j < k; ++j) off += length(j);
  rows(k);  // range check
  return off;
}

OmegaBlocks::OmegaBlocks(OmegaLayout layout, Vector stacked)
    : layout_(layout), stacked_(std::move(stacked)) {
  if (stacked_.size() != layout_.size()) {
    throw DimensionError("OmegaBlocks: stacked length " +
                         std::to_string(stacked_.size()) + " ≠ n_s " +
                         std::to_string(layout_.size()));
  }
}

OmegaBlocks OmegaBlocks::from_blocks(const OmegaLayout& layout,
                                     const std::array<Matrix, 6>& blocks) {
  Vector stacked(layout.size());
  for (int k = 1; k <= 6; ++k) {
    const Matrix& b = blocks[k - 1];
    if (b.rows() != layout.rows(k) || b.cols() != layout.cols(k)) {
      throw DimensionError("OmegaBlocks: block Ω" + std::to_string(k) +
                           " has the wrong shape");
    }
    stacked.segment(layout.offset(k), layout.length(k)) = vec(b);
  }
  return {layout, std::move(stacked)};
}

Matrix OmegaBlocks::block(int k) const {
  return unvec(stacked_.segment(layout_.offset(k), layout_.length(k)),
               layout_.rows(k), layout_.cols(k));
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

class BlockWriter {
 public:
  BlockWriter(Matrix& target, const OmegaLayout& layout)
      : target_(target), layout_(layout) {}

  void set(int row_block, int col_block, const Matrix& value) {
    target_.block(layout_.offset(row_block), layout_.offset(col_block),
                  layout_.length(row_block), layout_.length(col_block)) =
        value;
  }

 private:
  Matrix& target_;
  const OmegaLayout& layout_;
};

}  // namespace

OdecOperator assemble(const TimeDelaySystem& sys) {
  require_valid(sys);
  const Index n = sys.n();
  const Index nd = sys.nd();
  OdecOperator op;
  op.layout = OmegaLayout(n, nd);
  op.h = sys.h;
  const Index ns = op.layout.size();

  const Matrix In = Matrix::Identity(n, n);
  const Matrix Ind = Matrix::Identity(nd, nd);
  const Matrix A0t = sys.A0.transpose();
  const Matrix A1t = sys.A1.transpose();
  const Matrix Adt = sys.Ad.transpose();
  const Matrix Bdt = sys.Bd.transpose();
  const Matrix Cdt = sys.Cd.transpose();
  const Matrix CdDelayedT = (sys.Cd * expm(sys.Ad, -sys.h)).transpose();

  op.E = Matrix::Zero(ns, ns);
  BlockWriter e(op.E, op.layout);
  e.set(1, 1, kron(A0t, In));
  e.set(1, 2, kron(A1t, In));
  e.set(1, 3, kron(Bdt, In));
  e.set(1, 4, kron(Bdt, In));
  e.set(2, 1, -kron(In, A1t));
  e.set(2, 2, -kron(In, A0t));
  e.set(2, 5, -kron(In, Bdt));
  e.set(2, 6, -kron(In, Bdt));
  e.set(3, 1, kron(Cdt, In));
  e.set(3, 3, -kron(Adt, In));
  e.set(4, 2, -kron(CdDelayedT, In));
  e.set(4, 4, -kron(Adt, In));
  e.set(5, 1, kron(In, CdDelayedT));
  e.set(5, 5, kron(In, Adt));
  e.set(6, 2, -kron(In, Cdt));
  e.set(6, 6, kron(In, Adt));

  // Row 1 also carries Ω3(0) Bd and Bdᵀ Ω6(h); both vanish on the
  // boundary rows 3 and 6, so the solution is unaffected.
  op.F1 = Matrix::Zero(ns, ns);
  BlockWriter f1(op.F1, op.layout);
  f1.set(1, 1, kron(A0t, In));
  f1.set(1, 2, kron(A1t, In));
  f1.set(1, 3, kron(Bdt, In));
  f1.set(1, 4, kron(Bdt, In));
  f1.set(2, 1, kron(In, In));
  f1.set(3, 3, kron(Ind, In));
  f1.set(4, 5, kron(In, Ind));

  op.F2 = Matrix::Zero(ns, ns);
  BlockWriter f2(op.F2, op.layout);
  f2.set(1, 1, kron(In, A1t));
  f2.set(1, 2, kron(In, A0t));
  f2.set(1, 5, kron(In, Bdt));
  f2.set(1, 6, kron(In, Bdt));
  f2.set(2, 2, -kron(In, In));
  f2.set(5, 4, kron(Ind, In));
  f2.set(6, 6, kron(In, Ind));

  op.G = op.F1 + op.F2 * expm(op.E, sys.h);
  return op;
}

OmegaBlocks omega_rhs(const TimeDelaySystem& sys, const OmegaBlocks& omega) {
  const Matrix W1 = omega.block(1), W2 = omega.block(2), W3 = omega.block(3),
               W4 = omega.block(4), W5 = omega.block(5), W6 = omega.block(6);
  const Matrix CdDelayed = sys.Cd * expm(sys.Ad, -sys.h);
  const Matrix Bdt = sys.Bd.transpose();
  return OmegaBlocks::from_blocks(
      omega.layout(),
      {W1 * sys.A0 + W2 * sys.A1 + W3 * sys.Bd + W4 * sys.Bd,
       -sys.A1.transpose() * W1 - sys.A0.transpose() * W2 - Bdt * W5 -
           Bdt * W6,
       -W3 * sys.Ad + W1 * sys.Cd,
       -W4 * sys.Ad - W2 * CdDelayed,
       sys.Ad.transpose() * W5 + CdDelayed.transpose() * W1,
       sys.Ad.transpose() * W6 - sys.Cd.transpose() * W2});
}

// ---------------------------------------------------------------------------
// Solve

namespace {

Vector boundary_rhs(const OdecOperator& op, const Weight& q) {
  const Index n = op.layout.n();
  if (q.n() != n) {
    throw DimensionError("Q must be " + std::to_string(n) + "x" +
                         std::to_string(n));
  }
  Vector rhs = Vector::Zero(op.ns());
  rhs.head(n * n) = -vec(q.matrix());
  return rhs;
}

std::string describe(const SpectrumReport& report) {
  std::ostringstream os;
  os.precision(3);
  os << "boundary matrix F1 + F2 e^{Eh} is singular: sigma_min = "
     << report.sigma_min << " (relative " << report.sigma_min_relative
     << ")";
  return os.str();
}

struct BoundarySolve {
  OmegaBlocks omega0;
  SolveDiagnostics diagnostics;
};

BoundarySolve solve_with_diagnostics(const OdecOperator& op, const Weight& q,
                                     const SolveOptions& options) {
  const Vector rhs = boundary_rhs(op, q);
  SolveDiagnostics diag;
  diag.spectrum = check(op, options.thresholds);
  if (diag.spectrum.verdict == SpectrumVerdict::violated) {
    throw SpectrumConditionViolated(describe(diag.spectrum),
                                    diag.spectrum.sigma_min,
                                    diag.spectrum.sigma_min_relative);
  }
  diag.near_singular = diag.spectrum.verdict == SpectrumVerdict::borderline;
  // Singularity was already judged by the spectrum check above.
  LinearSolveResult lin = solve_linear(op.G, rhs, 0.0);
  diag.rcond = lin.rcond;
  return {OmegaBlocks(op.layout, std::move(lin.x)), diag};
}

}  // namespace

OmegaBlocks solve_boundary(const OdecOperator& op, const Weight& q,
                           const SolveOptions& options) {
  return solve_with_diagnostics(op, q, options).omega0;
}

LyapunovSolution::LyapunovSolution(TimeDelaySystem sys, Weight q,
                                   OdecOperator op, OmegaBlocks omega0,
                                   SolveDiagnostics diagnostics)
    : sys_(std::move(sys)),
      q_(std::move(q)),
      op_(std::move(op)),
      omega0_(std::move(omega0)),
      diag_(diagnostics) {}

OmegaBlocks LyapunovSolution::evaluate_omega(double tau) const {
  if (!std::isfinite(tau)) throw DomainError("evaluate_omega: τ not finite");
  if (tau == 0.0) return omega0_;
  return {op_.layout, expm(op_.E, tau) * omega0_.stacked()};
}

Matrix LyapunovSolution::P_branch(double tau) const {
  const Matrix w1 = evaluate_omega(tau).block(1);
  const Matrix w2 = evaluate_omega(sys_.h - tau).block(2);
  return 0.5 * (w1 + w2.transpose());
}

Matrix LyapunovSolution::P_at(double tau) const {
  const double h = sys_.h;
  // Allow rounding noise at the interval ends, e.g. τ = h computed as k*h/k.
  const double slack = 1e-12 * std::max(1.0, h);
  if (!std::isfinite(tau) || std::abs(tau) > h + slack) {
    throw DomainError("P_at: τ = " + std::to_string(tau) + " outside [-h, h]");
  }
  tau = std::clamp(tau, -h, h);
  if (tau == 0.0) {
    // P(0) = P(0)ᵀ holds exactly in theory; enforce it so quadratic forms
    // built on P(0) see a symmetric matrix.
    const Matrix p = P_branch(0.0);
    return 0.5 * (p + p.transpose());
  }
  if (tau > 0.0) return P_branch(tau);
  return P_branch(-tau).transpose();
}

LyapunovSolution solve(const TimeDelaySystem& sys, const Weight& q,
                       const SolveOptions& options) {
  OdecOperator op = assemble(sys);
  BoundarySolve bs = solve_with_diagnostics(op, q, options);
  return {sys, q, std::move(op), std::move(bs.omega0), bs.diagnostics};
}

// ---------------------------------------------------------------------------
// Residuals

double residual_dde(const LyapunovSolution& sol,
                    const std::vector<double>& grid,
                    const ResidualOptions& options) {
  const TimeDelaySystem& sys = sol.system();
  const double h = sys.h;
  const double step = h > 0.0 ? options.fd_step * h : options.fd_step;
  double worst = 0.0;
  for (double tau : grid) {
    const Matrix lhs =
        (sol.P_branch(tau + step) - sol.P_branch(tau - step)) / (2.0 * step);
    Matrix rhs = sol.P_at(tau) * sys.A0 + sol.P_at(tau - h) * sys.A1;
    if (h > 0.0) {
      const double kink = -tau;  // P(τ+θ) has a derivative jump at τ+θ = 0
      rhs += quad::integrate(
          [&](double theta) {
            return Matrix(sol.P_at(tau + theta) * kernel_unchecked(sys, theta));
          },
          -h, 0.0, std::span<const double>(&kink, 1), options.quadrature);
    }
    worst = std::max(worst, max_abs(lhs - rhs));
  }
  return worst;
}

double residual_algebraic(const LyapunovSolution& sol,
                          const ResidualOptions& options) {
  const TimeDelaySystem& sys = sol.system();
  const double h = sys.h;
  const Matrix P0 = sol.P_at(0.0);
  Matrix rhs = sys.A0.transpose() * P0 + P0 * sys.A0 +
               sys.A1.transpose() * sol.P_at(h) + sol.P_at(-h) * sys.A1;
  if (h > 0.0) {
    rhs += quad::integrate(
        [&](double theta) {
          const Matrix kernel = kernel_unchecked(sys, theta);
          const Matrix p = sol.P_at(-theta);
          return Matrix(kernel.transpose() * p + p.transpose() * kernel);
        },
        -h, 0.0, {}, options.quadrature);
  }
  return max_abs(rhs + sol.weight().matrix());
}

std::array<double, 4> residual_collapsed(const LyapunovSolution& sol,
                                         const std::vector<double>& grid,
                                         const ResidualOptions& options) {
  const TimeDelaySystem& sys = sol.system();
  const double h = sys.h;
  auto cd_exp = [&](double theta) {
    return Matrix(sys.Cd * expm(sys.Ad, theta));
  };
  auto omega_block = [&](int k, double t) {
    return sol.evaluate_omega(t).block(k);
  };
  std::array<double, 4> worst{};
  for (double tau : grid) {
    const OmegaBlocks here = sol.evaluate_omega(tau);
    const Matrix i3 = quad::integrate(
        [&](double th) { return Matrix(omega_block(1, tau + th) * cd_exp(th)); },
        -tau, 0.0, {}, options.quadrature);
    const Matrix i4 = quad::integrate(
        [&](double th) {
          return Matrix(omega_block(2, tau + th + h) * cd_exp(th));
        },
        -h, -tau, {}, options.quadrature);
    const Matrix i5 = quad::integrate(
        [&](double th) {
          return Matrix(cd_exp(th).transpose() * omega_block(1, tau - th - h));
        },
        -h, -h + tau, {}, options.quadrature);
    const Matrix i6 = quad::integrate(
        [&](double th) {
          return Matrix(cd_exp(th).transpose() * omega_block(2, tau - th));
        },
        -h + tau, 0.0, {}, options.quadrature);
    worst[0] = std::max(worst[0], max_abs(here.block(3) - i3));
    worst[1] = std::max(worst[1], max_abs(here.block(4) - i4));
    worst[2] = std::max(worst[2], max_abs(here.block(5) - i5));
    worst[3] = std::max(worst[3], max_abs(here.block(6) - i6));
  }
  return worst;
}

double residual_flip(const LyapunovSolution& sol,
                     const std::vector<double>& grid) {
  const double h = sol.h();
  double worst = 0.0;
  for (double tau : grid) {
    const OmegaBlocks a = sol.evaluate_omega(tau);
    const OmegaBlocks b = sol.evaluate_omega(h - tau);
    worst = std::max({worst,
                      max_abs(a.block(1) - b.block(2).transpose()),
                      max_abs(a.block(3) - b.block(6).transpose()),
                      max_abs(a.block(4) - b.block(5).transpose())});
  }
  return worst;
}

double residual_symmetry(const LyapunovSolution& sol) {
  const Matrix w1 = sol.omega0().block(1);
  return max_abs(w1 - w1.transpose());
}

double residual_endpoint(const LyapunovSolution& sol) {
  const OmegaBlocks& start = sol.omega0();
  const OmegaBlocks end = sol.evaluate_omega(sol.h());
  return std::max({max_abs(start.block(1) - end.block(2)),
                   max_abs(start.block(3)), max_abs(end.block(4)),
                   max_abs(start.block(5)), max_abs(end.block(6))});
}

ResidualReport certify(const LyapunovSolution& sol,
                       const std::vector<double>& grid,
                       const ResidualOptions& options) {
  ResidualReport r;
  r.dde = residual_dde(sol, grid, options);
  r.algebraic = residual_algebraic(sol, options);
  r.collapsed = residual_collapsed(sol, grid, options);
  r.flip = residual_flip(sol, grid);
  r.symmetry = residual_symmetry(sol);
  r.endpoint = residual_endpoint(sol);
  return r;
}

std::vector<double> uniform_grid(double h, int count) {
  if (count < 1) throw DomainError("uniform_grid: count must be ≥ 1");
  if (count == 1) return {0.0};
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[i] = h * i / (count - 1);
  grid.back() = h;
  return grid;
}

}  // namespace delyap
