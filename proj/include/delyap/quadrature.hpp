#pragma once

#include <functional>
#include <span>
#include <vector>

#include "delyap/matcore.hpp"

namespace delyap::quad {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on the Legendre recurrence; exact for polynomials of
/// degree < 2 * order.
GaussRule gauss_legendre(int order);

using MatrixIntegrand = std::function<Matrix(double)>;

/// Composite Gauss–Legendre on [a, b] with a fixed number of equal panels.
Matrix composite(const MatrixIntegrand& f, double a, double b, int panels,
                 const GaussRule& rule);

struct Options {
  int order = 16;
  int initial_panels = 2;
  int max_panels = 1024;
  /// Stop once doubling the panel count changes the result by less than
  /// tolerance * max(1, |result|) in max-abs norm.
  double tolerance = 1e-10;
};

/// Integrates a smooth matrix-valued f over [a, b], doubling panels until
/// the result settles. `breaks` lists interior points where f may lose
/// smoothness; each smooth piece is integrated separately. An empty or
/// reversed interval yields the zero matrix of f's shape.
Matrix integrate(const MatrixIntegrand& f, double a, double b,
                 std::span<const double> breaks = {},
                 const Options& options = {});

}  // namespace delyap::quad
