#include "delyap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "delyap/errors.hpp"

namespace delyap::quad {

GaussRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

namespace {

const GaussRule& cached_rule(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, gauss_legendre(order)).first;
  return it->second;
}

Matrix adaptive_piece(const MatrixIntegrand& f, double a, double b,
                      const Options& options) {
  const GaussRule& rule = cached_rule(options.order);
  int panels = std::max(1, options.initial_panels);
  Matrix coarse = composite(f, a, b, panels, rule);
  while (panels < options.max_panels) {
    panels *= 2;
    Matrix fine = composite(f, a, b, panels, rule);
    const double change = max_abs(fine - coarse);
    coarse = std::move(fine);
    if (change <= options.tolerance * std::max(1.0, max_abs(coarse))) break;
  }
  return coarse;
}

}  // namespace

Matrix composite(const MatrixIntegrand& f, double a, double b, int panels,
                 const GaussRule& rule) {
  const double width = (b - a) / panels;
  Matrix sum;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      Matrix value = f(mid + 0.5 * width * rule.nodes[k]);
      if (sum.size() == 0) {
        sum = rule.weights[k] * value;
      } else {
        sum += rule.weights[k] * value;
      }
    }
  }
  return 0.5 * width * sum;
}

Matrix integrate(const MatrixIntegrand& f, double a, double b,
                 std::span<const double> breaks, const Options& options) {
  if (!(b > a)) {
    const Matrix probe = f(a);
    return Matrix::Zero(probe.rows(), probe.cols());
  }
  std::vector<double> cuts{a};
  for (double x : breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Matrix total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // Pieces narrower than rounding noise contribute nothing.
    if (cuts[i + 1] - cuts[i] <= 1e-15 * std::max(1.0, std::abs(b - a))) {
      continue;
    }
    Matrix piece = adaptive_piece(f, cuts[i], cuts[i + 1], options);
    if (total.size() == 0) {
      total = std::move(piece);
    } else {
      total += piece;
    }
  }
  if (total.size() == 0) {
    const Matrix probe = f(a);
    return Matrix::Zero(probe.rows(), probe.cols());
  }
  return total;
}

}  // namespace delyap::quad
