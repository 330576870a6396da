#include "delyap/spectrum.hpp"

#include <cmath>

#include "delyap/odec.hpp"
#include "delyap/quadrature.hpp"

namespace delyap {

std::string_view to_string(SpectrumVerdict verdict) {
  switch (verdict) {
    case SpectrumVerdict::satisfied: return "satisfied";
    case SpectrumVerdict::borderline: return "borderline";
    case SpectrumVerdict::violated: return "violated";
  }
  return "unknown";
}

SpectrumVerdict classify(double sigma_min_relative,
                         const SpectrumThresholds& thresholds) {
  if (!(sigma_min_relative >= thresholds.violated)) {
    return SpectrumVerdict::violated;
  }
  if (sigma_min_relative < thresholds.borderline) {
    return SpectrumVerdict::borderline;
  }
  return SpectrumVerdict::satisfied;
}

SpectrumReport check(const OdecOperator& op,
                     const SpectrumThresholds& thresholds) {
  SpectrumReport report;
  report.thresholds = thresholds;
  report.ns = op.ns();
  report.sigma_min = smallest_singular_value(op.G);
  const double scale = max_abs(op.G);
  report.sigma_min_relative = scale > 0.0 ? report.sigma_min / scale : 0.0;
  report.verdict = classify(report.sigma_min_relative, thresholds);
  return report;
}

Eigen::MatrixXcd kernel_laplace_closed_form(const TimeDelaySystem& sys,
                                            std::complex<double> lambda) {
  using CMatrix = Eigen::MatrixXcd;
  const Index nd = sys.nd();
  // e^{-Mh} = e^{-λh} e^{-Ad h} since λI commutes with Ad.
  const CMatrix decay =
      std::exp(-lambda * sys.h) * expm(sys.Ad, -sys.h).cast<std::complex<double>>();
  const CMatrix m =
      lambda * CMatrix::Identity(nd, nd) + sys.Ad.cast<std::complex<double>>();
  const CMatrix inner = m.partialPivLu().solve(CMatrix::Identity(nd, nd) - decay);
  return sys.Cd.cast<std::complex<double>>() * inner *
         sys.Bd.cast<std::complex<double>>();
}

Eigen::MatrixXcd kernel_laplace_quadrature(const TimeDelaySystem& sys,
                                           std::complex<double> lambda) {
  const Index n = sys.n();
  if (sys.h == 0.0) return Eigen::MatrixXcd::Zero(n, n);
  // Stack real and imaginary parts so the real quadrature can be reused.
  const Matrix stacked = quad::integrate(
      [&](double theta) {
        const std::complex<double> w = std::exp(lambda * theta);
        const Matrix k = kernel_unchecked(sys, theta);
        Matrix out(2 * n, n);
        out << w.real() * k, w.imag() * k;
        return out;
      },
      -sys.h, 0.0);
  Eigen::MatrixXcd out(n, n);
  out.real() = stacked.topRows(n);
  out.imag() = stacked.bottomRows(n);
  return out;
}

std::complex<double> characteristic_value(const TimeDelaySystem& sys,
                                          std::complex<double> lambda) {
  using CMatrix = Eigen::MatrixXcd;
  require_valid(sys);
  const Index n = sys.n();
  const Index nd = sys.nd();

  const CMatrix m =
      lambda * CMatrix::Identity(nd, nd) + sys.Ad.cast<std::complex<double>>();
  Eigen::JacobiSVD<CMatrix> svd(m);
  const bool nearly_singular = svd.singularValues().minCoeff() < 1e-10;
  const CMatrix kernel = nearly_singular
                             ? kernel_laplace_quadrature(sys, lambda)
                             : kernel_laplace_closed_form(sys, lambda);

  const CMatrix chi = lambda * CMatrix::Identity(n, n) -
                      sys.A0.cast<std::complex<double>>() -
                      std::exp(-lambda * sys.h) *
                          sys.A1.cast<std::complex<double>>() -
                      kernel;
  return chi.determinant();
}

}  // namespace delyap
