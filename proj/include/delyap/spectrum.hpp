#pragma once

// Existence/uniqueness diagnostic for the boundary problem.
//
// A unique delay Lyapunov matrix exists iff no characteristic root λ has
// its mirror -λ also a root. That holds iff G = F1 + F2 e^{Eh} is
// nonsingular, which is what check() measures. characteristic_value() is
// provided for spot checks only; no root finding is attempted.

#include <complex>
#include <string_view>

#include "delyap/matcore.hpp"
#include "delyap/model.hpp"

namespace delyap {

struct OdecOperator;

enum class SpectrumVerdict { satisfied, borderline, violated };

std::string_view to_string(SpectrumVerdict verdict);

/// Bounds on sigma_min(G) / max|G_ij|.
struct SpectrumThresholds {
  double violated = 1e-12;
  double borderline = 1e-8;
};

struct SpectrumReport {
  double sigma_min = 0.0;
  double sigma_min_relative = 0.0;
  SpectrumVerdict verdict = SpectrumVerdict::violated;
  SpectrumThresholds thresholds;
  Index ns = 0;
};

SpectrumVerdict classify(double sigma_min_relative,
                         const SpectrumThresholds& thresholds);

SpectrumReport check(const OdecOperator& op,
                     const SpectrumThresholds& thresholds = {});

/// det(λI - A0 - e^{-λh} A1 - ∫_{-h}^{0} e^{λθ} A_D(θ) dθ).
///
/// The kernel integral is Cd M⁻¹ (I - e^{-Mh}) Bd with M = λI + Ad; when
/// M is nearly singular (sigma_min < 1e-10) the integral is done by
/// quadrature instead.
std::complex<double> characteristic_value(const TimeDelaySystem& sys,
                                          std::complex<double> lambda);

/// Quadrature of ∫_{-h}^{0} e^{λθ} A_D(θ) dθ, real and imaginary parts.
Eigen::MatrixXcd kernel_laplace_quadrature(const TimeDelaySystem& sys,
                                           std::complex<double> lambda);

/// Closed form of the same integral. Requires M = λI + Ad invertible.
Eigen::MatrixXcd kernel_laplace_closed_form(const TimeDelaySystem& sys,
                                            std::complex<double> lambda);

}  // namespace delyap
