#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace kslab {

/// Arguments of the two-parameter Mittag-Leffler function E_{β,γ}(z) on the real axis.
struct MlParams {
  double beta = 1.0;   ///< in (0, 2]
  double gamma = 1.0;  ///< > 0
  double z = 0.0;
};

/// Largest |z| accepted by mittag_leffler.
inline constexpr double kMlMaxArgument = 1e6;
/// Maximum number of power-series terms before the series branch gives up.
inline constexpr int kMlSeriesTermBudget = 400;

class MittagLefflerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// E_{β,γ}(z) = Σ_k z^k / Γ(βk + γ) for real z, |z| ≤ kMlMaxArgument.
///
/// Relative accuracy is about 1e-13 for β ∈ (0,1], any γ > 0. Evaluation
/// picks one of three routes:
///  - the power series (compensated, extended precision) while the
///    cancellation factor e^{|z|^{1/β}} stays small;
///  - the algebraic asymptotic expansion -Σ z^{-k}/Γ(γ-βk) (plus the
///    exponential term for z > 0) once its smallest term is negligible;
///  - for z < 0, β < 1 the real-line Laplace inversion
///      E_{β,γ}(-x) = (1/π) ∫_0^∞ e^{-r} r^{β-γ} [r^β sin πγ - x sin π(β-γ)]
///                                 / (r^{2β} + 2x r^β cos πβ + x²) dr,
///    valid for γ < 1 + β; larger γ are reduced with
///    E_{β,γ}(z) = (E_{β,γ-β}(z) - 1/Γ(γ-β)) / z.
///
/// Throws MittagLefflerError for parameters out of range, overflow, or when
/// no route converges (only reachable for β > 1 far out on the negative axis).
double mittag_leffler(const MlParams& p);

inline double mittag_leffler(double beta, double gamma, double z) {
  return mittag_leffler(MlParams{beta, gamma, z});
}

/// Algebraic decay envelope c/(1+|z|) with c = 1 for E_β on the negative axis.
///
/// For β ∈ (0,1] and z ≤ 0, E_β(z) ≤ 1/(1 + |z|/Γ(1+β)) ≤ 1/(1+|z|).
double ml_decay_envelope(double beta, double z);

/// 1/Γ(x), zero at the poles of Γ; finite for all real x.
double reciprocal_gamma(double x);

/// sin(πx) with exact zeros at the integers.
double sin_pi(double x);

namespace ml_detail {

struct SeriesResult {
  double value = 0.0;
  /// Σ|term| / |value|: how many leading digits cancellation cost.
  double cancellation = 0.0;
  int terms = 0;
  bool converged = false;
};

/// Power series in long double with Kahan summation.
SeriesResult series(double beta, double gamma, double z, int term_budget = kMlSeriesTermBudget);

/// Asymptotic expansion; empty when the expansion cannot reach ~1e-16 relative.
std::optional<double> asymptotic(double beta, double gamma, double z);

/// Laplace-inversion integral; requires z < 0, 0 < β < 1, 0 < γ < 1 + β.
double laplace_integral(double beta, double gamma, double z);

}  // namespace ml_detail

}  // namespace kslab
