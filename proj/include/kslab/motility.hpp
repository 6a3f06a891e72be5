#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kslab {

enum class MotilityFamily { PowerLaw, Exponential, ShiftedPower, Constant, Custom };

std::string to_string(MotilityFamily f);

/// Signal-dependent motility ρ together with its first two derivatives.
///
/// Immutable after construction. Built-in families carry analytic
/// derivatives; custom functions get centered finite differences.
class MotilityFunction {
 public:
  using Fn = std::function<double(double)>;

  MotilityFunction(MotilityFamily family, Fn rho, Fn d1, Fn d2, double parameter = 0.0,
                   std::optional<double> l0 = std::nullopt);

  double operator()(double s) const { return rho_(s); }
  double deriv(double s) const { return d1_(s); }
  double deriv2(double s) const { return d2_(s); }

  MotilityFamily family() const { return family_; }
  /// k for power laws, λ for exponentials, ρ0 for constants.
  double parameter() const { return parameter_; }
  /// Analytic H3 constant l0 = inf ρρ''/ρ'² when known in closed form.
  std::optional<double> l0() const { return l0_; }
  std::string describe() const;

 private:
  MotilityFamily family_;
  Fn rho_, d1_, d2_;
  double parameter_;
  std::optional<double> l0_;
};

/// ρ(s) = s^{-k}; l0 = (k+1)/k.
MotilityFunction make_power_law(double k);
/// ρ(s) = e^{-λ s}; l0 = 1.
MotilityFunction make_exponential(double lambda = 1.0);
/// ρ(s) = (1+s)^{-k}; l0 = (k+1)/k.
MotilityFunction make_shifted_power(double k);
/// ρ ≡ ρ0 (linear problem).
MotilityFunction make_constant(double rho0);
/// User-supplied ρ; derivatives by centered finite differences.
MotilityFunction make_custom(MotilityFunction::Fn rho, std::string name = "custom");

struct HypothesisVerdict {
  bool holds = true;
  /// First grid point where the condition failed.
  std::optional<double> witness;
  std::optional<double> witness_value;
  std::string note;
};

struct HypothesisReport {
  std::string motility;
  double s_min = 0.0, s_max = 0.0;
  int n_dim = 0;
  int samples = 0;
  HypothesisVerdict h0, h1, h2, h3;
  /// Exponent k for which s^k ρ(s) was seen to grow without bound.
  std::optional<double> h2_exponent;
  /// l0 used for H3 (analytic when available, otherwise the grid infimum).
  std::optional<double> l0;
  double l0_required = 0.0;  ///< (n+2)/4
  /// Informational: s ρ(s) is nondecreasing on the grid.
  bool s_rho_nondecreasing = true;

  bool all_hold() const { return h0.holds && h1.holds && h2.holds && h3.holds; }
};

/// Grid-based falsification of (H0)-(H3) on a log-spaced grid over [s_min, s_max].
/// A passing verdict means no violation was found on the grid.
HypothesisReport check_hypotheses(const MotilityFunction& mf, std::pair<double, double> s_range, int n_dim,
                                  int samples = 10000);

struct UpperBound {
  double b = 0.0;
  double k = 0.0;
  double s_b = 0.0;
  double s_max = 0.0;
  /// Largest value of 1/ρ(s) - (b s^k + 1/ρ(s_b)) on the grid (≤ 0 when verified).
  double max_excess = 0.0;
};

/// Smallest grid-verified b with 1/ρ(s) ≤ b s^k + 1/ρ(s_b) on [s_b·1e-3, s_b·1e4]
/// (k defaults to the family parameter, else 1). Throws std::domain_error when
/// ρ decays faster than any power so that no finite b exists.
UpperBound upper_bound_decomposition(const MotilityFunction& mf, double s_b, std::optional<double> k = std::nullopt);

}  // namespace kslab
