#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace kslab {

/// Uniform time grid t_n = n·dt, n = 0..n_steps.
struct TimeGrid {
  double dt = 0.0;
  int n_steps = 0;

  TimeGrid(double dt_, int n_steps_);
  double time(int n) const { return n * dt; }
};

/// L1 quadrature weights b_j = (j+1)^{1-β} - j^{1-β}, j = 0..n-1, for the
/// Caputo derivative of order β ∈ (0,1).
class L1Weights {
 public:
  L1Weights(double beta, int n);

  double beta() const { return beta_; }
  int size() const { return static_cast<int>(b_.size()); }
  double operator[](int j) const { return b_[static_cast<std::size_t>(j)]; }
  std::span<const double> values() const { return b_; }

  /// Grows the table to at least n weights.
  void extend(int n);

 private:
  double beta_;
  std::vector<double> b_;
};

/// Γ(2-β)·dt^β, the factor that turns an L1 difference sum into Caputo units.
double l1_scale(double beta, double dt);

/// L1 approximation of the Caputo derivative ∂^β u at the last sample,
/// (dt^{-β}/Γ(2-β)) Σ_j b_j (u_{n-j} - u_{n-j-1}).
double caputo_l1(std::span<const double> samples, double beta, double dt);

/// Product-rectangle (left point) quadrature of the Riemann-Liouville integral
/// J^β u(t_n) = (1/Γ(β)) ∫_0^{t_n} (t_n - s)^{β-1} u(s) ds at every grid time.
std::vector<double> fractional_integral(std::span<const double> samples, double beta, double dt);

/// Implicit L1 solution of ∂^β u = w u, u(0) = u0, on the time grid; returns
/// n_steps + 1 values.
std::vector<double> solve_linear_fode(double u0, double w, double beta, const TimeGrid& tg);

/// Fractional Grönwall ceiling u0 + J^β f for f ≥ 0.
std::vector<double> gronwall_envelope(double u0, std::span<const double> f, double beta, double dt);

}  // namespace kslab
