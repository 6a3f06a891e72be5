#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace kslab::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int levels = 0;
};

/// Double-exponential (tanh-sinh) rule on [a, b]. Tolerates integrable
/// algebraic endpoint singularities; the integrand is never evaluated at the
/// endpoints themselves.
template <typename Fn>
Result tanh_sinh(Fn&& f, double a, double b, double rel_tol = 1e-14, int max_levels = 10) {
  const double half = 0.5 * (b - a);
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTmax = 6.5;
  // Abscissa offset from the nearer endpoint is computed directly so that
  // points crowding an endpoint keep full relative precision.
  auto node = [&](double t, double& weight) {
    const double s = kHalfPi * std::sinh(t);
    const double e = std::exp(-2.0 * std::abs(s));
    const double gap = 2.0 * half * e / (1.0 + e);  // distance to nearer endpoint
    const double ch = std::cosh(s);
    weight = half * kHalfPi * std::cosh(t) / (ch * ch);
    return t < 0 ? a + gap : b - gap;
  };
  auto pair = [&](double t) {
    double w;
    const double xp = node(t, w);
    const double xm = node(-t, w);
    if (w == 0.0) return 0.0;
    // Each side is dropped on its own once it rounds onto its endpoint.
    double acc = 0.0;
    if (xp != b) acc += f(xp);
    if (xm != a) acc += f(xm);
    return w * acc;
  };
  double h = 1.0;
  double w0 = 0.0;
  double sum = f(node(0.0, w0)) * w0;
  for (double t = h; t <= kTmax; t += h) sum += pair(t);
  double estimate = sum * h;
  Result r{estimate, std::numeric_limits<double>::infinity(), 0};
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    for (double t = h; t <= kTmax; t += 2.0 * h) sum += pair(t);
    const double next = sum * h;
    r = Result{next, std::abs(next - estimate), level};
    if (level >= 3 && r.error <= rel_tol * std::abs(next)) break;
    estimate = next;
  }
  return r;
}

/// Double-exponential (exp-sinh) rule on [a, ∞) for integrands that decay at
/// least exponentially.
template <typename Fn>
Result exp_sinh(Fn&& f, double a, double rel_tol = 1e-14, int max_levels = 10) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTmin = -4.5;
  constexpr double kTmax = 3.5;
  auto term = [&](double t) {
    const double e = std::exp(kHalfPi * std::sinh(t));
    const double w = kHalfPi * std::cosh(t) * e;
    const double v = f(a + e);
    return v == 0.0 ? 0.0 : w * v;
  };
  double h = 0.5;
  double sum = 0.0;
  for (double t = kTmin; t <= kTmax; t += h) sum += term(t);
  double estimate = sum * h;
  Result r{estimate, std::numeric_limits<double>::infinity(), 0};
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    for (double t = kTmin + h; t <= kTmax; t += 2.0 * h) sum += term(t);
    const double next = sum * h;
    r = Result{next, std::abs(next - estimate), level};
    if (level >= 3 && r.error <= rel_tol * std::abs(next)) break;
    estimate = next;
  }
  return r;
}

}  // namespace kslab::quadrature
