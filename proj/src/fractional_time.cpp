#include "kslab/fractional_time.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kslab {

namespace {

void require_beta_open(double beta, const char* who) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument(std::string(who) + ": beta must lie in (0,1)");
}

}  // namespace

TimeGrid::TimeGrid(double dt_, int n_steps_) : dt(dt_), n_steps(n_steps_) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

L1Weights::L1Weights(double beta, int n) : beta_(beta) {
  require_beta_open(beta, "l1_weights");
  if (n < 1) throw std::invalid_argument("l1_weights: n must be >= 1");
  extend(n);
}

void L1Weights::extend(int n) {
  const double e = 1.0 - beta_;
  b_.reserve(static_cast<std::size_t>(n));
  for (int j = size(); j < n; ++j) {
    // (j+1)^e - j^e written as j^e·expm1(e·log1p(1/j)) to avoid cancellation at large j
    const double bj = j == 0 ? 1.0 : std::pow(static_cast<double>(j), e) * std::expm1(e * std::log1p(1.0 / j));
    b_.push_back(bj);
  }
}

double l1_scale(double beta, double dt) { return std::tgamma(2.0 - beta) * std::pow(dt, beta); }

double caputo_l1(std::span<const double> samples, double beta, double dt) {
  require_beta_open(beta, "caputo_l1");
  if (samples.size() < 2) throw std::invalid_argument("caputo_l1: needs at least 2 samples");
  const int n = static_cast<int>(samples.size()) - 1;
  const L1Weights b(beta, n);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += b[j] * (samples[static_cast<std::size_t>(n - j)] - samples[static_cast<std::size_t>(n - j - 1)]);
  return acc / l1_scale(beta, dt);
}

std::vector<double> fractional_integral(std::span<const double> samples, double beta, double dt) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("fractional_integral: beta must lie in (0,1]");
  const std::size_t n = samples.size();
  // c_m = ∫ over the m-th interval back from t_n of the kernel, m = 1..n
  std::vector<double> c(n + 1, 0.0);
  const double scale = std::pow(dt, beta) / std::tgamma(beta + 1.0);
  for (std::size_t m = 1; m <= n; ++m)
    c[m] = scale * (std::pow(static_cast<double>(m), beta) - std::pow(static_cast<double>(m - 1), beta));
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += c[i - j] * samples[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> solve_linear_fode(double u0, double w, double beta, const TimeGrid& tg) {
  require_beta_open(beta, "solve_linear_fode");
  const double a = l1_scale(beta, tg.dt);
  const double denom = 1.0 - w * a;
  if (!(denom > 0.0))
    throw std::domain_error("solve_linear_fode: implicit step not solvable (1 - w*Gamma(2-beta)*dt^beta <= 0)");
  const L1Weights b(beta, tg.n_steps);
  std::vector<double> u(static_cast<std::size_t>(tg.n_steps) + 1, 0.0);
  std::vector<double> d(u.size(), 0.0);  // increments u_m - u_{m-1}
  u[0] = u0;
  for (int n = 1; n <= tg.n_steps; ++n) {
    double history = 0.0;
    for (int j = 1; j < n; ++j) history += b[j] * d[static_cast<std::size_t>(n - j)];
    const auto un = static_cast<std::size_t>(n);
    u[un] = (u[un - 1] - history) / denom;
    d[un] = u[un] - u[un - 1];
  }
  return u;
}

std::vector<double> gronwall_envelope(double u0, std::span<const double> f, double beta, double dt) {
  for (double v : f)
    if (v < 0.0) throw std::invalid_argument("gronwall_envelope: f must be nonnegative");
  auto out = fractional_integral(f, beta, dt);
  for (auto& v : out) v += u0;
  return out;
}

}  // namespace kslab
