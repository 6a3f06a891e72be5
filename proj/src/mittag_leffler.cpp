#include "kslab/mittag_leffler.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "kslab/quadrature.hpp"

namespace kslab {

namespace {

constexpr double kPi = std::numbers::pi;
// Beyond this |z|^{1/β} the negative-axis series loses too many digits.
constexpr double kSeriesScaleNegative = 6.0;
// Beyond this the exponential term dominates the positive-axis expansion to
// below double precision.
constexpr double kSeriesScalePositive = 40.0;
constexpr long double kLongEps = std::numeric_limits<long double>::epsilon();

void validate(const MlParams& p) {
  if (!(p.beta > 0.0 && p.beta <= 2.0)) throw MittagLefflerError("mittag_leffler: beta must lie in (0,2]");
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw MittagLefflerError("mittag_leffler: gamma must be > 0");
  if (!std::isfinite(p.z) || std::abs(p.z) > kMlMaxArgument)
    throw MittagLefflerError("mittag_leffler: |z| exceeds " + std::to_string(kMlMaxArgument));
}

/// log|1/Γ(y)| ignoring the sin(πy) factor for y ≤ 0, i.e. an envelope.
double log_rgamma_envelope(double y) {
  if (y > 0.0) return -std::lgamma(y);
  return std::lgamma(1.0 - y) - std::log(kPi);
}

}  // namespace

double sin_pi(double x) {
  double r = std::fmod(x, 2.0);  // (-2, 2)
  if (r > 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  if (r == std::trunc(r)) return 0.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(kPi * r);
}

double reciprocal_gamma(double x) {
  if (x > 0.0) return x < 171.0 ? 1.0 / std::tgamma(x) : std::exp(-std::lgamma(x));
  if (x == std::trunc(x)) return 0.0;
  const double s = sin_pi(x);
  return s * std::exp(std::lgamma(1.0 - x)) / kPi;
}

namespace ml_detail {

SeriesResult series(double beta, double gamma, double z, int term_budget) {
  SeriesResult out;
  if (z == 0.0) {
    out.value = reciprocal_gamma(gamma);
    out.cancellation = 1.0;
    out.converged = true;
    return out;
  }
  const long double logx = std::log(std::abs(static_cast<long double>(z)));
  long double sum = 0.0L, comp = 0.0L, abs_sum = 0.0L;
  long double previous = std::numeric_limits<long double>::infinity();
  for (int k = 0; k < term_budget; ++k) {
    const long double arg = static_cast<long double>(beta) * k + gamma;
    const long double mag = std::exp(k * logx - std::lgamma(arg));
    const long double term = (z < 0.0 && (k % 2)) ? -mag : mag;
    // Kahan-compensated accumulation
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += mag;
    out.terms = k + 1;
    if (mag < previous && mag <= kLongEps * 1e-2L * std::abs(sum) && k > 2) {
      out.converged = true;
      break;
    }
    previous = mag;
  }
  out.value = static_cast<double>(sum);
  out.cancellation = sum != 0.0L ? static_cast<double>(abs_sum / std::abs(sum)) : std::numeric_limits<double>::infinity();
  return out;
}

std::optional<double> asymptotic(double beta, double gamma, double z) {
  const double x = std::abs(z);
  const double logx = std::log(x);
  // Exponential (saddle-point) contributions.
  double expo = 0.0;
  double expo_bound = 0.0;
  if (z > 0.0) {
    const double s = std::pow(x, 1.0 / beta);
    if (s > 700.0) throw MittagLefflerError("mittag_leffler: result overflows double");
    expo = std::pow(x, (1.0 - gamma) / beta) * std::exp(s) / beta;
  } else if (beta > 1.0) {
    const std::complex<double> root = std::polar(std::pow(x, 1.0 / beta), kPi / beta);
    expo = 2.0 / beta * std::real(std::pow(root, 1.0 - gamma) * std::exp(root));
  } else if (beta == 1.0) {
    // Exponentially small e^{-x} term, neglected if it cannot matter.
    expo_bound = std::pow(x, 1.0 - gamma) * std::exp(-x);
  }

  double algebraic = 0.0;
  double prev_env = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 2000; ++k) {
    const double y = gamma - beta * k;
    const double log_env = -k * logx + log_rgamma_envelope(y);
    const double env = std::exp(log_env);
    double term = 0.0;
    if (y > 0.0) {
      term = env;
    } else if (y != std::trunc(y)) {
      term = sin_pi(y) * env;
    }
    // z^{-k} carries the sign of z^k
    if (z < 0.0 && (k % 2)) term = -term;
    algebraic -= term;
    const double scale = std::abs(algebraic + expo);
    if (k > 1 && env <= 1e-17 * scale) {
      if (expo_bound > 1e-17 * scale) return std::nullopt;
      return algebraic + expo;
    }
    if (y < 0.0 && env > prev_env) return std::nullopt;  // diverging before convergence
    prev_env = env;
  }
  return std::nullopt;
}

double laplace_integral(double beta, double gamma, double z) {
  if (!(z < 0.0) || !(beta > 0.0 && beta < 1.0) || !(gamma > 0.0 && gamma < 1.0 + beta))
    throw MittagLefflerError("laplace_integral: requires z < 0, beta in (0,1), gamma in (0, 1+beta)");
  const double x = -z;
  const double s_gamma = sin_pi(gamma);
  const double s_shift = sin_pi(beta - gamma);
  const double c_beta = std::cos(kPi * beta);
  const double inv_beta = 1.0 / beta;
  const double power = (1.0 - gamma) / beta;
  // Substituted r = u^{1/β}; the kernel peaks near u = x.
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double decay = std::exp(-std::pow(u, inv_beta));
    if (decay == 0.0) return 0.0;
    const double num = u * s_gamma - x * s_shift;
    const double den = u * u + 2.0 * x * u * c_beta + x * x;
    return decay * std::pow(u, power) * num / den;
  };
  const auto head = quadrature::tanh_sinh(integrand, 0.0, x);
  const auto tail = quadrature::exp_sinh(integrand, x);
  return (head.value + tail.value) / (kPi * beta);
}

}  // namespace ml_detail

double mittag_leffler(const MlParams& p) {
  validate(p);
  const double beta = p.beta, gamma = p.gamma, z = p.z;
  if (z == 0.0) return reciprocal_gamma(gamma);
  if (beta == 1.0 && gamma == 1.0) return std::exp(z);

  const double x = std::abs(z);
  const double scale = std::pow(x, 1.0 / beta);

  if (z > 0.0) {
    if (scale < kSeriesScalePositive) {
      const auto s = ml_detail::series(beta, gamma, z);
      if (s.converged) return s.value;
    }
    if (auto a = ml_detail::asymptotic(beta, gamma, z)) return *a;
    throw MittagLefflerError("mittag_leffler: no convergent evaluation for z > 0");
  }

  if (scale <= kSeriesScaleNegative) {
    const auto s = ml_detail::series(beta, gamma, z);
    if (s.converged && s.cancellation * 1e-19 < 1e-14) return s.value;
  }
  if (auto a = ml_detail::asymptotic(beta, gamma, z)) return *a;
  if (beta < 1.0) {
    if (gamma < 1.0 + beta) return ml_detail::laplace_integral(beta, gamma, z);
    return (mittag_leffler(beta, gamma - beta, z) - reciprocal_gamma(gamma - beta)) / z;
  }
  const auto s = ml_detail::series(beta, gamma, z, 4 * kMlSeriesTermBudget);
  if (s.converged && s.cancellation * 1e-19 < 1e-11) return s.value;
  throw MittagLefflerError("mittag_leffler: series did not converge within the term budget (beta=" +
                           std::to_string(beta) + ", z=" + std::to_string(z) + ")");
}

double ml_decay_envelope(double beta, double z) {
  if (!(beta > 0.0 && beta <= 1.0)) throw MittagLefflerError("ml_decay_envelope: beta must lie in (0,1]");
  if (z > 0.0) throw MittagLefflerError("ml_decay_envelope: z must be <= 0");
  return 1.0 / (1.0 + std::abs(z));
}

}  // namespace kslab
