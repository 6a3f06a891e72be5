#include "kslab/motility.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kslab {

std::string to_string(MotilityFamily f) {
  switch (f) {
    case MotilityFamily::PowerLaw: return "power_law";
    case MotilityFamily::Exponential: return "exponential";
    case MotilityFamily::ShiftedPower: return "shifted_power";
    case MotilityFamily::Constant: return "constant";
    case MotilityFamily::Custom: return "custom";
  }
  return "unknown";
}

MotilityFunction::MotilityFunction(MotilityFamily family, Fn rho, Fn d1, Fn d2, double parameter,
                                   std::optional<double> l0)
    : family_(family), rho_(std::move(rho)), d1_(std::move(d1)), d2_(std::move(d2)), parameter_(parameter), l0_(l0) {}

std::string MotilityFunction::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  switch (family_) {
    case MotilityFamily::PowerLaw:
    case MotilityFamily::ShiftedPower: os << "(k=" << parameter_ << ")"; break;
    case MotilityFamily::Exponential: os << "(lambda=" << parameter_ << ")"; break;
    case MotilityFamily::Constant: os << "(rho0=" << parameter_ << ")"; break;
    case MotilityFamily::Custom: break;
  }
  return os.str();
}

MotilityFunction make_power_law(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("power law exponent k must be > 0");
  return MotilityFunction(
      MotilityFamily::PowerLaw, [k](double s) { return std::pow(s, -k); },
      [k](double s) { return -k * std::pow(s, -k - 1.0); },
      [k](double s) { return k * (k + 1.0) * std::pow(s, -k - 2.0); }, k, (k + 1.0) / k);
}

MotilityFunction make_exponential(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("exponential rate lambda must be > 0");
  return MotilityFunction(
      MotilityFamily::Exponential, [lambda](double s) { return std::exp(-lambda * s); },
      [lambda](double s) { return -lambda * std::exp(-lambda * s); },
      [lambda](double s) { return lambda * lambda * std::exp(-lambda * s); }, lambda, 1.0);
}

MotilityFunction make_shifted_power(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("shifted power exponent k must be > 0");
  return MotilityFunction(
      MotilityFamily::ShiftedPower, [k](double s) { return std::pow(1.0 + s, -k); },
      [k](double s) { return -k * std::pow(1.0 + s, -k - 1.0); },
      [k](double s) { return k * (k + 1.0) * std::pow(1.0 + s, -k - 2.0); }, k, (k + 1.0) / k);
}

MotilityFunction make_constant(double rho0) {
  if (!(rho0 > 0.0)) throw std::invalid_argument("constant motility must be > 0");
  return MotilityFunction(
      MotilityFamily::Constant, [rho0](double) { return rho0; }, [](double) { return 0.0; },
      [](double) { return 0.0; }, rho0, std::nullopt);
}

MotilityFunction make_custom(MotilityFunction::Fn rho, std::string name) {
  (void)name;
  auto d1 = [rho](double s) {
    const double h = 1e-5 * std::max(std::abs(s), 1e-3);
    return (rho(s + h) - rho(s - h)) / (2.0 * h);
  };
  auto d2 = [rho](double s) {
    const double h = 1e-4 * std::max(std::abs(s), 1e-3);
    return (rho(s + h) - 2.0 * rho(s) + rho(s - h)) / (h * h);
  };
  return MotilityFunction(MotilityFamily::Custom, rho, d1, d2);
}

namespace {

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> s(static_cast<std::size_t>(n));
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
  s.front() = a;
  s.back() = b;
  return s;
}

void fail(HypothesisVerdict& v, double s, double value) {
  if (!v.holds) return;
  v.holds = false;
  v.witness = s;
  v.witness_value = value;
}

}  // namespace

HypothesisReport check_hypotheses(const MotilityFunction& mf, std::pair<double, double> s_range, int n_dim,
                                  int samples) {
  const auto [s_min, s_max] = s_range;
  if (!(s_min > 0.0 && s_max > s_min)) throw std::invalid_argument("check_hypotheses: need 0 < s_min < s_max");
  if (n_dim < 1) throw std::invalid_argument("check_hypotheses: n_dim must be >= 1");
  if (samples < 16) throw std::invalid_argument("check_hypotheses: too few samples");

  HypothesisReport r;
  r.motility = mf.describe();
  r.s_min = s_min;
  r.s_max = s_max;
  r.n_dim = n_dim;
  r.samples = samples;
  r.l0_required = (n_dim + 2) / 4.0;

  const auto grid = log_grid(s_min, s_max, samples);
  std::vector<double> rho(grid.size()), d1(grid.size()), d2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rho[i] = mf(grid[i]);
    d1[i] = mf.deriv(grid[i]);
    d2[i] = mf.deriv2(grid[i]);
    if (!std::isfinite(rho[i]) || !std::isfinite(d1[i]) || !std::isfinite(d2[i])) {
      std::ostringstream os;
      os << "check_hypotheses: motility evaluation failed at s=" << grid[i];
      throw std::domain_error(os.str());
    }
  }

  // (H0) ρ > 0, ρ' ≤ 0
  // A zero reached after values already below 1e-290 is underflow of a
  // positive function, not a zero of ρ.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool underflow = rho[i] == 0.0 && i > 0 && rho[i - 1] >= 0.0 && rho[i - 1] < 1e-290;
    if (!(rho[i] > 0.0) && !underflow) fail(r.h0, grid[i], rho[i]);
    if (d1[i] > 1e-12) fail(r.h0, grid[i], d1[i]);
  }

  // (H1) ρ + sρ' ≥ 0
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = rho[i], b = grid[i] * d1[i];
    const double value = a + b;
    if (value < -1e-12 * (std::abs(a) + std::abs(b))) fail(r.h1, grid[i], value);
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double sr = grid[i] * rho[i];
    if (sr < prev * (1.0 - 1e-12)) r.s_rho_nondecreasing = false;
    prev = std::max(prev, sr);
  }

  // (H2) s^k ρ(s) → ∞ for some probe exponent k. Heuristic: grows by 1e3 over
  // the range and is nondecreasing on the final decade.
  static constexpr double kProbes[] = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  const double tail_start = std::max(s_min, s_max / 10.0);
  r.h2.holds = false;
  for (double k : kProbes) {
    std::vector<double> lg(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) lg[i] = k * std::log(grid[i]) + std::log(rho[i]);
    double best = lg[0];
    bool tail_monotone = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      best = std::max(best, lg[i]);
      if (grid[i] > tail_start && lg[i] < lg[i - 1] - 1e-12) tail_monotone = false;
    }
    if (best - lg[0] >= std::log(1e3) && tail_monotone) {
      r.h2.holds = true;
      r.h2_exponent = k;
      break;
    }
  }
  if (!r.h2.holds) r.h2.note = "s^k rho(s) not seen to grow without bound for any probe k in {0.5,...,16}";

  // (H3) l0 |ρ'|² ≤ ρ ρ'' with l0 > (n+2)/4
  std::optional<double> l0 = mf.l0();
  if (!l0) {
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (d1[i] != 0.0) inf = std::min(inf, rho[i] * d2[i] / (d1[i] * d1[i]));
    if (std::isfinite(inf)) l0 = inf;
  }
  r.l0 = l0;
  if (l0) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double lhs = *l0 * d1[i] * d1[i];
      const double rhs = rho[i] * d2[i];
      if (lhs > rhs + 1e-10 * std::abs(rhs)) fail(r.h3, grid[i], rhs - lhs);
    }
    if (r.h3.holds && !(*l0 > r.l0_required)) {
      r.h3.holds = false;
      std::ostringstream os;
      os << "l0=" << *l0 << " does not exceed (n+2)/4=" << r.l0_required;
      r.h3.note = os.str();
    }
  } else {
    r.h3.note = "rho' vanishes on the grid; inequality holds for every l0";
  }
  return r;
}

UpperBound upper_bound_decomposition(const MotilityFunction& mf, double s_b, std::optional<double> k) {
  if (!(s_b > 0.0)) throw std::invalid_argument("upper_bound_decomposition: s_b must be > 0");
  double exponent = 1.0;
  if (k) {
    exponent = *k;
  } else if (mf.family() == MotilityFamily::PowerLaw || mf.family() == MotilityFamily::ShiftedPower) {
    exponent = mf.parameter();
  }
  if (!(exponent > 0.0)) throw std::invalid_argument("upper_bound_decomposition: k must be > 0");

  UpperBound out;
  out.k = exponent;
  out.s_b = s_b;
  out.s_max = s_b * 1e4;
  const double base = 1.0 / mf(s_b);
  if (!std::isfinite(base)) throw std::domain_error("upper_bound_decomposition: 1/rho(s_b) is not finite");

  // Below s_b monotonicity alone must do the work.
  for (double s : log_grid(s_b * 1e-3, s_b, 1000)) {
    const double inv = 1.0 / mf(s);
    out.max_excess = std::max(out.max_excess, inv - base);
  }

  const auto grid = log_grid(s_b, out.s_max, 4001);
  std::vector<double> need(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double inv = 1.0 / mf(grid[i]);
    need[i] = (inv - base) / std::pow(grid[i], exponent);
    if (!std::isfinite(need[i]))
      throw std::domain_error("upper_bound_decomposition: no finite b (rho decays faster than s^-k)");
    out.b = std::max(out.b, need[i]);
  }
  // Still growing over the final decade: no polynomial bound.
  const double last = need.back();
  const double decade_back = need[need.size() - 1 - 1000];
  if (last > 2.0 * decade_back && last > 1e-12)
    throw std::domain_error("upper_bound_decomposition: required b still growing; rho violates (H2) for this k");

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double inv = 1.0 / mf(grid[i]);
    out.max_excess = std::max(out.max_excess, inv - (out.b * std::pow(grid[i], exponent) + base));
  }
  return out;
}

}  // namespace kslab
