#include "kslab/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "kslab/spectral.hpp"

namespace kslab {

double lyapunov(const Field& v, double alpha) {
  require_alpha(alpha);
  const auto spec = forward_transform(v);
  const Eigen::ArrayXd weight = 1.0 + fractional_symbol(v.grid(), alpha);
  const double sum = (weight * spec.coeffs().array().abs2()).sum();
  return sum * v.grid().cell_volume() / static_cast<double>(v.size());
}

LpNorms lp_norms(const Field& f) {
  const double h = f.grid().cell_volume();
  const Eigen::ArrayXd a = f.values().array().abs();
  LpNorms n;
  n.l1 = a.sum() * h;
  n.l2 = std::sqrt(a.square().sum() * h);
  n.l4 = std::pow(a.square().square().sum() * h, 0.25);
  n.linf = a.maxCoeff();
  return n;
}

double weighted_energy(const Field& u, const Field& v, const MotilityFunction& mf, double p, double q) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("weighted_energy: grid mismatch");
  if (!(p > 0.0 && q > 0.0)) throw std::invalid_argument("weighted_energy: p and q must be > 0");
  double acc = 0.0;
  for (Eigen::Index c = 0; c < u.size(); ++c) {
    if (!(v[c] > 0.0)) throw std::domain_error("weighted_energy: nonpositive v at cell " + std::to_string(c));
    const double uc = std::max(u[c], 0.0);
    acc += std::pow(uc, p + 1.0) * std::pow(mf(v[c]), q);
  }
  return acc * u.grid().cell_volume();
}

std::pair<double, double> stationary_distance(const Field& u, const Field& v, double ubar0) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("stationary_distance: grid mismatch");
  const double du = (u.values().array() - ubar0).abs().maxCoeff();
  const double dv = (v.values().array() - ubar0).abs().maxCoeff();
  Eigen::ArrayXd grad2 = Eigen::ArrayXd::Zero(v.size());
  for (const auto& g : gradient(v)) grad2 += g.values().array().square();
  return {du, dv + std::sqrt(grad2.maxCoeff())};
}

DecayFit decay_fit(std::span<const double> times, std::span<const double> values, double t_min, double beta) {
  if (times.size() != values.size()) throw std::invalid_argument("decay_fit: times and values differ in length");
  std::vector<double> t, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min) continue;
    if (!(values[i] > 0.0)) throw std::domain_error("decay_fit: values must be positive");
    t.push_back(times[i]);
    y.push_back(std::log(values[i]));
  }
  if (t.size() < 8) throw std::invalid_argument("decay_fit: need at least 8 samples with t >= t_min");

  Eigen::Map<const Eigen::ArrayXd> T(t.data(), static_cast<Eigen::Index>(t.size()));
  Eigen::Map<const Eigen::ArrayXd> Y(y.data(), static_cast<Eigen::Index>(y.size()));
  const double tm = T.mean(), ym = Y.mean();
  const double stt = (T - tm).square().sum();
  const double sty = ((T - tm) * (Y - ym)).sum();
  const double syy = (Y - ym).square().sum();

  DecayFit fit;
  fit.t_min = t_min;
  fit.samples = static_cast<int>(t.size());
  if (syy <= 1e-28 * std::max(1.0, ym * ym) * static_cast<double>(t.size())) {
    fit.flat = true;
    fit.C = std::exp(ym);
    return fit;
  }
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  const double ss_res = (Y - (intercept + slope * T)).square().sum();
  fit.rate = -slope;
  fit.C = std::exp(intercept);
  fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  fit.theta_eff = fit.rate > 0.0 ? std::pow(fit.rate, beta) : 0.0;
  return fit;
}

GrowthCeilingMonitor::GrowthCeilingMonitor(Field v0, const MotilityFunction& mf, double beta, double slack)
    : v0_(std::move(v0)), mf_(mf), beta_(beta), constant_((1.0 + slack) / beta), floor_(min_value(v0_)) {}

void GrowthCeilingMonitor::observe(double time, const Field& v) {
  if (!(v.grid() == v0_.grid())) throw std::invalid_argument("growth ceiling: grid mismatch");
  floor_ = std::min(floor_, min_value(v));
  const double growth = std::exp(std::pow(mf_(floor_), 1.0 / beta_) * time);
  ++report_.checks;
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    const double ceiling = constant_ * v0_[c] * growth;
    report_.worst_ratio = std::max(report_.worst_ratio, v[c] / ceiling);
    if (v[c] > ceiling && !report_.first_violation) report_.first_violation = CeilingViolation{time, c, v[c], ceiling};
  }
}

CeilingReport pointwise_growth_ceiling(std::span<const Field> v_series, const Field& v0, const MotilityFunction& mf,
                                       double beta, std::span<const double> times) {
  if (v_series.size() != times.size()) throw std::invalid_argument("growth ceiling: series and times differ in length");
  GrowthCeilingMonitor monitor(v0, mf, beta);
  for (std::size_t i = 0; i < times.size(); ++i) monitor.observe(times[i], v_series[i]);
  return monitor.report();
}

DiagnosticsRecord make_record(double time, const Field& u, const Field& v, double ubar0, const MotilityFunction& mf,
                              const RecordOptions& opts) {
  DiagnosticsRecord r;
  r.time = time;
  r.mass = mass(u);
  r.min_u = min_value(u);
  r.min_v = min_value(v);
  r.max_v = max_value(v);
  r.lyapunov = lyapunov(v, opts.alpha);
  const auto n = lp_norms(u);
  r.l1 = n.l1;
  r.l2 = n.l2;
  r.l4 = n.l4;
  r.linf = n.linf;
  r.weighted_energy = weighted_energy(u, v, mf, opts.weighted_p, opts.weighted_q);
  std::tie(r.dist_u, r.dist_v) = stationary_distance(u, v, ubar0);
  return r;
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {"time", "mass",  "min_u", "min_v", "max_v",           "lyapunov", "l1",
                                                "l2",   "l4",    "linf",  "weighted_energy", "dist_u",   "dist_v"};
  return cols;
}

namespace {

std::string format17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("records.csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

}  // namespace

void write_records_csv(std::ostream& os, std::span<const DiagnosticsRecord> records) {
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : records) {
    const double row[] = {r.time, r.mass, r.min_u, r.min_v, r.max_v, r.lyapunov, r.l1,
                          r.l2,   r.l4,   r.linf,  r.weighted_energy, r.dist_u, r.dist_v};
    for (std::size_t i = 0; i < std::size(row); ++i) os << (i ? "," : "") << format17(row[i]);
    os << '\n';
  }
}

std::vector<DiagnosticsRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("records.csv: empty input");
  std::string expected;
  for (const auto& c : record_columns()) expected += (expected.empty() ? "" : ",") + c;
  if (line != expected) throw std::runtime_error("records.csv: unexpected header '" + line + "'");
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      v.push_back(parse_double(std::string_view(line).substr(start, comma - start), lineno));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (v.size() != record_columns().size())
      throw std::runtime_error("records.csv line " + std::to_string(lineno) + ": wrong column count");
    out.push_back(DiagnosticsRecord{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12]});
  }
  return out;
}

}  // namespace kslab
