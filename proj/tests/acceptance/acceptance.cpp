// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kslab/diagnostics.hpp"
#include "kslab/fractional_time.hpp"
#include "kslab/mittag_leffler.hpp"
#include "kslab/motility.hpp"
#include "kslab/solver.hpp"
#include "kslab/spectral.hpp"
#include "mp_oracle.hpp"

namespace {

using namespace kslab;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

// Ceiling monitors from every nonlinear run, checked together at the end.
struct CeilingLog {
  int runs = 0;
  int checks = 0;
  int violations = 0;
  double worst_ratio = 0.0;
  std::string first;
} g_ceiling;

struct NonlinearRun {
  std::vector<DiagnosticsRecord> records;
  std::vector<double> v_min_steps;  // min v after each step
  SimState final_state;
  double seconds = 0.0;
};

NonlinearRun monitored_run(const SimConfig& cfg, const Field& u0, const std::string& label) {
  NonlinearRun out;
  std::optional<GrowthCeilingMonitor> mon;
  const auto t0 = Clock::now();
  out.records = run(
      cfg, u0,
      [&](const DiagnosticsRecord&, const SimState& s) {
        if (!mon) mon.emplace(s.v, cfg.motility, cfg.beta);
        mon->observe(s.time, s.v);
      },
      [&](const SimState& s) {
        out.v_min_steps.push_back(min_value(s.v));
        if (s.step == cfg.n_steps()) out.final_state = s;
      });
  out.seconds = seconds_since(t0);
  const auto& rep = mon->report();
  ++g_ceiling.runs;
  g_ceiling.checks += rep.checks;
  g_ceiling.worst_ratio = std::max(g_ceiling.worst_ratio, rep.worst_ratio);
  if (rep.violated()) {
    if (g_ceiling.violations == 0)
      g_ceiling.first = fmt("%s t=%g cell %ld", label.c_str(), rep.first_violation->time,
                            static_cast<long>(rep.first_violation->cell));
    ++g_ceiling.violations;
  }
  return out;
}

SimConfig power_law(int dim, int points, double t_end) {
  SimConfig cfg;
  cfg.grid = Grid::uniform(dim, points, 2 * std::numbers::pi);
  cfg.t_end = t_end;
  cfg.dt = std::ldexp(1.0, -8);
  cfg.motility = make_power_law(0.5);
  return cfg;
}

Field cosine_initial(const Grid& g) {
  return sample(g, [&](const auto& x) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += std::cos(x[static_cast<std::size_t>(a)]);
    return 1.0 + 0.5 * s / g.dim();
  });
}

// ---------------------------------------------------------------------------

Verdict mittag_leffler_grid() {
  std::vector<double> zs;
  for (double x : log_grid(1e-3, 50.0, 160)) zs.push_back(-x);
  for (double x : log_grid(1e-3, 5.0, 40)) zs.push_back(x);
  double worst_series = 0.0, worst_asym = 0.0, lib_seconds = 0.0;
  bool ok = true;
  for (double beta : {0.3, 0.5, 0.8}) {
    for (double gamma : {1.0, beta}) {
      kslab::testing::MlOracle oracle(beta, gamma);
      std::vector<double> ref, got(zs.size());
      for (double z : zs) ref.push_back(oracle(z));
      const auto t0 = Clock::now();
      for (std::size_t i = 0; i < zs.size(); ++i) got[i] = mittag_leffler(beta, gamma, zs[i]);
      lib_seconds += seconds_since(t0);
      for (std::size_t i = 0; i < zs.size(); ++i) {
        const double rel = std::abs(got[i] - ref[i]) / std::abs(ref[i]);
        if (oracle.series_regime(zs[i])) {
          worst_series = std::max(worst_series, rel);
          ok = ok && rel <= 1e-8;
        } else {
          worst_asym = std::max(worst_asym, rel);
          ok = ok && rel <= 1e-6;
        }
      }
    }
  }
  double worst_exp = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double z = -50.0 + 55.0 * i / 200;
    worst_exp = std::max(worst_exp, std::abs(mittag_leffler(1.0, 1.0, z) - std::exp(z)) / std::exp(z));
  }
  ok = ok && worst_exp <= 1e-12 && lib_seconds < 5.0;
  return {ok, fmt("series-regime rel err %.2e (tol 1e-8), asymptotic-regime %.2e (tol 1e-6), E_11 vs exp %.2e "
                  "(tol 1e-12), %zu evaluations in %.3f s",
                  worst_series, worst_asym, worst_exp, 6 * zs.size(), lib_seconds)};
}

Verdict scalar_fode() {
  const auto t0 = Clock::now();
  const double beta = 0.5;
  const auto u = solve_linear_fode(1.0, -1.0, beta, TimeGrid(std::ldexp(1.0, -10), 1024));
  // E_{1/2}(-1) = e·erfc(1)
  const double exact = std::exp(1.0) * std::erfc(1.0);
  const double rel = std::abs(u.back() - exact) / exact;
  // convergence of the L1 formula on the smooth profile t²
  std::vector<double> err;
  for (int e = 6; e <= 12; ++e) {
    const int n = 1 << e;
    const double dt = 1.0 / n;
    std::vector<double> s(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) s[static_cast<std::size_t>(j)] = (j * dt) * (j * dt);
    err.push_back(std::abs(caputo_l1(s, beta, dt) - 2.0 / std::tgamma(3.0 - beta)));
  }
  double lo = 1e9, hi = -1e9;
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double order = std::log2(err[i - 1] / err[i]);
    lo = std::min(lo, order);
    hi = std::max(hi, order);
  }
  // the ODE itself, whose solution is not smooth at t = 0
  std::vector<double> ode_err;
  for (int e = 6; e <= 10; ++e)
    ode_err.push_back(std::abs(solve_linear_fode(1.0, -1.0, beta, TimeGrid(std::ldexp(1.0, -e), 1 << e)).back() - exact));
  const double ode_order = std::log2(ode_err[ode_err.size() - 2] / ode_err.back());
  const double secs = seconds_since(t0);
  const bool ok = rel <= 1e-2 && lo >= 2 - beta - 0.25 && hi <= 2 - beta + 0.25 && secs < 10.0;
  return {ok, fmt("u(1) rel err %.2e (tol 1e-2); L1 order on t^2 in [%.3f, %.3f] (need [1.25, 1.75]); ODE order "
                  "%.3f (info); %.2f s",
                  rel, lo, hi, ode_order, secs)};
}

Verdict linear_pde() {
  const auto t0 = Clock::now();
  const double rho0 = 0.8, beta = 0.5;
  SimConfig cfg = power_law(1, 256, 8.0);
  cfg.motility = make_constant(rho0);
  // every mode populated: û_k = 0.1·N·(a + ib)/k with seeded a, b
  const Grid& g = cfg.grid;
  auto spec = forward_transform(Field::constant(g, 1.0));
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto draw = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  for (int k = 1; k <= 128; ++k) {
    std::complex<double> c(draw(), k == 128 ? 0.0 : draw());
    c *= 0.1 * 256 / k;
    spec.coeffs()[k] = c;
    spec.coeffs()[256 - k] = std::conj(c);
  }
  const Field u0 = inverse_transform(spec);
  const Eigen::ArrayXd mu = fractional_symbol(g, cfg.alpha);

  auto mode_error = [&](const SimState& s) {
    const auto sp = forward_transform(s.u);
    const double tb = std::pow(s.time, beta);
    double w = 0.0;
    for (Eigen::Index k = 1; k < mu.size(); ++k) {
      const auto exact = spec.coeffs()[k] * mittag_leffler(beta, 1.0, -rho0 * mu[k] * tb);
      w = std::max(w, std::abs(sp.coeffs()[k] - exact) / std::abs(exact));
    }
    return w;
  };

  std::string detail;
  bool ok = true;
  for (Scheme scheme : {Scheme::DirectL1, Scheme::MildDuhamel}) {
    cfg.scheme = scheme;
    const double tol = scheme == Scheme::DirectL1 ? 1e-2 : 1e-6;
    auto s = init_state(cfg, u0);
    double worst_late = 0.0, worst_all = 0.0, final_err = 0.0;
    int inside_from = 0;
    for (int n = 1; n <= cfg.n_steps(); ++n) {
      advance(s, cfg);
      const double e = mode_error(s);
      worst_all = std::max(worst_all, e);
      if (s.time >= 1.0) worst_late = std::max(worst_late, e);
      if (e > tol) inside_from = n + 1;
      if (n == cfg.n_steps()) final_err = e;
    }
    ok = ok && final_err <= tol;
    detail += fmt("%s: t=8 worst mode rel err %.2e (tol %.0e), worst over t>=1 %.2e, worst over all steps %.2e, "
                  "all modes inside from step %d; ",
                  to_string(scheme).c_str(), final_err, tol, worst_late, worst_all, inside_from);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  return {ok, detail + fmt("%.2f s", secs)};
}

NonlinearRun g_reference;

Verdict conservation_positivity() {
  const SimConfig cfg = power_law(1, 256, 8.0);
  g_reference = monitored_run(cfg, cosine_initial(cfg.grid), "reference N=256");
  const auto& recs = g_reference.records;
  const double m0 = recs.front().mass;
  double drift = 0.0, min_u = recs.front().min_u;
  for (const auto& r : recs) {
    drift = std::max(drift, std::abs(r.mass - m0) / m0);
    min_u = std::min(min_u, r.min_u);
  }
  double early = recs.front().min_v;
  for (int i = 0; i < 10; ++i) early = std::min(early, g_reference.v_min_steps[static_cast<std::size_t>(i)]);
  double min_v = early;
  for (double x : g_reference.v_min_steps) min_v = std::min(min_v, x);
  const bool ok = g_reference.v_min_steps.size() == 2048 && drift <= 1e-12 && min_u >= -1e-8 && min_v >= 0.9 * early &&
                  g_reference.seconds < 60.0;
  return {ok, fmt("%zu steps; mass drift %.2e (tol 1e-12); min u %.6f (>= -1e-8); min v %.6f vs 0.9 x early min "
                  "%.6f; %.2f s",
                  g_reference.v_min_steps.size(), drift, min_u, min_v, 0.9 * early, g_reference.seconds)};
}

Verdict lyapunov_dissipation() {
  const auto& recs = g_reference.records;
  double worst = -1e300;
  for (std::size_t i = 1; i < recs.size(); ++i) worst = std::max(worst, recs[i].lyapunov - recs[i - 1].lyapunov);
  const auto r = check_hypotheses(make_exponential(1.0), {1e-3, 1e3}, 1);
  const bool witness = !r.h1.holds && r.h1.witness && r.h1.witness_value && *r.h1.witness_value < 0.0;
  const bool ok = worst <= 1e-8 && witness;
  return {ok, fmt("E(0)=%.6f E(8)=%.6f, largest per-step change %.2e (slack 1e-8); exp(-s): H1 %s, witness s=%.6f",
                  recs.front().lyapunov, recs.back().lyapunov, worst, r.h1.holds ? "holds" : "fails",
                  r.h1.witness ? *r.h1.witness : std::nan(""))};
}

Verdict key_identity() {
  const auto t0 = Clock::now();
  std::vector<double> res;
  for (int e = 6; e <= 9; ++e) {
    SimConfig cfg = power_law(1, 256, 0.5);
    cfg.dt = std::ldexp(1.0, -e);
    const auto run = monitored_run(cfg, cosine_initial(cfg.grid), fmt("key identity dt=2^-%d", e));
    res.push_back(verify_key_identity(run.final_state, cfg));
  }
  double lo = 1e9;
  std::string orders;
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double o = std::log2(res[i - 1] / res[i]);
    lo = std::min(lo, o);
    orders += fmt("%s%.3f", i > 1 ? ", " : "", o);
  }
  const double need = 2.0 - 0.5 - 0.3;
  return {lo >= need, fmt("residual at t=0.5: %.2e (dt=2^-6) .. %.2e (dt=2^-9); orders %s (need >= %.1f); %.2f s",
                          res.front(), res.back(), orders.c_str(), need, seconds_since(t0))};
}

DecayFit fit_of(const std::vector<DiagnosticsRecord>& recs) {
  std::vector<double> t, y;
  for (const auto& r : recs) {
    t.push_back(r.time);
    y.push_back(r.dist_u + r.dist_v);
  }
  return decay_fit(t, y, 1.0, 0.5);
}

Verdict stabilization() {
  const auto t0 = Clock::now();
  const DecayFit f256 = fit_of(g_reference.records);
  const SimConfig c128 = power_law(1, 128, 8.0);
  const DecayFit f128 = fit_of(monitored_run(c128, cosine_initial(c128.grid), "reference N=128").records);
  const double spread = std::abs(f128.rate - f256.rate) / f256.rate;

  const SimConfig c3 = power_law(3, 32, 1.0);
  const auto smoke = monitored_run(c3, cosine_initial(c3.grid), "3-D smoke");
  int rises = 0;
  for (std::size_t i = 1; i < smoke.records.size(); ++i)
    if (smoke.records[i].dist_u > smoke.records[i - 1].dist_u) ++rises;
  const double secs = seconds_since(t0) + g_reference.seconds;
  const bool ok = f256.rate > 0.0 && f256.r_squared >= 0.99 && spread <= 0.10 && rises == 0 &&
                  smoke.v_min_steps.size() == 256 && secs < 300.0;
  return {ok, fmt("N=256 fit on [1,8]: rate %.4f, r^2 %.4f (need >= 0.99), theta_eff %.4f; N=128 rate %.4f, spread "
                  "%.1f%% (tol 10%%); 32^3 x 256 steps: dist_u %.4f -> %.4f, %d increases; %.1f s",
                  f256.rate, f256.r_squared, f256.theta_eff, f128.rate, 100 * spread, smoke.records.front().dist_u,
                  smoke.records.back().dist_u, rises, secs)};
}

Verdict pointwise_ceiling() {
  const double c = GrowthCeilingMonitor(Field::constant(Grid::uniform(1, 8, 1.0), 1.0), make_power_law(0.5), 0.5)
                       .constant();
  std::string d = fmt("%d runs, %d checks, worst v/ceiling %.4f with C = %.6f", g_ceiling.runs, g_ceiling.checks,
                      g_ceiling.worst_ratio, c);
  if (g_ceiling.violations > 0) d += fmt("; %d violating runs, first %s", g_ceiling.violations, g_ceiling.first.c_str());
  return {g_ceiling.runs >= 6 && g_ceiling.violations == 0, d};
}

Verdict hypothesis_checker() {
  const std::pair<double, double> range{1e-3, 1e3};
  bool ok = true;
  std::string d;
  for (int n = 1; n <= 9; ++n) {
    const auto r = check_hypotheses(make_power_law(0.5), range, n);
    const bool good = r.all_hold() && r.l0 && *r.l0 == 3.0 && *r.l0 > (n + 2) / 4.0;
    ok = ok && good;
    if (!good) d += fmt("power law 0.5 fails at n=%d; ", n);
  }
  d += "k=0.5: H0-H3 hold, l0=3 for n=1..9; ";
  const auto steep = check_hypotheses(make_power_law(1.5), range, 1);
  ok = ok && !steep.h1.holds;
  d += fmt("k=1.5: H1 %s; ", steep.h1.holds ? "holds" : "fails");
  const auto ex = check_hypotheses(make_exponential(1.0), range, 1);
  ok = ok && !ex.h1.holds && !ex.h2.holds;
  d += fmt("exp(-s): H1 %s, H2 %s", ex.h1.holds ? "holds" : "fails", ex.h2.holds ? "holds" : "fails");
  return {ok, d};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> check;
  };
  // Order matters: later checks reuse the reference run and the ceiling log.
  const std::vector<Criterion> criteria = {
      {"mittag-leffler accuracy", mittag_leffler_grid},
      {"scalar fractional ODE", scalar_fode},
      {"linear PDE modes", linear_pde},
      {"conservation and positivity", conservation_positivity},
      {"lyapunov dissipation", lyapunov_dissipation},
      {"key identity residual", key_identity},
      {"exponential stabilization", stabilization},
      {"pointwise growth ceiling", pointwise_ceiling},
      {"hypothesis checker", hypothesis_checker},
  };
  int failed = 0;
  int i = 0;
  for (const auto& c : criteria) {
    ++i;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", i, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
