#include "kslab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kslab/fractional_time.hpp"
#include "kslab/mittag_leffler.hpp"

namespace kslab {

std::string to_string(Scheme s) { return s == Scheme::DirectL1 ? "direct-l1" : "mild-duhamel"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "direct-l1") return Scheme::DirectL1;
  if (name == "mild-duhamel") return Scheme::MildDuhamel;
  throw std::invalid_argument("scheme must be direct-l1 or mild-duhamel, got '" + name + "'");
}

int SimConfig::n_steps() const { return std::max(1, static_cast<int>(std::lround(t_end / dt))); }

void SimConfig::validate() const {
  require_alpha(alpha);
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  if (grid.dim() < 1) throw std::invalid_argument("grid is empty");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be > 0");
  if (t_end < dt) throw std::invalid_argument("t_end must be at least dt");
  if (picard_iters < 0) throw std::invalid_argument("picard_iters must be >= 0");
  if (!(negativity_tolerance >= 0.0)) throw std::invalid_argument("negativity_tolerance must be >= 0");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (!(weighted_p > 0.0 && weighted_q > 0.0)) throw std::invalid_argument("weighted energy exponents must be > 0");
}

double explicit_stability_number(const SimConfig& cfg, double v_floor) {
  const double mu_max = fractional_symbol(cfg.grid, cfg.alpha).maxCoeff();
  return l1_scale(cfg.beta, cfg.dt) * cfg.motility(v_floor) * mu_max;
}

namespace {

std::string abort_message(const std::string& reason, int step, double time) {
  std::ostringstream os;
  os << reason << " (step " << step << ", t=" << time << ")";
  return os.str();
}

}  // namespace

SimulationAbort::SimulationAbort(const std::string& reason, int step, double time)
    : std::runtime_error(abort_message(reason, step, time)), reason_(reason), step_(step), time_(time) {}

namespace solver_detail {

struct Workspace {
  Grid grid;
  Eigen::ArrayXd mu;
  Eigen::ArrayXd resolvent;
  double a = 0.0;
  L1Weights weights;
  /// Σ u^0, pinned as the zero mode of every step.
  double zero_mode = 0.0;

  // mild scheme
  double rho0 = 0.0;
  Eigen::VectorXcd w0_hat;
  std::vector<Eigen::Index> group;  ///< mode -> index of its distinct symbol
  Eigen::ArrayXd group_lambda;
  Eigen::MatrixXd ml;  ///< (group, m) -> E_β(-λ (m dt)^β)
  Eigen::MatrixXd kernel;  ///< (group, m) -> W(m), column 0 unused
  std::vector<Eigen::VectorXcd> residuals;

  Workspace(const SimConfig& cfg) : grid(cfg.grid), weights(cfg.beta, 1) {}
};

}  // namespace solver_detail

namespace {

using solver_detail::Workspace;

Eigen::VectorXcd fwd(const Grid& grid, const Eigen::VectorXd& f) {
  Eigen::VectorXcd c = f.cast<std::complex<double>>();
  detail::transform_axes<double>(grid, c, false);
  return c;
}

Eigen::VectorXd inv(const Grid& grid, Eigen::VectorXcd c) {
  detail::transform_axes<double>(grid, c, true);
  return c.real();
}

Eigen::VectorXd rho_of(const MotilityFunction& mf, const Eigen::VectorXd& v) {
  return v.unaryExpr([&mf](double s) { return mf(s); });
}

/// Groups modes with equal symbol (up to rounding) so the Mittag-Leffler
/// tables are evaluated once per distinct value.
void build_groups(Workspace& ws) {
  const Eigen::Index n = ws.mu.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return ws.mu[i] < ws.mu[j]; });
  ws.group.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> values;
  for (Eigen::Index i : order) {
    const double m = ws.mu[i];
    if (values.empty() || m > values.back() * (1.0 + 1e-12) + 1e-300) values.push_back(m);
    ws.group[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(values.size()) - 1;
  }
  ws.group_lambda = Eigen::Map<Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size())) * ws.rho0;
}

void ensure_ml_columns(Workspace& ws, const SimConfig& cfg, int m_needed) {
  const Eigen::Index have = ws.ml.cols();
  if (have > m_needed) return;
  const Eigen::Index cols = std::max<Eigen::Index>(m_needed + 1, std::min<Eigen::Index>(2 * have, cfg.n_steps() + 1));
  const Eigen::Index groups = ws.group_lambda.size();
  ws.ml.conservativeResize(groups, cols);
  ws.kernel.conservativeResize(groups, cols);
  for (Eigen::Index m = have; m < cols; ++m) {
    const double tb = std::pow(static_cast<double>(m) * cfg.dt, cfg.beta);
    for (Eigen::Index g = 0; g < groups; ++g) {
      const double lam = ws.group_lambda[g];
      ws.ml(g, m) = lam == 0.0 ? 1.0 : mittag_leffler(cfg.beta, 1.0, -lam * tb);
      ws.kernel(g, m) = (m == 0 || lam == 0.0) ? 0.0 : (ws.ml(g, m - 1) - ws.ml(g, m)) / lam;
    }
  }
}

/// Validates and stores the new iterate.
void commit(SimState& s, const SimConfig& cfg, Eigen::VectorXd u, Eigen::VectorXd v) {
  const int n = s.step + 1;
  const double t = n * cfg.dt;
  if (!u.allFinite() || !v.allFinite()) throw SimulationAbort("non-finite value detected", n, t);
  const double umin = u.minCoeff();
  if (umin < -cfg.negativity_tolerance) {
    std::ostringstream os;
    os << "min u = " << umin << " below -negativity_tolerance";
    throw SimulationAbort(os.str(), n, t);
  }
  const double vmin = v.minCoeff();
  if (!(vmin > 0.0)) throw SimulationAbort("v lost positivity", n, t);
  s.step = n;
  s.time = t;
  s.u_history.push_back(u);
  s.u = Field(s.u.grid(), std::move(u));
  s.v = Field(s.v.grid(), std::move(v));
  s.v_floor = std::min(s.v_floor, vmin);
}

}  // namespace

SimState init_state(const SimConfig& cfg, const Field& u0) {
  cfg.validate();
  if (!(u0.grid() == cfg.grid)) throw std::invalid_argument("initial data grid does not match the configured grid");
  if (u0.values().minCoeff() < 0.0) throw std::invalid_argument("initial data must be nonnegative");
  if (!(u0.values().maxCoeff() > 0.0)) throw std::invalid_argument("initial data must not vanish identically");

  SimState s;
  s.u = u0;
  s.v = resolvent_solve(u0, cfg.alpha);
  s.u_history.push_back(u0.values());
  s.vbar0 = mean(u0);
  s.v_floor = min_value(s.v);
  if (!(s.v_floor > 0.0)) throw std::invalid_argument("initial signal v0 is not strictly positive");

  auto ws = std::make_shared<Workspace>(cfg);
  ws->mu = fractional_symbol(cfg.grid, cfg.alpha);
  ws->resolvent = (1.0 + ws->mu).inverse();
  ws->a = l1_scale(cfg.beta, cfg.dt);
  ws->weights.extend(cfg.n_steps() + 1);
  ws->zero_mode = u0.values().sum();
  if (cfg.scheme == Scheme::MildDuhamel) {
    ws->rho0 = cfg.motility(s.vbar0);
    ws->w0_hat = fwd(cfg.grid, u0.values());
    ws->w0_hat[0] = 0.0;
    build_groups(*ws);
  }
  s.workspace = std::move(ws);
  return s;
}

void step_direct(SimState& s, const SimConfig& cfg) {
  Workspace& ws = *s.workspace;
  const Grid& grid = ws.grid;
  const int n = s.step + 1;
  const double t = n * cfg.dt;
  if (ws.weights.size() < n) ws.weights.extend(2 * n);

  // History term H = Σ_{j=1}^{n-1} b_j (u^{n-j} - u^{n-j-1}), written as a
  // single coefficient per stored field.
  const auto& hist = s.u_history;
  Eigen::VectorXd rhs = hist[static_cast<std::size_t>(n - 1)];
  for (int m = 0; m <= n - 1; ++m) {
    double c = 0.0;
    if (m >= 1) c += ws.weights[n - m];
    if (m <= n - 2) c -= ws.weights[n - 1 - m];
    if (c != 0.0) rhs.noalias() -= c * hist[static_cast<std::size_t>(m)];
  }
  Eigen::VectorXcd rhs_hat = fwd(grid, rhs);

  const MotilityFunction& mf = cfg.motility;
  const double rho_s = mf(s.v.values().minCoeff());
  const Eigen::ArrayXd denom = 1.0 + ws.a * rho_s * ws.mu;
  const Eigen::ArrayXd explicit_gain = ws.a * ws.mu;

  Eigen::VectorXd u_star = s.u.values();
  Eigen::VectorXd v_star = s.v.values();
  Eigen::VectorXcd u_hat;
  for (int pass = 0; pass <= cfg.picard_iters; ++pass) {
    const Eigen::VectorXd rho = rho_of(mf, v_star);
    if (!rho.allFinite()) throw SimulationAbort("motility evaluation failed", n, t);
    if (rho.maxCoeff() > 2.0 * rho_s) throw SimulationAbort("stability gate violated: rho(v) exceeds 2 rho_s", n, t);
    const Eigen::VectorXd g = ((rho.array() - rho_s) * u_star.array()).matrix();
    u_hat = ((rhs_hat.array() - explicit_gain * fwd(grid, g).array()) / denom).matrix();
    u_hat[0] = ws.zero_mode;
    u_star = inv(grid, u_hat);
    v_star = inv(grid, (u_hat.array() * ws.resolvent).matrix());
    if (!u_star.allFinite() || !v_star.allFinite()) throw SimulationAbort("non-finite value detected", n, t);
    if (!(v_star.minCoeff() > 0.0)) throw SimulationAbort("v lost positivity", n, t);
  }
  commit(s, cfg, std::move(u_star), std::move(v_star));
}

void step_mild(SimState& s, const SimConfig& cfg) {
  Workspace& ws = *s.workspace;
  if (ws.w0_hat.size() == 0) throw std::logic_error("step_mild: state was initialised for the direct scheme");
  const Grid& grid = ws.grid;
  const int n = s.step + 1;
  try {
    ensure_ml_columns(ws, cfg, n);
  } catch (const MittagLefflerError& e) {
    throw SimulationAbort(std::string("mild propagator out of range: ") + e.what(), n, n * cfg.dt);
  }

  const Eigen::VectorXd rho = rho_of(cfg.motility, s.v.values());
  if (!rho.allFinite()) throw SimulationAbort("motility evaluation failed", n, n * cfg.dt);
  ws.residuals.push_back(fwd(grid, ((rho.array() - ws.rho0) * s.u.values().array()).matrix()));

  const Eigen::Index modes = grid.size();
  Eigen::VectorXcd w_hat(modes);
  for (Eigen::Index k = 0; k < modes; ++k) w_hat[k] = ws.ml(ws.group[static_cast<std::size_t>(k)], n) * ws.w0_hat[k];
  if (ws.rho0 * ws.mu.maxCoeff() > 0.0) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(modes);
    for (int j = 0; j < n; ++j) {
      const auto& G = ws.residuals[static_cast<std::size_t>(j)];
      const auto col = ws.kernel.col(n - j);
      for (Eigen::Index k = 0; k < modes; ++k) acc[k] += col[ws.group[static_cast<std::size_t>(k)]] * G[k];
    }
    w_hat.array() -= ws.mu.cast<std::complex<double>>() * acc.array();
  }
  w_hat[0] = ws.zero_mode;
  Eigen::VectorXd u = inv(grid, w_hat);
  Eigen::VectorXd v = inv(grid, (w_hat.array() * ws.resolvent).matrix());
  commit(s, cfg, std::move(u), std::move(v));
}

void advance(SimState& s, const SimConfig& cfg) {
  if (cfg.scheme == Scheme::DirectL1)
    step_direct(s, cfg);
  else
    step_mild(s, cfg);
}

double verify_key_identity(const SimState& s, const SimConfig& cfg) {
  if (s.step < 1 || s.u_history.size() < 2) throw std::invalid_argument("verify_key_identity: needs at least 2 recorded steps");
  const Workspace& ws = *s.workspace;
  const int n = s.step;
  const L1Weights b(cfg.beta, n);
  const auto& h = s.u_history;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(s.u.size());
  for (int j = 0; j < n; ++j)
    d.noalias() += b[j] * (h[static_cast<std::size_t>(n - j)] - h[static_cast<std::size_t>(n - j - 1)]);
  d /= ws.a;
  const Eigen::VectorXd flux = (rho_of(cfg.motility, s.v.values()).array() * s.u.values().array()).matrix();
  const Eigen::VectorXd res = inv(ws.grid, (fwd(ws.grid, d - flux).array() * ws.resolvent).matrix()) + flux;
  return res.cwiseAbs().maxCoeff();
}

std::vector<DiagnosticsRecord> run(const SimConfig& cfg, const Field& u0, const RecordObserver& observer,
                                   const StepObserver& on_step) {
  SimState s = init_state(cfg, u0);
  const RecordOptions opts{cfg.alpha, cfg.weighted_p, cfg.weighted_q};
  std::vector<DiagnosticsRecord> out;
  auto record = [&] {
    out.push_back(make_record(s.time, s.u, s.v, s.vbar0, cfg.motility, opts));
    if (observer) observer(out.back(), s);
  };
  record();
  const int steps = cfg.n_steps();
  for (int i = 1; i <= steps; ++i) {
    advance(s, cfg);
    if (on_step) on_step(s);
    if (i % cfg.record_every == 0 || i == steps) record();
  }
  return out;
}

}  // namespace kslab
