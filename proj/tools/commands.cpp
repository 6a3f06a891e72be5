#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kslab/config.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/io.hpp"
#include "kslab/mittag_leffler.hpp"
#include "kslab/motility.hpp"
#include "kslab/solver.hpp"
#include "kslab/spectral.hpp"

namespace kslab::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

int worker_threads() {
  const char* env = std::getenv("KSLAB_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 256));
}

namespace {

/// Range probed by the hypothesis checker when it runs as part of `run`.
constexpr double kRunSMin = 1e-3;
constexpr double kRunSMax = 1e3;
/// Decay fits start here; the stabilization estimate is stated for t ≥ 1.
constexpr double kDecayTMin = 1.0;

ordered_json verdict_json(const HypothesisVerdict& v) {
  ordered_json j;
  j["holds"] = v.holds;
  j["witness"] = v.witness ? ordered_json(*v.witness) : ordered_json(nullptr);
  j["witness_value"] = v.witness_value ? ordered_json(*v.witness_value) : ordered_json(nullptr);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

ordered_json hypotheses_json(const HypothesisReport& r) {
  ordered_json j;
  j["motility"] = r.motility;
  j["s_range"] = {r.s_min, r.s_max};
  j["n_dim"] = r.n_dim;
  j["samples"] = r.samples;
  j["H0"] = verdict_json(r.h0);
  j["H1"] = verdict_json(r.h1);
  j["H2"] = verdict_json(r.h2);
  j["H2_exponent"] = r.h2_exponent ? ordered_json(*r.h2_exponent) : ordered_json(nullptr);
  j["H3"] = verdict_json(r.h3);
  j["l0"] = r.l0 ? ordered_json(*r.l0) : ordered_json(nullptr);
  j["l0_required"] = r.l0_required;
  j["s_rho_nondecreasing"] = r.s_rho_nondecreasing;
  j["all_hold"] = r.all_hold();
  return j;
}

ordered_json fit_json(const DecayFit& f) {
  ordered_json j;
  j["series"] = "dist_u+dist_v";
  j["t_min"] = f.t_min;
  j["C"] = f.C;
  j["rate"] = f.rate;
  j["r_squared"] = f.r_squared;
  j["theta_eff"] = f.theta_eff;
  j["flat"] = f.flat;
  j["samples"] = f.samples;
  return j;
}

/// Canonical "section.key=value" lines as nested JSON, numbers kept numeric.
ordered_json config_json(const RunConfig& rc) {
  ordered_json j;
  std::istringstream in(rc.canonical);
  std::string line;
  while (std::getline(in, line)) {
    const auto dot = line.find('.');
    const auto eq = line.find('=');
    const std::string sec = line.substr(0, dot), key = line.substr(dot + 1, eq - dot - 1), val = line.substr(eq + 1);
    char* end = nullptr;
    const long long whole = std::strtoll(val.c_str(), &end, 10);
    if (end != val.c_str() && *end == '\0') {
      j[sec][key] = whole;
      continue;
    }
    const double num = std::strtod(val.c_str(), &end);
    if (end != val.c_str() && *end == '\0')
      j[sec][key] = num;
    else
      j[sec][key] = val;
  }
  return j;
}

std::string file_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

std::vector<double> series_of(const std::vector<DiagnosticsRecord>& recs, std::vector<double>& times) {
  std::vector<double> y;
  times.clear();
  for (const auto& r : recs) {
    times.push_back(r.time);
    y.push_back(r.dist_u + r.dist_v);
  }
  return y;
}

std::optional<DecayFit> try_fit(const std::vector<DiagnosticsRecord>& recs, double beta) {
  std::vector<double> t;
  const auto y = series_of(recs, t);
  try {
    return decay_fit(t, y, kDecayTMin, beta);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  try {
    rc = load_config(opts.config);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const SimConfig& cfg = rc.sim;
  std::error_code ec;
  fs::create_directories(opts.out, ec);
  if (ec) {
    err << "cannot create output directory " << opts.out << ": " << ec.message() << '\n';
    return kConfigError;
  }

  const Field u0 = make_initial_data(rc, opts.seed);
  const std::uint64_t hash = config_hash(rc);
  std::vector<std::string> written;

  std::vector<DiagnosticsRecord> records;
  std::optional<GrowthCeilingMonitor> ceiling;
  double max_lyapunov_increase = -std::numeric_limits<double>::infinity();
  double key_residual = std::numeric_limits<double>::quiet_NaN();
  double v_floor = 0.0;
  int steps_done = 0;
  double t_done = 0.0;
  std::optional<SimulationAbort> abort;

  auto on_record = [&](const DiagnosticsRecord& r, const SimState& s) {
    if (!ceiling) ceiling.emplace(s.v, cfg.motility, cfg.beta);
    ceiling->observe(s.time, s.v);
    if (!records.empty()) max_lyapunov_increase = std::max(max_lyapunov_increase, r.lyapunov - records.back().lyapunov);
    records.push_back(r);
  };
  auto on_step = [&](const SimState& s) {
    steps_done = s.step;
    t_done = s.time;
    v_floor = s.v_floor;
    if (s.step == cfg.n_steps() && s.step >= 1) key_residual = verify_key_identity(s, cfg);
    if (rc.checkpoint_every > 0 && s.step % rc.checkpoint_every == 0) {
      const std::string name = "checkpoint_" + std::to_string(s.step) + ".csv";
      std::ofstream os(opts.out / name, std::ios::binary);
      write_checkpoint(os, Checkpoint{hash, s.step, s.time, s.u, s.v});
      written.push_back(name);
    }
  };

  std::optional<SimState> final_state;
  try {
    run(cfg, u0, on_record, [&](const SimState& s) {
      on_step(s);
      if (s.step == cfg.n_steps()) final_state = s;
    });
  } catch (const SimulationAbort& e) {
    abort = e;
  }

  {
    std::ofstream os(opts.out / "records.csv", std::ios::binary);
    write_records_csv(os, records);
    written.insert(written.begin(), "records.csv");
  }
  if (final_state) {
    std::ofstream us(opts.out / "u_final.csv", std::ios::binary), vs(opts.out / "v_final.csv", std::ios::binary);
    write_field_csv(us, final_state->u);
    write_field_csv(vs, final_state->v);
    written.push_back("u_final.csv");
    written.push_back("v_final.csv");
  }

  ordered_json summary;
  summary["status"] = abort ? "aborted" : "ok";
  if (abort) {
    summary["abort"] = {{"reason", abort->reason()}, {"step", abort->step()}, {"time", abort->time()}};
  }
  summary["config"] = config_json(rc);
  summary["config_hash"] = hex64(hash);
  summary["seed"] = opts.seed;
  summary["steps_completed"] = steps_done;
  summary["t_final"] = t_done;
  const auto fit = try_fit(records, cfg.beta);
  summary["decay_fit"] = fit ? fit_json(*fit) : ordered_json(nullptr);
  summary["hypotheses"] = hypotheses_json(check_hypotheses(cfg.motility, {kRunSMin, kRunSMax}, cfg.grid.dim()));

  ordered_json inv;
  if (!records.empty()) {
    double drift = 0.0, min_u = records.front().min_u;
    for (const auto& r : records) {
      drift = std::max(drift, std::abs(r.mass - records.front().mass) / records.front().mass);
      min_u = std::min(min_u, r.min_u);
    }
    inv["mass_drift_rel"] = drift;
    inv["min_u"] = min_u;
  }
  inv["v_floor"] = v_floor > 0.0 ? ordered_json(v_floor) : ordered_json(nullptr);
  inv["max_lyapunov_increase"] =
      std::isfinite(max_lyapunov_increase) ? ordered_json(max_lyapunov_increase) : ordered_json(nullptr);
  inv["key_identity_residual"] = std::isfinite(key_residual) ? ordered_json(key_residual) : ordered_json(nullptr);
  summary["invariants"] = inv;

  ordered_json viol;
  if (ceiling) {
    const auto& rep = ceiling->report();
    ordered_json c;
    c["checks"] = rep.checks;
    c["worst_ratio"] = rep.worst_ratio;
    if (rep.first_violation) {
      const auto& fv = *rep.first_violation;
      c["first_violation"] = {{"time", fv.time}, {"cell", fv.cell}, {"value", fv.value}, {"ceiling", fv.ceiling}};
    } else {
      c["first_violation"] = nullptr;
    }
    viol["growth_ceiling"] = c;
  }
  summary["violations"] = viol;
  summary["explicit_stability_number"] = explicit_stability_number(cfg, records.empty() ? 1.0 : records.front().min_v);
  write_text(opts.out / "summary.json", summary.dump(2) + "\n");
  written.push_back("summary.json");

  ordered_json manifest;
  manifest["config"] = opts.config.string();
  manifest["out"] = opts.out.string();
  manifest["seed"] = opts.seed;
  ordered_json files = ordered_json::array();
  for (const auto& name : written) files.push_back({{"name", name}, {"fnv1a", hex64(fnv1a(file_text(opts.out / name)))}});
  manifest["files"] = files;
  write_text(opts.out / "manifest.json", manifest.dump(2) + "\n");

  if (abort) {
    err << "numerical abort: " << abort->what() << '\n';
    return kNumericalAbort;
  }
  out << "run finished: " << steps_done << " steps, t=" << t_done << ", " << records.size() << " records in "
      << opts.out.string() << '\n';
  return kOk;
}

namespace {

struct ConvergencePoint {
  double dt = 0.0;
  double error = 0.0;
};

ConvergencePoint linear_error(SimConfig cfg, const Field& u0, double dt) {
  cfg.dt = dt;
  auto s = init_state(cfg, u0);
  for (int i = 0; i < cfg.n_steps(); ++i) advance(s, cfg);
  const double rho0 = cfg.motility(mean(u0));
  const Eigen::ArrayXd mu = fractional_symbol(cfg.grid, cfg.alpha);
  const double tb = std::pow(s.time, cfg.beta);
  auto spec = forward_transform(u0);
  for (Eigen::Index k = 1; k < spec.coeffs().size(); ++k)
    spec.coeffs()[k] *= mittag_leffler(cfg.beta, 1.0, -rho0 * mu[k] * tb);
  const Field exact = inverse_transform(spec);
  return {dt, (s.u.values() - exact.values()).cwiseAbs().maxCoeff()};
}

}  // namespace

int cmd_convergence(const ConvergenceOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.refinements < 3) {
    err << "convergence needs --refinements >= 3\n";
    return kConfigError;
  }
  RunConfig rc;
  try {
    rc = load_config(opts.config);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const Field u0 = make_initial_data(rc, 0);
  SimConfig cfg = rc.sim;
  cfg.scheme = Scheme::DirectL1;
  cfg.motility = make_constant(cfg.motility(mean(u0)));
  // Keep the finest level affordable: the full-history scheme is quadratic in steps.
  cfg.t_end = std::min(cfg.t_end, 1.0);

  std::vector<ConvergencePoint> pts(static_cast<std::size_t>(opts.refinements));
  try {
    const int threads = worker_threads();
    for (int start = 0; start < opts.refinements; start += threads) {
      std::vector<std::future<ConvergencePoint>> jobs;
      for (int r = start; r < std::min(opts.refinements, start + threads); ++r)
        jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, linear_error, cfg, u0,
                                  cfg.dt / std::pow(2.0, r)));
      for (int r = start; r < std::min(opts.refinements, start + threads); ++r)
        pts[static_cast<std::size_t>(r)] = jobs[static_cast<std::size_t>(r - start)].get();
    }
  } catch (const SimulationAbort& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  }

  const double expected = std::min(1.0, 2.0 - cfg.beta);
  std::error_code ec;
  fs::create_directories(opts.out, ec);
  std::ostringstream table;
  table << "dt,error,order\n";
  double last_order = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double order = i == 0 ? std::numeric_limits<double>::quiet_NaN() : std::log2(pts[i - 1].error / pts[i].error);
    if (i > 0) last_order = order;
    table << format_double(pts[i].dt) << ',' << format_double(pts[i].error) << ','
          << (i == 0 ? std::string("") : format_double(order)) << '\n';
  }
  if (!ec) write_text(opts.out / "convergence.csv", table.str());
  out << table.str();
  out << "expected order " << expected << ", observed " << last_order << '\n';
  if (!(std::abs(last_order - expected) <= 0.3)) {
    err << "observed order " << last_order << " deviates from " << expected << " by more than 0.3\n";
    return kThresholdFailure;
  }
  return kOk;
}

int cmd_check_hypotheses(const HypothesisOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    std::optional<MotilityFunction> mf;
    int n_dim = opts.n_dim;
    if (!opts.config.empty()) {
      const RunConfig rc = load_config(opts.config);
      mf = rc.sim.motility;
      n_dim = rc.sim.grid.dim();
    } else {
      mf = make_motility(opts.motility, opts.parameter);
    }
    const auto report = check_hypotheses(*mf, {opts.s_min, opts.s_max}, n_dim, opts.samples);
    out << hypotheses_json(report).dump(2) << '\n';
    return kOk;
  } catch (const std::domain_error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

int cmd_ml_eval(double beta, double gamma, const std::vector<double>& z, std::ostream& out, std::ostream& err) {
  if (z.empty()) {
    err << "ml-eval needs at least one z\n";
    return kConfigError;
  }
  if (!(beta > 0.0 && beta <= 2.0) || !(gamma > 0.0 && std::isfinite(gamma))) {
    err << "invalid parameters: need 0 < beta <= 2 and gamma > 0\n";
    return kConfigError;
  }
  out << "beta,gamma,z,value\n";
  for (double x : z) {
    try {
      out << format_double(beta) << ',' << format_double(gamma) << ',' << format_double(x) << ','
          << format_double(mittag_leffler(beta, gamma, x)) << '\n';
    } catch (const std::exception& e) {
      err << "evaluation failed at z=" << x << ": " << e.what() << '\n';
      return kNumericalAbort;
    }
  }
  return kOk;
}

int cmd_decay_report(const DecayOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<DiagnosticsRecord> recs;
  try {
    std::ifstream in(opts.records);
    if (!in) throw std::runtime_error("cannot open " + opts.records.string());
    recs = read_records_csv(in);
  } catch (const std::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kConfigError;
  }
  std::vector<double> t;
  const auto y = series_of(recs, t);
  DecayFit fit;
  try {
    fit = decay_fit(t, y, opts.t_min, opts.beta);
  } catch (const std::exception& e) {
    err << "fit error: " << e.what() << '\n';
    return kConfigError;
  }
  out << fit_json(fit).dump(2) << '\n';
  if (!(fit.rate > 0.0) || fit.r_squared < 0.95) {
    err << "decay threshold not met (need rate > 0 and r^2 >= 0.95)\n";
    return kThresholdFailure;
  }
  return kOk;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ksctl: time-fractional Keller-Segel laboratory"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "simulate a configuration and write records, summary and fields");
  run_cmd->add_option("--config", run_opts.config, "configuration file")->required();
  run_cmd->add_option("--out", run_opts.out, "output directory")->required();
  run_cmd->add_option("--seed", run_opts.seed, "seed for random initial data");

  ConvergenceOptions conv_opts;
  auto* conv_cmd = app.add_subcommand("convergence", "dt-refinement study of the linear problem");
  conv_cmd->add_option("--config", conv_opts.config, "configuration file")->required();
  conv_cmd->add_option("--out", conv_opts.out, "output directory")->required();
  conv_cmd->add_option("--refinements", conv_opts.refinements, "number of dt levels (>= 3)");

  HypothesisOptions hyp_opts;
  auto* hyp_cmd = app.add_subcommand("check-hypotheses", "grid check of H0-H3 for a motility function");
  hyp_cmd->add_option("--config", hyp_opts.config, "take motility and n from a configuration file");
  hyp_cmd->add_option("--motility", hyp_opts.motility, "power_law, exponential, shifted_power or constant");
  hyp_cmd->add_option("--param", hyp_opts.parameter, "k, lambda or rho0");
  hyp_cmd->add_option("--n-dim", hyp_opts.n_dim, "space dimension");
  hyp_cmd->add_option("--s-min", hyp_opts.s_min);
  hyp_cmd->add_option("--s-max", hyp_opts.s_max);
  hyp_cmd->add_option("--samples", hyp_opts.samples);

  double ml_beta = 0.5, ml_gamma = 1.0;
  std::vector<double> ml_z;
  auto* ml_cmd = app.add_subcommand("ml-eval", "tabulate E_{beta,gamma}(z)");
  ml_cmd->add_option("--beta", ml_beta)->required();
  ml_cmd->add_option("--gamma", ml_gamma);
  ml_cmd->add_option("z", ml_z, "arguments (use -- before negative values)")->required();

  DecayOptions decay_opts;
  auto* decay_cmd = app.add_subcommand("decay-report", "fit the stabilization rate from records.csv");
  decay_cmd->add_option("records", decay_opts.records, "records.csv")->required();
  decay_cmd->add_option("--t-min", decay_opts.t_min, "start of the fit window");
  decay_cmd->add_option("--beta", decay_opts.beta, "time-fractional order, for theta_eff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (*run_cmd) return cmd_run(run_opts, out, err);
  if (*conv_cmd) return cmd_convergence(conv_opts, out, err);
  if (*hyp_cmd) return cmd_check_hypotheses(hyp_opts, out, err);
  if (*ml_cmd) return cmd_ml_eval(ml_beta, ml_gamma, ml_z, out, err);
  if (*decay_cmd) return cmd_decay_report(decay_opts, out, err);
  return kUsage;
}

}  // namespace kslab::cli
