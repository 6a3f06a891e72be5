#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace kslab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kNumericalAbort = 3,
  kThresholdFailure = 4,
};

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::uint64_t seed = 0;
};

/// Writes records.csv, summary.json, u_final.csv, v_final.csv, optional
/// checkpoint_<step>.csv files and manifest.json into `out`.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct ConvergenceOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  int refinements = 3;
};

/// Linear problem ρ ≡ ρ(ū0) with the configured grid and initial data, run at
/// dt, dt/2, ... and compared with the exact mode-wise Mittag-Leffler solution.
/// Writes convergence.csv; fails (4) when the last observed order is more than
/// 0.3 away from min(1, 2-β).
int cmd_convergence(const ConvergenceOptions& opts, std::ostream& out, std::ostream& err);

struct HypothesisOptions {
  std::filesystem::path config;  ///< optional; supplies motility and n
  std::string motility = "power_law";
  double parameter = 0.5;
  int n_dim = 1;
  double s_min = 1e-3;
  double s_max = 1e3;
  int samples = 10000;
};

int cmd_check_hypotheses(const HypothesisOptions& opts, std::ostream& out, std::ostream& err);

int cmd_ml_eval(double beta, double gamma, const std::vector<double>& z, std::ostream& out, std::ostream& err);

struct DecayOptions {
  std::filesystem::path records;
  double t_min = 1.0;
  double beta = 0.5;
};

/// Fits dist_u + dist_v from a records.csv. Fails (4) when rate ≤ 0 or r² < 0.95.
int cmd_decay_report(const DecayOptions& opts, std::ostream& out, std::ostream& err);

/// KSLAB_THREADS, clamped to ≥ 1; 1 when unset or unparsable.
int worker_threads();

/// Full command line front end.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace kslab::cli
