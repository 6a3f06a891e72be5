#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/motility.hpp"

namespace kslab {

/// Per-time certified quantities of a run.
struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  double max_v = 0.0;
  double lyapunov = 0.0;
  double l1 = 0.0, l2 = 0.0, l4 = 0.0, linf = 0.0;
  double weighted_energy = 0.0;
  double dist_u = 0.0;  ///< ‖u - ū0‖_∞
  double dist_v = 0.0;  ///< ‖v - ū0‖_∞ + ‖∇v‖_∞

  bool operator==(const DiagnosticsRecord&) const = default;
};

/// Fitted C·e^{-rate·t}.
struct DecayFit {
  double t_min = 0.0;
  double C = 0.0;
  double rate = 0.0;
  double r_squared = 0.0;
  /// rate^β, the θ with rate = θ^{1/β}; 0 when rate ≤ 0.
  double theta_eff = 0.0;
  bool flat = false;
  int samples = 0;
};

struct LpNorms {
  double l1 = 0.0, l2 = 0.0, l4 = 0.0, linf = 0.0;
};

/// E = ‖(-Δ)^{α/4} v‖² + ‖v‖², both as Parseval sums times the cell volume.
double lyapunov(const Field& v, double alpha);

/// ‖f‖_p with cell-volume weights for p = 1, 2, 4 and the max norm.
LpNorms lp_norms(const Field& f);

/// ∫ u_+^{p+1} ρ(v)^q dx. Undershoots the solver tolerated count as zero.
double weighted_energy(const Field& u, const Field& v, const MotilityFunction& mf, double p, double q);

/// (max|u - ū0|, max|v - ū0| + max|∇v|); the gradient is spectral and its
/// magnitude is Euclidean across axes.
std::pair<double, double> stationary_distance(const Field& u, const Field& v, double ubar0);

/// Least-squares fit of log(values) ≈ log C - rate·t over samples with t ≥ t_min.
DecayFit decay_fit(std::span<const double> times, std::span<const double> values, double t_min, double beta);

struct CeilingViolation {
  double time = 0.0;
  Eigen::Index cell = 0;
  double value = 0.0;
  double ceiling = 0.0;
};

struct CeilingReport {
  int checks = 0;
  /// max over checks of v / ceiling; ≤ 1 when no violation.
  double worst_ratio = 0.0;
  std::optional<CeilingViolation> first_violation;

  bool violated() const { return first_violation.has_value(); }
};

/// Streaming check of v(x,t) ≤ C v0(x) e^{ρ(v̂_*)^{1/β} t} with v̂_* the
/// running minimum of v and C = (1 + slack)/β.
///
/// Comparison gives v ≤ v0 E_β(ρ(v̂_*) t^β), and sup_t E_β(w t^β)/e^{w^{1/β} t}
/// is 1/β. A constant of 1 fails within the first step, where v moves like
/// t^β rather than t.
class GrowthCeilingMonitor {
 public:
  GrowthCeilingMonitor(Field v0, const MotilityFunction& mf, double beta, double slack = 1e-6);

  void observe(double time, const Field& v);
  const CeilingReport& report() const { return report_; }
  double constant() const { return constant_; }
  double running_floor() const { return floor_; }

 private:
  Field v0_;
  MotilityFunction mf_;
  double beta_;
  double constant_;
  double floor_;
  CeilingReport report_;
};

CeilingReport pointwise_growth_ceiling(std::span<const Field> v_series, const Field& v0, const MotilityFunction& mf,
                                       double beta, std::span<const double> times);

struct RecordOptions {
  double alpha = 1.5;
  double weighted_p = 1.0;
  double weighted_q = 1.0;
};

DiagnosticsRecord make_record(double time, const Field& u, const Field& v, double ubar0, const MotilityFunction& mf,
                              const RecordOptions& opts);

/// Column order of records.csv.
const std::vector<std::string>& record_columns();
void write_records_csv(std::ostream& os, std::span<const DiagnosticsRecord> records);
std::vector<DiagnosticsRecord> read_records_csv(std::istream& is);

}  // namespace kslab
