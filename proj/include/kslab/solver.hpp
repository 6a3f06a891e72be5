#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kslab/diagnostics.hpp"
#include "kslab/grid.hpp"
#include "kslab/motility.hpp"
#include "kslab/spectral.hpp"

namespace kslab {

enum class Scheme { DirectL1, MildDuhamel };

std::string to_string(Scheme s);
/// Accepts "direct-l1" and "mild-duhamel".
Scheme parse_scheme(const std::string& name);

struct SimConfig {
  double alpha = 1.5;
  double beta = 0.5;
  Grid grid = Grid::uniform(1, 256, 6.283185307179586);
  double dt = 0.00390625;
  double t_end = 8.0;
  MotilityFunction motility = make_power_law(0.5);
  Scheme scheme = Scheme::DirectL1;
  /// Extra fixed-point sweeps of the direct scheme. Ignored by the mild scheme,
  /// whose correction only reads past steps.
  int picard_iters = 1;
  double negativity_tolerance = 1e-8;
  int record_every = 1;
  /// Exponents of the weighted energy ∫u^{p+1}ρ(v)^q.
  double weighted_p = 1.0;
  double weighted_q = 1.0;

  /// round(t_end/dt).
  int n_steps() const;
  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

/// Γ(2-β)·dt^β·ρ_max·μ_max: the explicit-flux stability number. Informational;
/// the stepping itself is linearly implicit (see step_direct).
double explicit_stability_number(const SimConfig& cfg, double v_floor);

/// Abort raised by stepping with the step/time context of the failure.
class SimulationAbort : public std::runtime_error {
 public:
  SimulationAbort(const std::string& reason, int step, double time);
  const std::string& reason() const { return reason_; }
  int step() const { return step_; }
  double time() const { return time_; }

 private:
  std::string reason_;
  int step_;
  double time_;
};

namespace solver_detail {
struct Workspace;
}

struct SimState {
  int step = 0;
  double time = 0.0;
  Field u;
  Field v;
  /// u^0 … u^step (full L1 memory).
  std::vector<Eigen::VectorXd> u_history;
  /// ū0, the conserved mean.
  double vbar0 = 0.0;
  /// Running minimum of v over all steps.
  double v_floor = 0.0;

  std::shared_ptr<solver_detail::Workspace> workspace;
};

SimState init_state(const SimConfig& cfg, const Field& u0);

/// One step of the stabilized L1 scheme. With a = Γ(2-β)dt^β and
/// ρ_s = ρ(min v^{n-1}) the update solves mode-wise
///   (1 + aρ_s μ) û^n = F[u^{n-1} - H] - aμ F[(ρ(v*) - ρ_s) u*],
/// H the L1 history term, (u*, v*) = (u^{n-1}, v^{n-1}) on the first pass and
/// the latest iterate on each of the picard_iters further passes.
void step_direct(SimState& state, const SimConfig& cfg);

/// One step of the Mittag-Leffler propagator for w = u - ū0 with ρ0 = ρ(ū0):
///   ŵ^n = E_β(-λ t_n^β) ŵ^0 - μ Σ_{j<n} W(n-j) G^j,  λ = ρ0 μ,
/// G^j = F[(ρ(v^j) - ρ0) u^j] and W(m) the kernel integrated exactly over
/// the m-th interval back, (E_β(-λ((m-1)dt)^β) - E_β(-λ(m dt)^β))/λ.
void step_mild(SimState& state, const SimConfig& cfg);

/// Advances by one step with the configured scheme.
void advance(SimState& state, const SimConfig& cfg);

/// sup |R[∂^β u] + ρ(v)u - R[ρ(v)u]| at the current step, R the resolvent and
/// ∂^β the L1 formula on the stored history (R commutes with it, so this is
/// the L1 derivative of the v-history).
double verify_key_identity(const SimState& state, const SimConfig& cfg);

using RecordObserver = std::function<void(const DiagnosticsRecord&, const SimState&)>;
using StepObserver = std::function<void(const SimState&)>;

/// Steps to t_end, recording at step 0, every record_every steps and at the
/// final step. Deterministic in (cfg, u0). Throws SimulationAbort.
/// `on_step` sees the state after every step.
std::vector<DiagnosticsRecord> run(const SimConfig& cfg, const Field& u0, const RecordObserver& observer = {},
                                   const StepObserver& on_step = {});

}  // namespace kslab
