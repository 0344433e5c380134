#ifndef RDBOUND_SIM_HPP
#define RDBOUND_SIM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rdbound/system.hpp"
#include "rdbound/term_function.hpp"

namespace rdbound {

/// Membership of each compartment in the sub-level region {W < M^(K)}
/// (strict: points on the boundary level set count as outside), plus the
/// classification of the n-1 edges.
struct PartitionSnapshot {
  std::vector<std::uint8_t> in_Y;  // size n
  std::vector<int> Z_bdy;          // edges joining Y with Y^C (0-based)
  std::vector<int> Z_int;          // edges joining two Y^C compartments
  std::vector<int> edge_sign;      // n_i = 1_Y(i+1) - 1_Y(i) per edge
  int n_t = 0;                     // |Y|
};

PartitionSnapshot snapshot_partition(const StateVector& s,
                                     const RationalTermFunction& W,
                                     double M_K);

struct CrossingEvent {
  int compartment = 0;
  bool entered = false;  // true: crossed into the sub-level region
};
std::vector<CrossingEvent> detect_crossings(const PartitionSnapshot& prev,
                                            const PartitionSnapshot& next);

/// Per-edge flux-effect terms. F_bdy uses the derivative on the Y^C side of
/// the edge; F_int is the (negative under convexity) interior form. Entries
/// are 0 for edges outside the respective set. W_YC_D is their sum, which
/// equals the direct gradient form of the diffusive contribution.
struct FluxEffects {
  std::vector<double> F_bdy;  // size n-1
  std::vector<double> F_int;  // size n-1
  double W_YC_D = 0.0;
};
FluxEffects flux_effects(const StateVector& s, const RationalTermFunction& W,
                         const PartitionSnapshot& partition, double d);

struct MonitorFrame {
  double t = 0.0;
  double W_N = 0.0;     // sum of W over all compartments
  double W_YC = 0.0;    // sum over compartments outside the region
  double W_YC_R = 0.0;  // reactive contribution (unscaled by gamma)
  double W_YC_D = 0.0;  // diffusive contribution (edge-sum form)
  double mathcal_W = 0.0;  // n_t M^(K) + W_YC, upper bound on W_N
  double max_norm = 0.0;   // max_i (u_i + v_i)
  int n_t = 0;
  int crossings_in = 0;   // since the previous frame
  int crossings_out = 0;
  PartitionSnapshot partition;
  FluxEffects fluxes;
};

enum class RunStatus {
  completed,
  blow_up_detected,
  positivity_violation,
  step_failure
};
std::string to_string(RunStatus s);

struct Violation {
  std::string lemma;
  double t = 0.0;
  double magnitude = 0.0;
};

struct TrajectoryRecord {
  std::vector<StateVector> states;   // sampled at the monitor cadence
  std::vector<MonitorFrame> frames;  // empty without a monitor context
  RunStatus status = RunStatus::completed;
  std::vector<Violation> violations;
  bool lemma_threshold_reached = false;  // some frame had max_norm >= C_underbar
  double max_norm_overall = 0.0;
  double t_final = 0.0;
};

/// What the runtime monitors need. M_K alone enables the partition and
/// decomposition channels; C_underbar and F_max additionally enable the
/// lemma-level assertions.
struct MonitorContext {
  RationalTermFunction W;
  double M_K = 0.0;
  double gamma = 1.0;
  std::optional<double> C_underbar;
  std::optional<double> F_max;
};

struct IntegratorSettings {
  double t_end = 10.0;
  double dt = 1e-4;
  double monitor_every = 1e-2;  // positive multiple of dt
  bool adaptive_halving = false;
  double halving_threshold = 1.0;  // sup-norm of a stage increment
  int max_halvings = 20;
  double blow_up_guard = 1e6;   // on max_i (u_i + v_i)
  double clip_tol = 1e-12;      // entries in [-clip_tol, 0) are set to 0
};

/// Monitors observe and log; they never abort the run. Violations of the
/// lemma-level inequalities are recorded with magnitudes.
std::vector<Violation> assert_lemmas(const MonitorFrame& frame,
                                     const MonitorFrame* prev,
                                     const MonitorContext& ctx);

/// Fixed-step classical RK4 over the compartment system, with nonnegativity
/// clipping, a blow-up guard checked every step, and optional safety step
/// halving. Deterministic: identical inputs give bit-identical trajectories.
TrajectoryRecord integrate(const DiscretizedSystem& sys,
                           const IntegratorSettings& settings,
                           const std::optional<MonitorContext>& monitor = {});

/// Generic small-ODE variant (same stepper, guard and clipping) used for
/// reduced systems); states are recorded at the monitor cadence.
struct OdeResult {
  std::vector<double> ts;
  std::vector<std::vector<double>> states;
  RunStatus status = RunStatus::completed;
  double t_final = 0.0;
};
OdeResult integrate_generic(
    const std::function<void(double, std::span<const double>,
                             std::span<double>)>& deriv,
    std::vector<double> y0, const IntegratorSettings& settings);

/// CSV emission; locale-independent shortest round-trip formatting.
/// trajectory: t,u_1..u_n,v_1..v_n; monitors:
/// t,W_N,W_YC,W_YC_R,W_YC_D,mathcalW,max_norm,n_t,crossings.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);
void write_monitors_csv(std::ostream& os, const TrajectoryRecord& record);

}  // namespace rdbound

#endif  // RDBOUND_SIM_HPP
