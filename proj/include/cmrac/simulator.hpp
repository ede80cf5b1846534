#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmrac/controller.hpp"
#include "cmrac/error.hpp"
#include "cmrac/scenario.hpp"

namespace cmrac {

/// Plant, original target, modified target and estimates at time t.
struct AugmentedState {
  double t = 0.0;
  Vector X;
  Vector Xm;
  Vector Xms;
  EstimateState est;
};

enum class EventKind {
  BarrierSaturated,
  BarrierViolated,
  SoftBarrierRenormalized,
  StabilityConditionViolated,
  StateConstraintViolated,
  InputConstraintViolated,
  TargetBoundExceeded,
  EstimateProjected,
  NonFiniteState,
};

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::BarrierSaturated;
  std::string detail;
};

struct TraceRecord {
  AugmentedState state;
  double f = 0.0;
  ControlDecision decision;
  double mu = 0.0;
  double norm_X = 0.0;
  double norm_Es = 0.0;
  double barrier_fraction = 0.0;  // E^sT P E^s / M^2
  double V = 0.0;                 // barrier Lyapunov function; NaN without truth
};

/// Constants needed to interpret a trace on its own.
struct TraceMetadata {
  Eigen::Index n = 0;
  bool has_K1 = false;
  ControllerVariant variant = ControllerVariant::StateAndInput;
  double M_u = 0.0;
  double M_x = 0.0;
  double M_e = 0.0;
  double M = 0.0;
  double f_M = 0.0;
  int sign_l = 1;
  double dt = 0.0;
  double horizon = 0.0;
};

struct SimulationTrace {
  TraceMetadata meta;
  std::vector<TraceRecord> records;
  std::vector<Event> events;
};

struct RunSummary {
  double sup_norm_X = 0.0;
  double sup_abs_u = 0.0;  // applied input
  double sup_abs_u_nominal = 0.0;
  double sup_abs_g = 0.0;
  double sup_abs_total_reference = 0.0;
  double inf_margin = 0.0;
  double sup_norm_Es = 0.0;
  double sup_barrier_fraction = 0.0;
  double final_window_mean_Es = 0.0;      // mean ||E^s|| over the last 10 % of the horizon
  double sup_target_deviation = 0.0;      // sup ||X_m^s - X_m||
  double final_half_sup_tilde_E = 0.0;    // sup over t >= T/2 of ||E - E^s||
  double max_norm_K_hat = 0.0;
  double min_abs_l_hat = 0.0;
  double max_abs_l_hat = 0.0;
  std::optional<double> max_norm_K1_hat;
  std::size_t samples = 0;
  double end_time = 0.0;

  std::size_t state_violation_samples = 0;
  std::size_t input_violation_samples = 0;
  std::size_t margin_violation_samples = 0;

  bool state_constraint_ok = false;      // sup ||X|| < M_x
  bool input_constraint_ok = false;      // sup |u| <= M_u + 1e-9
  bool stability_condition_ok = false;   // inf margin >= 0
  bool error_bound_ok = false;           // sup ||E^s|| < M_e
  bool completed = false;

  [[nodiscard]] bool constraints_ok() const noexcept { return state_constraint_ok && input_constraint_ok; }
};

struct RunFailure {
  ErrorKind kind = ErrorKind::NonFiniteState;
  double t = 0.0;
  std::string message;
};

struct RunResult {
  SimulationTrace trace;
  RunSummary summary;
  std::optional<RunFailure> failure;
};

struct RunOptions {
  bool force = false;        // skip validate_scenario
  bool record_trace = true;  // false keeps only the summary (records are still scanned)
};

/**
 * Precomputed closed loop for one scenario: Lyapunov pair, barrier radius and
 * truth (when available). Immutable after construction.
 */
class ClosedLoop {
 public:
  explicit ClosedLoop(ScenarioConfig config);

  struct Evaluation {
    Vector derivative;  // packed like pack()
    double f = 0.0;
    ControlDecision decision;
    BarrierGradient mu;
    std::optional<Vector> phi_x;
  };

  [[nodiscard]] const ScenarioConfig& config() const noexcept { return config_; }
  [[nodiscard]] const BarrierSpec& barrier() const noexcept { return barrier_; }
  [[nodiscard]] const std::optional<TruthGains>& truth() const noexcept { return truth_; }

  [[nodiscard]] AugmentedState initial_state() const;
  [[nodiscard]] Evaluation evaluate(const AugmentedState& s) const;

  /// One classical RK4 step of size dt followed by projection cleanup.
  /// `projected` (if given) reports whether the cleanup changed the estimates.
  [[nodiscard]] AugmentedState step(const AugmentedState& s, bool* projected = nullptr,
                                    bool* renormalized = nullptr) const;

  /// Barrier Lyapunov function at s; NaN without truth or in baseline mode.
  [[nodiscard]] double lyapunov_value(const AugmentedState& s) const;

  [[nodiscard]] Vector pack(const AugmentedState& s) const;
  [[nodiscard]] AugmentedState unpack(const Vector& v, double t) const;

 private:
  ScenarioConfig config_;
  BarrierSpec barrier_;
  std::optional<TruthGains> truth_;
  bool nonlinear_ = false;
};

/// Free-function form of ClosedLoop::step (rebuilds the Lyapunov pair each call).
[[nodiscard]] AugmentedState step(const AugmentedState& state, const ScenarioConfig& config);

/// Full fixed-step run over [0, T]. Throws InvalidScenario unless validation passes or options.force.
[[nodiscard]] RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

[[nodiscard]] RunSummary summarize(const SimulationTrace& trace);

}  // namespace cmrac
