#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmrac/adaptation.hpp"
#include "cmrac/controller.hpp"
#include "cmrac/dynamics.hpp"
#include "cmrac/matrix_core.hpp"

namespace cmrac {

struct ConstraintSpec {
  double M_x = 1.0;   // ||X|| < M_x
  double M_u = 1.0;   // |u| <= M_u
  double M_xm = 0.5;  // ||X_m|| <= M_xm < M_x
  double f_M = 1.0;   // |f| <= f_M
};

struct BarrierSpec {
  double M_e = 0.0;  // M_x - M_xm
  double M = 0.0;    // M_e sqrt(lambda_min(P))
  LyapunovPair pair;
};

enum class BarrierPolicy { Abort, Soft };
enum class MarginPolicy { Continue, Abort };

struct IntegratorSettings {
  double dt = 1e-3;
  double horizon = 30.0;
  BarrierPolicy barrier_policy = BarrierPolicy::Abort;
  MarginPolicy margin_policy = MarginPolicy::Continue;
};

/// True gains, known only to fixtures; used for diagnostics such as V(t).
struct TruthGains {
  Vector K;
  double l = 0.0;
  std::optional<Vector> K1;
};

struct ScenarioConfig {
  std::string name;
  PlantModel plant;
  TargetModel target;
  Vector X0;
  Matrix Q;  // empty means identity
  ConstraintSpec constraints;
  ProjectionBounds bounds;
  AdaptationGains gains;
  EstimateState initial;
  ReferenceSignalSpec reference;
  IntegratorSettings integrator;
  ControllerVariant variant = ControllerVariant::StateAndInput;
  std::optional<TruthGains> truth;  // explicit truth; derived from matching when absent

  [[nodiscard]] Eigen::Index dim() const noexcept { return plant.dim(); }
  [[nodiscard]] Matrix lyapunov_Q() const;
};

struct CheckReport {
  std::string name;
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct ReferenceBoundReport {
  bool analytic_pass = false;
  double analytic_bound = 0.0;  // conservative sup ||X_m|| estimate
  bool empirical_pass = false;
  double empirical_sup = 0.0;   // max over the dither set of sup_t ||X_m(t)||
  double M_xm = 0.0;
};

enum class ViolationCode {
  Dimension,
  NonPositiveConstraint,
  InfeasibleConstraint,
  BoundsOrder,
  BadSign,
  NonPositiveGain,
  InitialKHat,
  InitialLHat,
  InitialLHatSign,
  InitialK1Hat,
  NotHurwitz,
  QNotPositiveDefinite,
  InitialBarrier,
  InitialTargetNorm,
  ReferenceAmplitude,
  MatchingViolated,
  TrueGainOutOfBounds,
  NotControllable,
  NonlinearIncomplete,
  Integrator,
  NonFinite,
};

struct Violation {
  ViolationCode code;
  std::string message;
};

[[nodiscard]] BarrierSpec compute_barrier(const ConstraintSpec& constraints, const LyapunovPair& pair);

/// Offline sufficient condition M_u >= M_K M_x - m_l f_M; lhs = M_u, rhs = M_K M_x - m_l f_M.
[[nodiscard]] CheckReport verify_offline_stability(const ProjectionBounds& bounds, const ConstraintSpec& constraints);

/**
 * Two-tier check that |f| <= f_M keeps ||X_m|| <= M_xm: a conservative
 * Lyapunov sublevel-set bound and an empirical worst case over a fixed
 * dither set (constants, square waves, P_m-norm ascent), each simulated for
 * `horizon` seconds with RK4 at step `dt`.
 */
[[nodiscard]] ReferenceBoundReport verify_reference_bound(const TargetModel& target, double f_M, double M_xm,
                                                          const LyapunovPair& pair_m, double horizon = 30.0,
                                                          double dt = 1e-3);

/// Empty iff every hard precondition for a run holds. Pure.
[[nodiscard]] std::vector<Violation> validate_scenario(const ScenarioConfig& config);

/// Explicit truth if present, else derived from the matching conditions; nullopt if no exact match.
[[nodiscard]] std::optional<TruthGains> resolve_truth(const ScenarioConfig& config);

}  // namespace cmrac
