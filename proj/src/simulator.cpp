#include "cmrac/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace cmrac {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::BarrierSaturated: return "BarrierSaturated";
    case EventKind::BarrierViolated: return "BarrierViolated";
    case EventKind::SoftBarrierRenormalized: return "SoftBarrierRenormalized";
    case EventKind::StabilityConditionViolated: return "StabilityConditionViolated";
    case EventKind::StateConstraintViolated: return "StateConstraintViolated";
    case EventKind::InputConstraintViolated: return "InputConstraintViolated";
    case EventKind::TargetBoundExceeded: return "TargetBoundExceeded";
    case EventKind::EstimateProjected: return "EstimateProjected";
    case EventKind::NonFiniteState: return "NonFiniteState";
  }
  return "Unknown";
}

namespace {

constexpr double kInputSlack = 1e-9;
constexpr double kSoftBarrierRadius = 0.999;

bool has_K1(const ScenarioConfig& c) {
  return c.variant == ControllerVariant::NonlinearStateAndInput && c.initial.K1_hat.has_value();
}

long step_count(const IntegratorSettings& s) { return static_cast<long>(std::floor(s.horizon / s.dt + 1e-9)); }

std::string describe(auto&&... parts) {
  std::ostringstream os;
  os.precision(15);
  (os << ... << parts);
  return os.str();
}

}  // namespace

ClosedLoop::ClosedLoop(ScenarioConfig config) : config_(std::move(config)) {
  barrier_ = compute_barrier(config_.constraints, solve_lyapunov(config_.target.Am, config_.lyapunov_Q()));
  truth_ = resolve_truth(config_);
  nonlinear_ = config_.plant.is_nonlinear();
}

AugmentedState ClosedLoop::initial_state() const {
  AugmentedState s;
  s.t = 0.0;
  s.X = config_.X0;
  s.Xm = config_.target.Xm0;
  s.Xms = config_.target.Xm0;
  s.est = config_.initial;
  if (!has_K1(config_)) s.est.K1_hat.reset();
  return s;
}

Vector ClosedLoop::pack(const AugmentedState& s) const {
  const auto n = config_.dim();
  const bool k1 = s.est.K1_hat.has_value();
  Vector v(4 * n + 1 + (k1 ? n : 0));
  v << s.X, s.Xm, s.Xms, s.est.K_hat, s.est.l_hat, (k1 ? *s.est.K1_hat : Vector(0));
  return v;
}

AugmentedState ClosedLoop::unpack(const Vector& v, double t) const {
  const auto n = config_.dim();
  AugmentedState s;
  s.t = t;
  s.X = v.segment(0, n);
  s.Xm = v.segment(n, n);
  s.Xms = v.segment(2 * n, n);
  s.est.K_hat = v.segment(3 * n, n);
  s.est.l_hat = v(4 * n);
  if (v.size() > 4 * n + 1) s.est.K1_hat = v.segment(4 * n + 1, n);
  return s;
}

ClosedLoop::Evaluation ClosedLoop::evaluate(const AugmentedState& s) const {
  const auto& c = config_;
  Evaluation ev;
  ev.f = eval_reference(c.reference, s.t);
  if (nonlinear_) ev.phi_x = eval_nonlinearity(*c.plant.nonlinearity, s.X);
  const std::optional<Vector>& phi_ctrl = has_K1(c) ? ev.phi_x : std::nullopt;

  const Matrix& P = barrier_.pair.P;
  const double M2 = barrier_.M * barrier_.M;
  const Vector E = s.X - s.Xms;
  if (uses_barrier(c.variant)) {
    const double q = E.dot(P * E);
    if (!(q < M2) && c.integrator.barrier_policy == BarrierPolicy::Soft && std::isfinite(q)) {
      ev.mu = compute_mu(E * (kSoftBarrierRadius * barrier_.M / std::sqrt(q)), P, c.target.Bm, c.bounds.sign_l,
                         barrier_.M);
      ev.mu.fraction = q / M2;
    } else {
      ev.mu = compute_mu(E, P, c.target.Bm, c.bounds.sign_l, barrier_.M);
    }
  } else {
    ev.mu.value = compute_mu_quadratic(E, P, c.target.Bm, c.bounds.sign_l);
    ev.mu.fraction = E.dot(P * E) / M2;
  }

  if (limits_input(c.variant)) {
    ev.decision = constrained_control(s.est, s.X, ev.f, c.constraints.M_u, phi_ctrl);
  } else {
    ev.decision.u_nominal = nominal_control(s.est, s.X, ev.f, phi_ctrl);
    ev.decision.u_applied = ev.decision.u_nominal;
    ev.decision.total_reference = ev.f;
  }
  ev.decision.margin =
      assumption_margin(s.est, s.X, c.constraints.f_M, c.constraints.M_u, c.bounds.sign_l, phi_ctrl);

  const auto n = c.dim();
  const double mu = ev.mu.value;
  const double r = ev.decision.total_reference;
  Vector d(4 * n + 1 + (s.est.K1_hat ? n : 0));
  d.segment(0, n) = plant_deriv(c.plant, s.X, ev.decision.u_applied);
  d.segment(n, n) = target_deriv(c.target, s.Xm, ev.f);
  d.segment(2 * n, n) = target_deriv(c.target, s.Xms, r);
  d.segment(3 * n, n) = k_hat_deriv(s.est.K_hat, mu, s.X, c.gains.gamma_K, c.bounds.M_K);
  d(4 * n) = l_hat_deriv(s.est.l_hat, mu, r, c.gains.gamma_l, c.bounds.m_l, c.bounds.M_l);
  if (s.est.K1_hat) {
    d.segment(4 * n + 1, n) = k1_hat_deriv(*s.est.K1_hat, mu, *ev.phi_x, *c.gains.gamma_K1, *c.bounds.M_K1);
  }
  ev.derivative = std::move(d);
  return ev;
}

AugmentedState ClosedLoop::step(const AugmentedState& s, bool* projected, bool* renormalized) const {
  const double h = config_.integrator.dt;
  const Vector y = pack(s);
  const Vector k1 = evaluate(s).derivative;
  const Vector k2 = evaluate(unpack(y + 0.5 * h * k1, s.t + 0.5 * h)).derivative;
  const Vector k3 = evaluate(unpack(y + 0.5 * h * k2, s.t + 0.5 * h)).derivative;
  const Vector k4 = evaluate(unpack(y + h * k3, s.t + h)).derivative;
  AugmentedState next = unpack(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), s.t + h);

  const bool changed = project_estimates(next.est, config_.bounds);
  if (projected) *projected = changed;

  bool renorm = false;
  if (uses_barrier(config_.variant) && config_.integrator.barrier_policy == BarrierPolicy::Soft) {
    const Vector E = next.X - next.Xms;
    const double q = E.dot(barrier_.pair.P * E);
    if (std::isfinite(q) && !(q < barrier_.M * barrier_.M)) {
      next.Xms = next.X - E * (kSoftBarrierRadius * barrier_.M / std::sqrt(q));
      renorm = true;
    }
  }
  if (renormalized) *renormalized = renorm;
  return next;
}

double ClosedLoop::lyapunov_value(const AugmentedState& s) const {
  if (!truth_ || !uses_barrier(config_.variant)) return std::numeric_limits<double>::quiet_NaN();
  const Vector E = s.X - s.Xms;
  const double M2 = barrier_.M * barrier_.M;
  const double q = E.dot(barrier_.pair.P * E);
  if (!(q < M2)) return std::numeric_limits<double>::infinity();
  const double gamma = 1.0 / std::abs(truth_->l);
  double V = q / (M2 - q);
  V += gamma / (2.0 * config_.gains.gamma_K) * (s.est.K_hat - truth_->K).squaredNorm();
  V += gamma / (2.0 * config_.gains.gamma_l) * (s.est.l_hat - truth_->l) * (s.est.l_hat - truth_->l);
  if (s.est.K1_hat && truth_->K1 && config_.gains.gamma_K1) {
    V += gamma / (2.0 * *config_.gains.gamma_K1) * (*s.est.K1_hat - *truth_->K1).squaredNorm();
  }
  return V;
}

AugmentedState step(const AugmentedState& state, const ScenarioConfig& config) {
  return ClosedLoop(config).step(state);
}

namespace {

/// Streaming form of the summary so runs without a stored trace still report.
class SummaryAccumulator {
 public:
  explicit SummaryAccumulator(const TraceMetadata& meta) : meta_(meta) {
    s_.inf_margin = std::numeric_limits<double>::infinity();
    s_.min_abs_l_hat = std::numeric_limits<double>::infinity();
  }

  void add(const TraceRecord& r) {
    const auto& st = r.state;
    s_.sup_norm_X = std::max(s_.sup_norm_X, r.norm_X);
    s_.sup_abs_u = std::max(s_.sup_abs_u, std::abs(r.decision.u_applied));
    s_.sup_abs_u_nominal = std::max(s_.sup_abs_u_nominal, std::abs(r.decision.u_nominal));
    s_.sup_abs_g = std::max(s_.sup_abs_g, std::abs(r.decision.g));
    s_.sup_abs_total_reference = std::max(s_.sup_abs_total_reference, std::abs(r.decision.total_reference));
    s_.inf_margin = std::min(s_.inf_margin, r.decision.margin);
    s_.sup_norm_Es = std::max(s_.sup_norm_Es, r.norm_Es);
    s_.sup_barrier_fraction = std::max(s_.sup_barrier_fraction, r.barrier_fraction);
    const double dev = (st.Xms - st.Xm).norm();
    s_.sup_target_deviation = std::max(s_.sup_target_deviation, dev);
    if (st.t >= 0.5 * meta_.horizon - 1e-12) s_.final_half_sup_tilde_E = std::max(s_.final_half_sup_tilde_E, dev);
    if (st.t >= 0.9 * meta_.horizon - 1e-12) {
      window_sum_ += r.norm_Es;
      ++window_count_;
    }
    s_.max_norm_K_hat = std::max(s_.max_norm_K_hat, st.est.K_hat.norm());
    s_.min_abs_l_hat = std::min(s_.min_abs_l_hat, std::abs(st.est.l_hat));
    s_.max_abs_l_hat = std::max(s_.max_abs_l_hat, std::abs(st.est.l_hat));
    if (st.est.K1_hat) s_.max_norm_K1_hat = std::max(s_.max_norm_K1_hat.value_or(0.0), st.est.K1_hat->norm());
    if (!(r.norm_X < meta_.M_x)) ++s_.state_violation_samples;
    if (!(std::abs(r.decision.u_applied) <= meta_.M_u + kInputSlack)) ++s_.input_violation_samples;
    if (!(r.decision.margin >= 0.0)) ++s_.margin_violation_samples;
    ++s_.samples;
    s_.end_time = st.t;
  }

  RunSummary finish(bool completed) const {
    RunSummary out = s_;
    out.final_window_mean_Es =
        window_count_ > 0 ? window_sum_ / static_cast<double>(window_count_) : std::numeric_limits<double>::quiet_NaN();
    out.state_constraint_ok = out.samples > 0 && out.state_violation_samples == 0;
    out.input_constraint_ok = out.samples > 0 && out.input_violation_samples == 0;
    out.stability_condition_ok = out.samples > 0 && out.margin_violation_samples == 0;
    out.error_bound_ok = out.samples > 0 && out.sup_norm_Es < meta_.M_e;
    out.completed = completed;
    return out;
  }

 private:
  TraceMetadata meta_;
  RunSummary s_;
  double window_sum_ = 0.0;
  std::size_t window_count_ = 0;
};

/// Onset-only event logging: one event when a condition becomes active.
class EventLog {
 public:
  void observe(std::vector<Event>& out, EventKind kind, bool active, double t, const std::string& detail) {
    auto& was = active_[static_cast<std::size_t>(kind)];
    if (active && !was) out.push_back({t, kind, detail});
    was = active;
  }

 private:
  std::array<bool, 16> active_{};
};

}  // namespace

RunSummary summarize(const SimulationTrace& trace) {
  SummaryAccumulator acc(trace.meta);
  for (const auto& r : trace.records) acc.add(r);
  const long expected = static_cast<long>(std::floor(trace.meta.horizon / trace.meta.dt + 1e-9)) + 1;
  return acc.finish(static_cast<long>(trace.records.size()) == expected);
}

RunResult run(const ScenarioConfig& config, const RunOptions& options) {
  if (!options.force) {
    const auto violations = validate_scenario(config);
    if (!violations.empty()) {
      std::string msg = "scenario '" + config.name + "' failed validation:";
      for (const auto& v : violations) msg += "\n  - " + v.message;
      throw Error(ErrorKind::InvalidScenario, msg);
    }
  }

  const ClosedLoop loop(config);
  const auto& c = loop.config();
  RunResult result;
  auto& meta = result.trace.meta;
  meta.n = c.dim();
  meta.has_K1 = has_K1(c);
  meta.variant = c.variant;
  meta.M_u = c.constraints.M_u;
  meta.M_x = c.constraints.M_x;
  meta.M_e = loop.barrier().M_e;
  meta.M = loop.barrier().M;
  meta.f_M = c.constraints.f_M;
  meta.sign_l = c.bounds.sign_l;
  meta.dt = c.integrator.dt;
  meta.horizon = c.integrator.horizon;

  const long steps = step_count(c.integrator);
  if (options.record_trace) result.trace.records.reserve(static_cast<std::size_t>(steps + 1));
  SummaryAccumulator acc(meta);
  EventLog log;
  auto& events = result.trace.events;

  AugmentedState state = loop.initial_state();
  bool projected = false;
  bool renormalized = false;
  for (long i = 0;; ++i) {
    state.t = static_cast<double>(i) * c.integrator.dt;
    TraceRecord rec;
    try {
      const auto ev = loop.evaluate(state);
      rec.f = ev.f;
      rec.decision = ev.decision;
      rec.mu = ev.mu.value;
      rec.barrier_fraction = ev.mu.fraction;
      log.observe(events, EventKind::BarrierSaturated, ev.mu.floored, state.t, "barrier denominator floor active");
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::BarrierViolated) events.push_back({state.t, EventKind::BarrierViolated, e.what()});
      result.failure = RunFailure{e.kind(), state.t, e.what()};
      break;
    }
    rec.state = state;
    rec.norm_X = state.X.norm();
    rec.norm_Es = (state.X - state.Xms).norm();
    rec.V = loop.lyapunov_value(state);

    const auto& d = rec.decision;
    log.observe(events, EventKind::StateConstraintViolated, !(rec.norm_X < meta.M_x), state.t,
                describe("||X|| = ", rec.norm_X, " >= M_x = ", meta.M_x));
    log.observe(events, EventKind::InputConstraintViolated, !(std::abs(d.u_applied) <= meta.M_u + kInputSlack),
                state.t, describe("|u| = ", std::abs(d.u_applied), " > M_u = ", meta.M_u));
    log.observe(events, EventKind::StabilityConditionViolated, !(d.margin >= 0.0), state.t,
                describe("margin = ", d.margin));
    log.observe(events, EventKind::TargetBoundExceeded, state.Xms.norm() > c.constraints.M_xm, state.t,
                describe("||X_m^s|| = ", state.Xms.norm(), " > M_xm = ", c.constraints.M_xm));
    log.observe(events, EventKind::EstimateProjected, projected, state.t, "estimate pulled back onto its bound");
    log.observe(events, EventKind::SoftBarrierRenormalized, renormalized, state.t,
                "E^s rescaled to 0.999 of the barrier (outside theory)");

    acc.add(rec);
    if (options.record_trace) result.trace.records.push_back(rec);

    if (!(d.margin >= 0.0) && c.integrator.margin_policy == MarginPolicy::Abort) {
      result.failure = RunFailure{ErrorKind::StabilityConditionViolated, state.t, describe("margin = ", d.margin)};
      break;
    }
    if (i == steps) break;

    try {
      state = loop.step(state, &projected, &renormalized);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::BarrierViolated) events.push_back({state.t, EventKind::BarrierViolated, e.what()});
      result.failure = RunFailure{e.kind(), state.t, e.what()};
      break;
    }
    if (!state.X.allFinite() || !state.Xms.allFinite() || !state.est.K_hat.allFinite() ||
        !std::isfinite(state.est.l_hat)) {
      events.push_back({state.t, EventKind::NonFiniteState, "non-finite state after step"});
      result.failure = RunFailure{ErrorKind::NonFiniteState, state.t, "non-finite state after step"};
      break;
    }
  }
  result.summary = acc.finish(!result.failure.has_value());
  return result;
}

}  // namespace cmrac
