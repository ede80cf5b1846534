#include "cmrac/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmrac/error.hpp"

namespace cmrac {

std::string_view to_string(ControllerVariant v) noexcept {
  switch (v) {
    case ControllerVariant::StateOnly: return "state_only";
    case ControllerVariant::StateAndInput: return "state_and_input";
    case ControllerVariant::NonlinearStateAndInput: return "nonlinear_state_and_input";
    case ControllerVariant::BaselineMrac: return "baseline_mrac";
  }
  return "state_and_input";
}

std::optional<ControllerVariant> variant_from_string(std::string_view name) noexcept {
  for (auto v : {ControllerVariant::StateOnly, ControllerVariant::StateAndInput,
                 ControllerVariant::NonlinearStateAndInput, ControllerVariant::BaselineMrac}) {
    if (to_string(v) == name) return v;
  }
  if (name == "baseline") return ControllerVariant::BaselineMrac;
  return std::nullopt;
}

bool uses_barrier(ControllerVariant v) noexcept { return v != ControllerVariant::BaselineMrac; }

bool limits_input(ControllerVariant v) noexcept {
  return v == ControllerVariant::StateAndInput || v == ControllerVariant::NonlinearStateAndInput;
}

std::string_view to_string(SaturationMode m) noexcept {
  switch (m) {
    case SaturationMode::Unsaturated: return "unsaturated";
    case SaturationMode::SatHigh: return "sat_high";
    case SaturationMode::SatLow: return "sat_low";
  }
  return "unsaturated";
}

namespace {

double feedback_term(const EstimateState& est, const Vector& X, const std::optional<Vector>& phi_x) {
  if (est.K_hat.size() != X.size()) throw Error(ErrorKind::DimensionMismatch, "K_hat and X differ in size");
  double fb = est.K_hat.dot(X);
  if (phi_x && est.K1_hat) {
    if (est.K1_hat->size() != phi_x->size()) throw Error(ErrorKind::DimensionMismatch, "K1_hat and Phi(X)");
    fb += est.K1_hat->dot(*phi_x);
  }
  return fb;
}

}  // namespace

double nominal_control(const EstimateState& est, const Vector& X, double f, const std::optional<Vector>& phi_x) {
  return feedback_term(est, X, phi_x) + est.l_hat * f;
}

double reference_modification(double u_nominal, double M_u, double l_hat) {
  if (u_nominal >= M_u) return (M_u - u_nominal) / l_hat;
  if (u_nominal <= -M_u) return (-M_u - u_nominal) / l_hat;
  return 0.0;
}

ControlDecision constrained_control(const EstimateState& est, const Vector& X, double f, double M_u,
                                    const std::optional<Vector>& phi_x) {
  ControlDecision d;
  d.u_nominal = nominal_control(est, X, f, phi_x);
  d.g = reference_modification(d.u_nominal, M_u, est.l_hat);
  d.total_reference = f + d.g;
  if (d.u_nominal >= M_u) {
    d.mode = SaturationMode::SatHigh;
    d.u_applied = M_u;
  } else if (d.u_nominal <= -M_u) {
    d.mode = SaturationMode::SatLow;
    d.u_applied = -M_u;
  } else {
    d.u_applied = d.u_nominal;
  }

  const double algebraic = d.u_nominal + est.l_hat * d.g;
  const double scale = std::max({1.0, std::abs(d.u_nominal), M_u});
  if (!(std::abs(algebraic - d.u_applied) <= 1e-12 * scale)) {
    std::ostringstream os;
    os << "u + l_hat*g = " << algebraic << " but clamp(u) = " << d.u_applied;
    throw Error(ErrorKind::IdentityViolated, os.str());
  }
  return d;
}

double assumption_margin(const EstimateState& est, const Vector& X, double f_M, double M_u, int sign_l,
                         const std::optional<Vector>& phi_x) {
  return M_u - (std::abs(feedback_term(est, X, phi_x)) - est.l_hat * static_cast<double>(sign_l) * f_M);
}

double baseline_control(const EstimateState& est, const Vector& X, double f) {
  return nominal_control(est, X, f, std::nullopt);
}

double g_sup_bound(double f_M, double M_u, double m_l, double M_K, double M_x, double M_l) noexcept {
  const double C = M_K * M_x + M_l * f_M;
  return std::min(2.0 * f_M, std::max((C - M_u) / m_l, 0.0));
}

}  // namespace cmrac
