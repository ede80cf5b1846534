#pragma once

#include <optional>
#include <string_view>

#include "cmrac/adaptation.hpp"
#include "cmrac/matrix_core.hpp"

namespace cmrac {

enum class ControllerVariant {
  StateOnly,                // barrier MRAC, no input constraint handling
  StateAndInput,            // barrier MRAC + reference modification g
  NonlinearStateAndInput,   // as above with the K1_hat^T Phi(X) term
  BaselineMrac,             // quadratic-Lyapunov MRAC, no barrier, no g
};

[[nodiscard]] std::string_view to_string(ControllerVariant v) noexcept;
[[nodiscard]] std::optional<ControllerVariant> variant_from_string(std::string_view name) noexcept;
[[nodiscard]] bool uses_barrier(ControllerVariant v) noexcept;
[[nodiscard]] bool limits_input(ControllerVariant v) noexcept;

enum class SaturationMode { Unsaturated, SatHigh, SatLow };

[[nodiscard]] std::string_view to_string(SaturationMode m) noexcept;

struct ControlDecision {
  double u_nominal = 0.0;
  double g = 0.0;
  double u_applied = 0.0;
  double total_reference = 0.0;  // f + g, drives the modified target and l_hat
  double margin = 0.0;           // online stability-condition margin
  SaturationMode mode = SaturationMode::Unsaturated;
};

/// K_hat^T X + l_hat f (+ K1_hat^T Phi(X) when both are present).
[[nodiscard]] double nominal_control(const EstimateState& est, const Vector& X, double f,
                                     const std::optional<Vector>& phi_x = std::nullopt);

/// Three-branch reference modification; |u| == M_u goes to the saturating branch.
[[nodiscard]] double reference_modification(double u_nominal, double M_u, double l_hat);

/**
 * Nominal control, modification g and applied input u^s = u + l_hat g.
 * u_applied equals clamp(u_nominal, -M_u, M_u) bit-exactly; the algebraic
 * route u + l_hat g is checked against it (IdentityViolated on mismatch).
 * `margin` is left at zero; see assumption_margin.
 */
[[nodiscard]] ControlDecision constrained_control(const EstimateState& est, const Vector& X, double f, double M_u,
                                                  const std::optional<Vector>& phi_x = std::nullopt);

/// M_u - (|K_hat^T X (+ K1_hat^T Phi)| - l_hat sign_l f_M); >= 0 iff the condition holds now.
[[nodiscard]] double assumption_margin(const EstimateState& est, const Vector& X, double f_M, double M_u, int sign_l,
                                       const std::optional<Vector>& phi_x = std::nullopt);

/// Conventional MRAC input: same structural law as nominal_control, never modified.
[[nodiscard]] double baseline_control(const EstimateState& est, const Vector& X, double f);

/// Worst-case |g| bound min(2 f_M, max((C - M_u)/m_l, 0)) with C = M_K M_x + M_l f_M.
[[nodiscard]] double g_sup_bound(double f_M, double M_u, double m_l, double M_K, double M_x, double M_l) noexcept;

}  // namespace cmrac
