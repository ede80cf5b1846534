#pragma once

#include <optional>

#include "cmrac/matrix_core.hpp"

namespace cmrac {

/// Relative width of the projection boundary band.
inline constexpr double kBoundaryBand = 1e-9;
/// Floor on (M^2 - E^T P E)^2 in the barrier gradient.
inline constexpr double kBarrierFloor = 1e-12;

struct EstimateState {
  Vector K_hat;
  double l_hat = 1.0;
  std::optional<Vector> K1_hat;
};

struct AdaptationGains {
  double gamma_K = 1.0;
  double gamma_l = 1.0;
  std::optional<double> gamma_K1;
};

struct ProjectionBounds {
  double M_K = 1.0;
  double m_l = 1.0;
  double M_l = 1.0;
  int sign_l = 1;
  std::optional<double> M_K1;
};

struct BarrierGradient {
  double value = 0.0;
  double fraction = 0.0;   // E^T P E / M^2
  bool floored = false;    // denominator floor was active
};

/**
 * mu = 2 M^2 E^T P B_m sign_l / (M^2 - E^T P E)^2.
 *
 * Throws BarrierViolated when E^T P E >= M^2. The denominator is floored at
 * kBarrierFloor and `floored` reports when that happens.
 */
[[nodiscard]] BarrierGradient compute_mu(const Vector& E, const Matrix& P, const Vector& Bm, int sign_l, double M);

/// Quadratic-Lyapunov gradient 2 E^T P B_m sign_l (no barrier factor).
[[nodiscard]] double compute_mu_quadratic(const Vector& E, const Matrix& P, const Vector& Bm, int sign_l);

/// -gamma mu X with tangential projection when ||K_hat|| sits on the M_K sphere and flow points outward.
[[nodiscard]] Vector k_hat_deriv(const Vector& K_hat, double mu, const Vector& X, double gamma_K, double M_K);

/// -gamma mu r, frozen at the m_l / M_l bands when the flow would leave [m_l, M_l].
[[nodiscard]] double l_hat_deriv(double l_hat, double mu, double r, double gamma_l, double m_l, double M_l);

/// Same projection law as k_hat_deriv, driven by Phi(X) and bounded by M_K1.
[[nodiscard]] Vector k1_hat_deriv(const Vector& K1_hat, double mu, const Vector& phi_x, double gamma_K1, double M_K1);

/**
 * Post-step cleanup for discrete-time drift: radially rescales K_hat (and
 * K1_hat) back onto their spheres and clamps |l_hat| into [m_l, M_l] with the
 * sign fixed to sign_l. Returns true if anything was changed.
 */
bool project_estimates(EstimateState& est, const ProjectionBounds& bounds);

}  // namespace cmrac
