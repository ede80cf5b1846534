#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cmrac/matrix_core.hpp"

namespace cmrac {

/// Elementwise globally Lipschitz primitives (all with constant <= 1).
enum class Nonlinearity {
  Tanh,
  Sin,
  CosMinusOne,   // cos(x) - 1
  SoftSaturation // x / (1 + |x|)
};

[[nodiscard]] std::string_view to_string(Nonlinearity kind) noexcept;
[[nodiscard]] std::optional<Nonlinearity> nonlinearity_from_string(std::string_view name) noexcept;

[[nodiscard]] double apply(Nonlinearity kind, double x) noexcept;

struct NonlinearitySpec {
  std::vector<Nonlinearity> components;  // one per state
};

/// Xdot = A X + A1 Phi(X) + B lambda u. The nonlinear term is optional.
struct PlantModel {
  Matrix A;
  Vector B;
  double lambda = 1.0;
  std::optional<Matrix> A1;
  std::optional<NonlinearitySpec> nonlinearity;

  [[nodiscard]] Eigen::Index dim() const noexcept { return A.rows(); }
  [[nodiscard]] bool is_nonlinear() const noexcept { return A1.has_value() && nonlinearity.has_value(); }
};

/// Xm_dot = A_m X_m + B_m r; serves both the original and the modified target.
struct TargetModel {
  Matrix Am;
  Vector Bm;
  Vector Xm0;

  [[nodiscard]] Eigen::Index dim() const noexcept { return Am.rows(); }
};

struct SinusoidTerm {
  double amplitude = 0.0;
  double omega = 0.0;  // rad/s
  double phase = 0.0;  // rad
};

/**
 * f(t) = sum_i a_i sin(w_i t + phi_i) + c, optionally replaced by a tabulated
 * signal (linear interpolation, held at the end points). Tabulated signals
 * carry no amplitude guarantee and are flagged as unchecked.
 */
struct ReferenceSignalSpec {
  std::vector<SinusoidTerm> terms;
  double offset = 0.0;
  std::vector<double> table_t;
  std::vector<double> table_f;

  [[nodiscard]] bool is_tabulated() const noexcept { return !table_t.empty(); }
  /// Closed-form sup bound sum|a_i| + |c|; for tables, the max |sample|.
  [[nodiscard]] double amplitude_bound() const noexcept;
};

[[nodiscard]] Vector plant_deriv(const PlantModel& plant, const Vector& X, double u);
[[nodiscard]] Vector target_deriv(const TargetModel& target, const Vector& Xm, double r);
[[nodiscard]] double eval_reference(const ReferenceSignalSpec& spec, double t);
[[nodiscard]] Vector eval_nonlinearity(const NonlinearitySpec& spec, const Vector& X);

}  // namespace cmrac
