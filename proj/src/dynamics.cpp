#include "cmrac/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "cmrac/error.hpp"

namespace cmrac {

std::string_view to_string(Nonlinearity kind) noexcept {
  switch (kind) {
    case Nonlinearity::Tanh: return "tanh";
    case Nonlinearity::Sin: return "sin";
    case Nonlinearity::CosMinusOne: return "cos_minus_one";
    case Nonlinearity::SoftSaturation: return "soft_saturation";
  }
  return "tanh";
}

std::optional<Nonlinearity> nonlinearity_from_string(std::string_view name) noexcept {
  for (auto kind : {Nonlinearity::Tanh, Nonlinearity::Sin, Nonlinearity::CosMinusOne, Nonlinearity::SoftSaturation}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

double apply(Nonlinearity kind, double x) noexcept {
  switch (kind) {
    case Nonlinearity::Tanh: return std::tanh(x);
    case Nonlinearity::Sin: return std::sin(x);
    case Nonlinearity::CosMinusOne: return std::cos(x) - 1.0;
    case Nonlinearity::SoftSaturation: return x / (1.0 + std::abs(x));
  }
  return x;
}

double ReferenceSignalSpec::amplitude_bound() const noexcept {
  if (is_tabulated()) {
    double m = 0.0;
    for (double v : table_f) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = std::abs(offset);
  for (const auto& term : terms) sum += std::abs(term.amplitude);
  return sum;
}

Vector plant_deriv(const PlantModel& plant, const Vector& X, double u) {
  const auto n = plant.dim();
  if (X.size() != n || plant.B.size() != n) throw Error(ErrorKind::DimensionMismatch, "plant state size");
  Vector dx = plant.A * X + plant.B * (plant.lambda * u);
  if (plant.is_nonlinear()) {
    if (plant.A1->rows() != n || plant.A1->cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "A1 size differs from A");
    }
    dx += *plant.A1 * eval_nonlinearity(*plant.nonlinearity, X);
  }
  return dx;
}

Vector target_deriv(const TargetModel& target, const Vector& Xm, double r) {
  if (Xm.size() != target.dim() || target.Bm.size() != target.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "target state size");
  }
  return target.Am * Xm + target.Bm * r;
}

double eval_reference(const ReferenceSignalSpec& spec, double t) {
  if (spec.is_tabulated()) {
    const auto& ts = spec.table_t;
    const auto& fs = spec.table_f;
    if (t <= ts.front()) return fs.front();
    if (t >= ts.back()) return fs.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const auto hi = static_cast<std::size_t>(it - ts.begin());
    const auto lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return fs[lo] + w * (fs[hi] - fs[lo]);
  }
  double f = spec.offset;
  for (const auto& term : spec.terms) f += term.amplitude * std::sin(term.omega * t + term.phase);
  return f;
}

Vector eval_nonlinearity(const NonlinearitySpec& spec, const Vector& X) {
  if (static_cast<Eigen::Index>(spec.components.size()) != X.size()) {
    throw Error(ErrorKind::DimensionMismatch, "nonlinearity arity differs from state size");
  }
  Vector out(X.size());
  for (Eigen::Index i = 0; i < X.size(); ++i) out(i) = apply(spec.components[static_cast<std::size_t>(i)], X(i));
  return out;
}

}  // namespace cmrac
