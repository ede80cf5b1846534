#include "cmrac/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmrac/error.hpp"

namespace cmrac {

BarrierGradient compute_mu(const Vector& E, const Matrix& P, const Vector& Bm, int sign_l, double M) {
  if (E.size() != P.rows() || Bm.size() != P.rows()) throw Error(ErrorKind::DimensionMismatch, "mu operands");
  const double M2 = M * M;
  const double q = E.dot(P * E);
  if (!(q < M2)) {
    std::ostringstream os;
    os << "E^T P E = " << q << " >= M^2 = " << M2;
    throw Error(ErrorKind::BarrierViolated, os.str());
  }
  BarrierGradient out;
  out.fraction = q / M2;
  double denom = (M2 - q) * (M2 - q);
  if (denom < kBarrierFloor) {
    denom = kBarrierFloor;
    out.floored = true;
  }
  out.value = 2.0 * M2 * E.dot(P * Bm) * static_cast<double>(sign_l) / denom;
  return out;
}

double compute_mu_quadratic(const Vector& E, const Matrix& P, const Vector& Bm, int sign_l) {
  if (E.size() != P.rows() || Bm.size() != P.rows()) throw Error(ErrorKind::DimensionMismatch, "mu operands");
  return 2.0 * E.dot(P * Bm) * static_cast<double>(sign_l);
}

namespace {

Vector projected_gradient(const Vector& theta, double mu, const Vector& regressor, double gamma, double bound) {
  if (theta.size() != regressor.size()) throw Error(ErrorKind::DimensionMismatch, "estimate/regressor size");
  Vector v = -gamma * mu * regressor;
  const double norm2 = theta.squaredNorm();
  const bool on_boundary = std::sqrt(norm2) >= bound - kBoundaryBand * bound;
  // Outward flow means mu * regressor^T theta < 0.
  if (on_boundary && norm2 > 0.0 && mu * regressor.dot(theta) < 0.0) {
    v -= theta * (theta.dot(v) / norm2);
  }
  return v;
}

}  // namespace

Vector k_hat_deriv(const Vector& K_hat, double mu, const Vector& X, double gamma_K, double M_K) {
  return projected_gradient(K_hat, mu, X, gamma_K, M_K);
}

Vector k1_hat_deriv(const Vector& K1_hat, double mu, const Vector& phi_x, double gamma_K1, double M_K1) {
  return projected_gradient(K1_hat, mu, phi_x, gamma_K1, M_K1);
}

double l_hat_deriv(double l_hat, double mu, double r, double gamma_l, double m_l, double M_l) {
  const double drive = mu * r * l_hat;
  const double mag = std::abs(l_hat);
  if (mag <= m_l + kBoundaryBand * m_l && drive > 0.0) return 0.0;
  if (mag >= M_l - kBoundaryBand * M_l && drive < 0.0) return 0.0;
  return -gamma_l * mu * r;
}

bool project_estimates(EstimateState& est, const ProjectionBounds& bounds) {
  bool changed = false;
  auto rescale = [&changed](Vector& theta, double bound) {
    const double norm = theta.norm();
    if (norm > bound + kBoundaryBand * bound) {
      theta *= bound / norm;
      changed = true;
    }
  };
  rescale(est.K_hat, bounds.M_K);
  if (est.K1_hat && bounds.M_K1) rescale(*est.K1_hat, *bounds.M_K1);

  const double mag = std::clamp(std::abs(est.l_hat), bounds.m_l, bounds.M_l);
  const double fixed = static_cast<double>(bounds.sign_l) * mag;
  if (fixed != est.l_hat && std::abs(fixed - est.l_hat) > kBoundaryBand * bounds.m_l) {
    est.l_hat = fixed;
    changed = true;
  }
  return changed;
}

}  // namespace cmrac
