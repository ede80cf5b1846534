#include "cmrac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "cmrac/error.hpp"

namespace cmrac {

Matrix ScenarioConfig::lyapunov_Q() const {
  if (Q.size() == 0) return Matrix::Identity(dim(), dim());
  return Q;
}

BarrierSpec compute_barrier(const ConstraintSpec& constraints, const LyapunovPair& pair) {
  if (!(constraints.M_xm < constraints.M_x)) {
    std::ostringstream os;
    os << "M_xm = " << constraints.M_xm << " must be below M_x = " << constraints.M_x;
    throw Error(ErrorKind::InfeasibleConstraint, os.str());
  }
  const double lmin = eig_extrema_sym(pair.P).min;
  if (lmin <= 0.0) throw Error(ErrorKind::NotPositiveDefinite, "P must be positive definite");
  BarrierSpec b;
  b.M_e = constraints.M_x - constraints.M_xm;
  b.M = b.M_e * std::sqrt(lmin);
  b.pair = pair;
  return b;
}

CheckReport verify_offline_stability(const ProjectionBounds& bounds, const ConstraintSpec& constraints) {
  CheckReport r;
  r.name = "offline stability condition";
  r.lhs = constraints.M_u;
  r.rhs = bounds.M_K * constraints.M_x - bounds.m_l * constraints.f_M;
  r.pass = r.lhs >= r.rhs;
  std::ostringstream os;
  os << "M_u = " << r.lhs << (r.pass ? " >= " : " < ") << "M_K*M_x - m_l*f_M = " << r.rhs;
  r.detail = os.str();
  return r;
}

namespace {

double target_sup_norm(const TargetModel& target, double horizon, double dt,
                       const std::function<double(double, const Vector&)>& input) {
  Vector x = target.Xm0;
  double sup = x.norm();
  const auto steps = static_cast<long>(std::floor(horizon / dt + 1e-9));
  auto deriv = [&](double t, const Vector& s) { return target_deriv(target, s, input(t, s)); };
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Vector k1 = deriv(t, x);
    const Vector k2 = deriv(t + dt / 2, x + dt / 2 * k1);
    const Vector k3 = deriv(t + dt / 2, x + dt / 2 * k2);
    const Vector k4 = deriv(t + dt, x + dt * k3);
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    sup = std::max(sup, x.norm());
  }
  return sup;
}

}  // namespace

ReferenceBoundReport verify_reference_bound(const TargetModel& target, double f_M, double M_xm,
                                            const LyapunovPair& pair_m, double horizon, double dt) {
  if (!is_hurwitz(target.Am)) throw Error(ErrorKind::NotHurwitz, "target matrix A_m is not Hurwitz");
  ReferenceBoundReport rep;
  rep.M_xm = M_xm;

  const auto ep = eig_extrema_sym(pair_m.P);
  const double qmin = eig_extrema_sym(pair_m.Q).min;
  const double ultimate = 2.0 * (pair_m.P * target.Bm).norm() * f_M / qmin;
  rep.analytic_bound = std::sqrt(ep.max / ep.min) * std::max(target.Xm0.norm(), ultimate);
  rep.analytic_pass = rep.analytic_bound <= M_xm;

  std::vector<std::function<double(double, const Vector&)>> dithers;
  dithers.emplace_back([f_M](double, const Vector&) { return f_M; });
  dithers.emplace_back([f_M](double, const Vector&) { return -f_M; });
  for (double half_period : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    dithers.emplace_back([f_M, half_period](double t, const Vector&) {
      return static_cast<long>(std::floor(t / half_period)) % 2 == 0 ? f_M : -f_M;
    });
  }
  const Vector PBm = pair_m.P * target.Bm;
  dithers.emplace_back([f_M, PBm](double, const Vector& x) { return PBm.dot(x) >= 0.0 ? f_M : -f_M; });

  for (const auto& d : dithers) rep.empirical_sup = std::max(rep.empirical_sup, target_sup_norm(target, horizon, dt, d));
  rep.empirical_pass = rep.empirical_sup <= M_xm;
  return rep;
}

std::optional<TruthGains> resolve_truth(const ScenarioConfig& config) {
  if (config.truth) return config.truth;
  try {
    const auto m = derive_matching_gains(config.plant.A, config.target.Am, config.plant.B, config.plant.lambda,
                                         config.target.Bm);
    TruthGains t{m.K, m.l, std::nullopt};
    if (config.plant.A1) t.K1 = derive_nonlinear_gain(*config.plant.A1, config.plant.B, config.plant.lambda);
    return t;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<Violation> validate_scenario(const ScenarioConfig& c) {
  std::vector<Violation> out;
  auto add = [&out](ViolationCode code, const std::string& msg) { out.push_back({code, msg}); };
  auto fmt = [](auto&&... parts) {
    std::ostringstream os;
    os.precision(15);
    (os << ... << parts);
    return os.str();
  };

  const auto n = c.plant.A.rows();
  const bool dims_ok = n > 0 && c.plant.A.cols() == n && c.plant.B.size() == n && c.target.Am.rows() == n &&
                       c.target.Am.cols() == n && c.target.Bm.size() == n && c.target.Xm0.size() == n &&
                       c.X0.size() == n && c.initial.K_hat.size() == n &&
                       (c.Q.size() == 0 || (c.Q.rows() == n && c.Q.cols() == n));
  if (!dims_ok) {
    add(ViolationCode::Dimension, "plant, target, initial state and estimate dimensions are inconsistent");
    return out;
  }
  const bool finite = c.plant.A.allFinite() && c.plant.B.allFinite() && std::isfinite(c.plant.lambda) &&
                      c.target.Am.allFinite() && c.target.Bm.allFinite() && c.target.Xm0.allFinite() &&
                      c.X0.allFinite() && c.initial.K_hat.allFinite() && std::isfinite(c.initial.l_hat);
  if (!finite) {
    add(ViolationCode::NonFinite, "non-finite entries in the scenario");
    return out;
  }

  const auto& k = c.constraints;
  if (!(k.M_x > 0 && k.M_u > 0 && k.M_xm > 0 && k.f_M > 0)) {
    add(ViolationCode::NonPositiveConstraint, "M_x, M_u, M_xm and f_M must all be positive");
  }
  if (!(k.M_xm < k.M_x)) add(ViolationCode::InfeasibleConstraint, fmt("M_xm = ", k.M_xm, " is not below M_x = ", k.M_x));

  const auto& b = c.bounds;
  if (!(b.M_K > 0 && b.m_l > 0 && b.m_l <= b.M_l)) {
    add(ViolationCode::BoundsOrder, "projection bounds need M_K > 0 and 0 < m_l <= M_l");
  }
  if (b.sign_l != 1 && b.sign_l != -1) add(ViolationCode::BadSign, "sign_l must be +1 or -1");
  if (!(c.gains.gamma_K > 0 && c.gains.gamma_l > 0)) add(ViolationCode::NonPositiveGain, "Gamma_K and Gamma_l must be positive");
  if (c.plant.lambda == 0.0) add(ViolationCode::MatchingViolated, "lambda must be nonzero");

  const double kn = c.initial.K_hat.norm();
  if (kn > b.M_K * (1 + kBoundaryBand)) add(ViolationCode::InitialKHat, fmt("||K_hat(0)|| = ", kn, " exceeds M_K = ", b.M_K));
  const double ln = std::abs(c.initial.l_hat);
  if (ln < b.m_l * (1 - kBoundaryBand)) add(ViolationCode::InitialLHat, fmt("initial l_hat below m_l (|l_hat(0)| = ", ln, ", m_l = ", b.m_l, ")"));
  if (ln > b.M_l * (1 + kBoundaryBand)) add(ViolationCode::InitialLHat, fmt("initial l_hat above M_l (|l_hat(0)| = ", ln, ", M_l = ", b.M_l, ")"));
  if ((c.initial.l_hat > 0 ? 1 : -1) != b.sign_l) add(ViolationCode::InitialLHatSign, "sign(l_hat(0)) differs from sign_l");

  const bool ds = c.integrator.dt > 0 && c.integrator.horizon > 0 && c.integrator.dt <= c.integrator.horizon;
  if (!ds) add(ViolationCode::Integrator, "need 0 < dt <= horizon");

  if (c.target.Xm0.norm() > k.M_xm) {
    add(ViolationCode::InitialTargetNorm, fmt("||X_m0|| = ", c.target.Xm0.norm(), " exceeds M_xm = ", k.M_xm));
  }
  if (!c.reference.is_tabulated() && c.reference.amplitude_bound() > k.f_M) {
    add(ViolationCode::ReferenceAmplitude,
        fmt("reference amplitude bound ", c.reference.amplitude_bound(), " exceeds f_M = ", k.f_M));
  }
  if (c.reference.is_tabulated() && c.reference.table_t.size() != c.reference.table_f.size()) {
    add(ViolationCode::ReferenceAmplitude, "tabulated reference has mismatched time/value lengths");
  }

  const bool hurwitz = is_hurwitz(c.target.Am);
  if (!hurwitz) add(ViolationCode::NotHurwitz, "target matrix A_m is not Hurwitz");

  const Matrix Q = c.lyapunov_Q();
  bool q_ok = false;
  try {
    q_ok = eig_extrema_sym(Q).min > 0.0;
  } catch (const Error&) {
  }
  if (!q_ok) add(ViolationCode::QNotPositiveDefinite, "Q must be symmetric positive definite");

  if (hurwitz && q_ok && k.M_xm < k.M_x && uses_barrier(c.variant)) {
    try {
      const auto barrier = compute_barrier(k, solve_lyapunov(c.target.Am, Q));
      const Vector e0 = c.X0 - c.target.Xm0;
      const double q0 = e0.dot(barrier.pair.P * e0);
      if (!(q0 < barrier.M * barrier.M)) {
        add(ViolationCode::InitialBarrier, fmt("E(0)^T P E(0) = ", q0, " is not below M^2 = ", barrier.M * barrier.M));
      }
    } catch (const Error& e) {
      add(ViolationCode::NotHurwitz, e.what());
    }
  }

  if (!is_controllable(c.plant.A, c.plant.B * c.plant.lambda)) {
    add(ViolationCode::NotControllable, "(A, B*lambda) is not controllable");
  }

  std::optional<TruthGains> truth;
  try {
    if (c.truth) {
      truth = c.truth;
    } else {
      const auto m = derive_matching_gains(c.plant.A, c.target.Am, c.plant.B, c.plant.lambda, c.target.Bm);
      truth = TruthGains{m.K, m.l, std::nullopt};
      if (c.plant.A1) truth->K1 = derive_nonlinear_gain(*c.plant.A1, c.plant.B, c.plant.lambda);
    }
  } catch (const Error& e) {
    add(ViolationCode::MatchingViolated, e.what());
  }
  if (truth) {
    if (truth->K.norm() > b.M_K) add(ViolationCode::TrueGainOutOfBounds, fmt("||K|| = ", truth->K.norm(), " exceeds M_K = ", b.M_K));
    const double al = std::abs(truth->l);
    if (al < b.m_l || al > b.M_l) add(ViolationCode::TrueGainOutOfBounds, fmt("|l| = ", al, " outside [m_l, M_l]"));
    if ((truth->l > 0 ? 1 : -1) != b.sign_l) add(ViolationCode::TrueGainOutOfBounds, "sign(l) differs from sign_l");
    if (truth->K1 && b.M_K1 && truth->K1->norm() > *b.M_K1) {
      add(ViolationCode::TrueGainOutOfBounds, fmt("||K1|| = ", truth->K1->norm(), " exceeds M_K1 = ", *b.M_K1));
    }
  }

  if (c.variant == ControllerVariant::NonlinearStateAndInput) {
    const bool complete = c.plant.is_nonlinear() && b.M_K1 && c.gains.gamma_K1 && c.initial.K1_hat &&
                          static_cast<Eigen::Index>(c.plant.nonlinearity->components.size()) == n &&
                          c.initial.K1_hat->size() == n;
    if (!complete) {
      add(ViolationCode::NonlinearIncomplete, "nonlinear variant requires A1, Phi, M_K1, Gamma_K1 and K1_hat(0)");
    } else {
      if (*c.gains.gamma_K1 <= 0) add(ViolationCode::NonPositiveGain, "Gamma_K1 must be positive");
      if (c.initial.K1_hat->norm() > *b.M_K1 * (1 + kBoundaryBand)) {
        add(ViolationCode::InitialK1Hat, fmt("||K1_hat(0)|| = ", c.initial.K1_hat->norm(), " exceeds M_K1"));
      }
    }
  } else if (c.plant.is_nonlinear()) {
    add(ViolationCode::NonlinearIncomplete, "plant has a nonlinear term but the variant ignores it");
  }
  return out;
}

}  // namespace cmrac
