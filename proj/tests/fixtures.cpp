#include "fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace cmrac::fixtures {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vector random_vector(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

}  // namespace

ScenarioConfig third_order_example() {
  ScenarioConfig c;
  c.name = "third_order_example";
  c.plant.A = Matrix{{-0.5, 1.0, 1.85}, {-1.2, -1.7, -0.6}, {2.5, 0.0, -0.4}};
  c.plant.B = Vector{{0.5, 0.0, 1.0}};
  c.plant.lambda = 0.5;
  c.target.Am = Matrix{{-2.0, 1.5, 1.1}, {-1.2, -1.7, -0.6}, {-0.5, 1.0, -1.9}};
  c.target.Bm = Vector{{0.5, 0.0, 1.0}};
  c.target.Xm0 = Vector{{0.3, -0.2, 0.2}};
  c.X0 = c.target.Xm0;
  c.Q = Matrix::Identity(3, 3);
  c.constraints = {2.0, 3.0, 1.9, 2.4};
  c.bounds = {10.0, 1.0, 4.0, 1, std::nullopt};
  c.gains = {1.0, 0.05, std::nullopt};
  c.initial = {Vector::Constant(3, 0.1), 3.0, std::nullopt};
  c.reference.terms = {{1.4, 2.0, 0.0}, {1.0, 2.5, 0.0}};
  c.integrator.dt = 1e-3;
  c.integrator.horizon = 30.0;
  c.variant = ControllerVariant::StateAndInput;
  return c;
}

Matrix random_hurwitz(std::mt19937_64& rng, int n) {
  for (;;) {
    Matrix A = Matrix::Zero(n, n);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
    }
    A.diagonal().array() -= uniform(rng, 1.0, 3.0);
    if (is_hurwitz(A)) return A;
  }
}

ScenarioConfig random_admissible(std::mt19937_64& rng, int n, double horizon) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    ScenarioConfig c;
    c.name = "random_n" + std::to_string(n);
    c.target.Am = random_hurwitz(rng, n);
    c.plant.B = random_vector(rng, n, 1.0);
    c.plant.B /= c.plant.B.norm();
    c.plant.lambda = (rng() & 1U ? 1.0 : -1.0) * uniform(rng, 0.5, 2.0);
    const double l = (rng() & 1U ? 1.0 : -1.0) * uniform(rng, 0.5, 2.0);
    const Vector K = random_vector(rng, n, 1.5);
    c.plant.A = c.target.Am - c.plant.lambda * c.plant.B * K.transpose();
    c.target.Bm = c.plant.lambda * l * c.plant.B;
    if (!is_controllable(c.plant.A, c.plant.B)) continue;

    c.Q = Matrix::Identity(n, n);
    const auto pair = solve_lyapunov(c.target.Am, c.Q);
    c.target.Xm0 = random_vector(rng, n, 0.2);
    c.constraints.f_M = 1.0;
    const auto ref = verify_reference_bound(c.target, c.constraints.f_M, 1e9, pair, 20.0, 5e-3);
    c.constraints.M_xm = 1.05 * std::max(ref.analytic_bound, ref.empirical_sup);
    const double M_e = uniform(rng, 0.1, 0.3) * c.constraints.M_xm;
    c.constraints.M_x = c.constraints.M_xm + M_e;

    c.bounds.M_K = 1.5 * K.norm() + 1.0;
    c.bounds.m_l = 0.5 * std::abs(l);
    c.bounds.M_l = 2.0 * std::abs(l);
    c.bounds.sign_l = l > 0 ? 1 : -1;
    c.constraints.M_u = uniform(rng, 1.0, 1.5) *
                        (c.bounds.M_K * c.constraints.M_x - c.bounds.m_l * c.constraints.f_M);
    c.gains = {uniform(rng, 0.5, 2.0), uniform(rng, 0.05, 0.5), std::nullopt};

    const double lmin = eig_extrema_sym(pair.P).min;
    const double M = M_e * std::sqrt(lmin);
    const Vector dir = random_vector(rng, n, 1.0).normalized();
    const double q = dir.dot(pair.P * dir);
    c.X0 = c.target.Xm0 + uniform(rng, 0.0, 0.5) * M / std::sqrt(q) * dir;

    Vector K0 = K + random_vector(rng, n, 0.5);
    if (K0.norm() > 0.9 * c.bounds.M_K) K0 *= 0.9 * c.bounds.M_K / K0.norm();
    c.initial = {K0, c.bounds.sign_l * uniform(rng, c.bounds.m_l, c.bounds.M_l), std::nullopt};

    const double a1 = uniform(rng, 0.2, 0.6);
    const double a2 = uniform(rng, 0.1, 1.0 - a1);
    c.reference.terms = {{a1, uniform(rng, 0.3, 3.0), uniform(rng, 0.0, 6.28)},
                         {a2, uniform(rng, 0.3, 3.0), uniform(rng, 0.0, 6.28)}};
    c.integrator.dt = 1e-3;
    c.integrator.horizon = horizon;
    c.variant = ControllerVariant::StateAndInput;
    c.truth = TruthGains{K, l, std::nullopt};
    if (validate_scenario(c).empty()) return c;
  }
  throw std::runtime_error("random_admissible: no admissible draw");
}

ScenarioConfig nonlinear_tanh() {
  ScenarioConfig c;
  c.name = "nonlinear_tanh";
  c.target.Am = Matrix{{0.0, 1.0}, {-2.0, -3.0}};
  c.plant.B = Vector{{0.0, 1.0}};
  c.plant.lambda = 1.0;
  const Vector K{{-3.0, -2.0}};
  const Vector K1{{0.5, -1.0}};
  const double l = 1.0;
  c.plant.A = c.target.Am - c.plant.lambda * c.plant.B * K.transpose();
  c.plant.A1 = Matrix(-c.plant.lambda * c.plant.B * K1.transpose());
  c.plant.nonlinearity = NonlinearitySpec{{Nonlinearity::Tanh, Nonlinearity::Tanh}};
  c.target.Bm = c.plant.lambda * l * c.plant.B;
  c.target.Xm0 = Vector{{0.1, 0.0}};
  c.X0 = Vector{{0.12, -0.01}};
  c.Q = Matrix::Identity(2, 2);
  c.constraints = {0.9, 0.4, 0.7, 1.0};
  c.bounds = {6.0, 0.5, 2.0, 1, 3.0};
  c.gains = {2.0, 0.5, 2.0};
  c.initial = {Vector::Zero(2), 1.5, Vector(Vector::Zero(2))};
  c.reference.terms = {{0.6, 1.0, 0.0}, {0.3, 3.0, 0.0}};
  c.integrator.dt = 1e-3;
  c.integrator.horizon = 60.0;
  c.variant = ControllerVariant::NonlinearStateAndInput;
  c.truth = TruthGains{K, l, K1};
  return c;
}

}  // namespace cmrac::fixtures
