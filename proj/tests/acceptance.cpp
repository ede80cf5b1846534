// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cmrac/batch.hpp"
#include "cmrac/controller.hpp"
#include "cmrac/matrix_core.hpp"
#include "cmrac/simulator.hpp"
#include "fixtures.hpp"

using namespace cmrac;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome example_thresholds() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run(fixtures::third_order_example());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& s = r.summary;
  const double M_e = r.trace.meta.M_e;
  const bool pass = !r.failure && s.samples == 30001 && s.sup_norm_X < 2.0 && s.sup_abs_u <= 3.0 + 1e-9 &&
                    s.inf_margin >= 0.0 && s.sup_norm_Es < M_e && s.final_window_mean_Es < 1e-2 && secs < 5.0;
  return {pass, "sup||X|| = " + g6(s.sup_norm_X) + " < 2, sup|u| = " + g6(s.sup_abs_u) + " <= 3, inf margin = " +
                    g6(s.inf_margin) + " >= 0, sup||E^s|| = " + g6(s.sup_norm_Es) + " < " + g6(M_e) +
                    ", final mean ||E^s|| = " + g6(s.final_window_mean_Es) + " < 0.01, runtime " + g6(secs) + " s"};
}

Outcome baseline_contrast() {
  auto proposed = fixtures::third_order_example();
  auto baseline = proposed;
  baseline.variant = ControllerVariant::BaselineMrac;
  const std::vector<ScenarioConfig> configs{proposed, baseline};
  const auto rs = run_batch(configs, {false, false});
  const auto& b = rs[1].summary;
  const bool violates = b.sup_abs_u > 3.0 || b.sup_norm_X > 2.0;
  return {violates && !rs[1].failure, "baseline sup|u| = " + g6(b.sup_abs_u) + ", sup||X|| = " + g6(b.sup_norm_X) +
                                          " (" + std::to_string(b.input_violation_samples) + " input / " +
                                          std::to_string(b.state_violation_samples) + " state violation samples)"};
}

Outcome mu_sweep() {
  const auto config = fixtures::third_order_example();
  const std::vector<double> values{3.0, 3.5, 7.0, 14.0};
  const auto entries = sweep_Mu(config, values, {false, false});

  auto unmodified = config;
  unmodified.variant = ControllerVariant::StateOnly;
  const double threshold = run(unmodified, {false, false}).summary.sup_abs_u;

  bool pass = true;
  bool reached = false;
  std::string detail = "deviation:";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const double d = e.result.summary.sup_target_deviation;
    detail += " M_u=" + g6(e.M_u) + " -> " + g6(d) + ";";
    if (e.result.failure) pass = false;
    if (i > 0 && d > 1.05 * entries[i - 1].result.summary.sup_target_deviation) pass = false;
    if (e.M_u >= threshold) {
      reached = true;
      if (d != 0.0) pass = false;
    }
  }
  return {pass && reached, detail + " g-free threshold sup|u_unmodified| = " + g6(threshold)};
}

Outcome barrier_invariant() {
  std::mt19937_64 rng(20240521);
  std::vector<ScenarioConfig> configs;
  for (int i = 0; i < 50; ++i) configs.push_back(fixtures::random_admissible(rng, 2 + i % 3));
  const auto rs = run_batch(configs, {false, false});
  int aborts = 0;
  int other = 0;
  int bound = 0;
  double worst_fraction = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto& r = rs[i];
    const auto& b = configs[i].bounds;
    if (r.failure) (r.failure->kind == ErrorKind::BarrierViolated ? aborts : other)++;
    const auto& s = r.summary;
    if (s.max_norm_K_hat > b.M_K + 1e-6 || s.min_abs_l_hat < b.m_l - 1e-6 || s.max_abs_l_hat > b.M_l + 1e-6) ++bound;
    worst_fraction = std::max(worst_fraction, s.sup_barrier_fraction);
  }
  return {aborts == 0 && other == 0 && bound == 0,
          std::to_string(aborts) + " barrier aborts, " + std::to_string(other) + " other failures, " +
              std::to_string(bound) + " estimate-bound breaches over 50 runs; max E'PE/M^2 = " + g6(worst_fraction)};
}

Outcome saturation_identity() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  long mismatches = 0;
  long bound_failures = 0;
  long margin_ok = 0;
  long saturated = 0;
  for (int k = 0; k < 100000; ++k) {
    const int n = 2 + k % 3;
    const double f_M = 0.5 + 2.0 * std::abs(unit(rng));
    const double m_l = 0.2 + std::abs(unit(rng));
    const double M_l = m_l * (1.0 + 3.0 * std::abs(unit(rng)));
    const int sign_l = unit(rng) > 0 ? 1 : -1;
    EstimateState est;
    est.K_hat = Vector(n);
    for (int i = 0; i < n; ++i) est.K_hat(i) = 5.0 * unit(rng);
    est.l_hat = sign_l * (m_l + (M_l - m_l) * std::abs(unit(rng)));
    Vector X(n);
    for (int i = 0; i < n; ++i) X(i) = 2.0 * unit(rng);
    const double f = f_M * unit(rng);
    const double M_u = 0.1 + 8.0 * std::abs(unit(rng));

    const auto d = constrained_control(est, X, f, M_u);
    if (d.u_applied != std::clamp(d.u_nominal, -M_u, M_u)) ++mismatches;
    if (d.mode != SaturationMode::Unsaturated) ++saturated;
    if (assumption_margin(est, X, f_M, M_u, sign_l) >= 0.0) {
      ++margin_ok;
      if (std::abs(f + d.g) > f_M + 1e-12) ++bound_failures;
    }
  }
  return {mismatches == 0 && bound_failures == 0 && margin_ok > 0 && saturated > 0,
          std::to_string(mismatches) + " clamp mismatches, " + std::to_string(bound_failures) + " |f+g| > f_M among " +
              std::to_string(margin_ok) + " margin-satisfying tuples (" + std::to_string(saturated) + " saturated)"};
}

Outcome lyapunov_decrease() {
  std::vector<ScenarioConfig> configs;
  for (double M_u : {3.0, 3.5, 7.0, 14.0}) {
    auto c = fixtures::third_order_example();
    c.constraints.M_u = M_u;
    configs.push_back(c);
  }
  std::mt19937_64 rng(99);
  for (int i = 0; i < 6; ++i) configs.push_back(fixtures::random_admissible(rng, 2 + i % 3));
  const auto rs = run_batch(configs, {false, true});
  double worst = 0.0;
  int bad = 0;
  for (const auto& r : rs) {
    if (r.failure || r.trace.records.empty()) {
      ++bad;
      continue;
    }
    const double V0 = r.trace.records.front().V;
    double rise = 0.0;
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
      const double dV = r.trace.records[i].V - r.trace.records[i - 1].V;
      rise = std::isfinite(dV) ? std::max(rise, dV) : std::numeric_limits<double>::infinity();
    }
    const double rel = rise / V0;
    if (!std::isfinite(rel) || rel > 1e-6) ++bad;
    worst = std::max(worst, rel);
  }
  return {bad == 0, std::to_string(bad) + " of 10 fixtures exceed tolerance; worst per-step rise / V(0) = " + g6(worst)};
}

Outcome numerical_kernels() {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_residual = 0.0;
  bool residual_ok = true;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 5;
    const Matrix Am = fixtures::random_hurwitz(rng, n);
    Matrix R(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) R(i, j) = normal(rng);
    }
    const Matrix Q = R * R.transpose() + Matrix::Identity(n, n);
    const auto pair = solve_lyapunov(Am, Q);
    const double res = (Am.transpose() * pair.P + pair.P * Am + Q).norm();
    const double tol = 1e-9 * (1.0 + Q.norm());
    residual_ok = residual_ok && res <= tol;
    worst_residual = std::max(worst_residual, res / tol);
  }

  double worst_match = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 4;
    const Matrix Am = fixtures::random_hurwitz(rng, n);
    Vector B(n), K(n);
    for (int i = 0; i < n; ++i) B(i) = normal(rng), K(i) = normal(rng);
    const double lambda = 0.5 + std::abs(normal(rng));
    const double l = 0.5 + std::abs(normal(rng));
    const Matrix A = Am - lambda * B * K.transpose();
    const Vector Bm = lambda * l * B;
    const auto g = derive_matching_gains(A, Am, B, lambda, Bm);
    worst_match = std::max({worst_match, (g.K - K).norm(), std::abs(g.l - l)});
  }

  // Smooth segment: nonlinear fixture over [0, 0.2], before any projection or saturation.
  bool smooth = true;
  auto at = [&smooth](double dt) {
    auto c = fixtures::nonlinear_tanh();
    c.integrator.dt = dt;
    const ClosedLoop loop(c);
    auto s = loop.initial_state();
    const int steps = static_cast<int>(std::lround(0.2 / dt));
    for (int i = 0; i < steps; ++i) {
      bool projected = false;
      if (loop.evaluate(s).decision.mode != SaturationMode::Unsaturated) smooth = false;
      s = loop.step(s, &projected);
      if (projected) smooth = false;
    }
    return loop.pack(s);
  };
  const Vector y1 = at(0.01), y2 = at(0.005), y3 = at(0.0025);
  const double ratio = (y1 - y2).norm() / (y2 - y3).norm();

  const bool pass = residual_ok && worst_match <= 1e-8 && smooth && ratio >= 12.0 && ratio <= 20.0;
  return {pass, "worst residual / tolerance = " + g6(worst_residual) + ", matching round-trip error = " +
                    g6(worst_match) + ", RK4 halving ratio = " + g6(ratio)};
}

Outcome nonlinear_extension() {
  const auto c = fixtures::nonlinear_tanh();
  const auto r = run(c, {false, false});
  const auto& s = r.summary;
  const bool pass = !r.failure && s.state_constraint_ok && s.input_constraint_ok && s.stability_condition_ok &&
                    s.error_bound_ok && s.final_window_mean_Es < 5e-2;
  std::string detail = "sup||X|| = " + g6(s.sup_norm_X) + " < " + g6(c.constraints.M_x) + ", sup|u| = " +
                       g6(s.sup_abs_u) + " <= " + g6(c.constraints.M_u) + ", inf margin = " + g6(s.inf_margin) +
                       ", sup||E^s|| = " + g6(s.sup_norm_Es) + " < " + g6(r.trace.meta.M_e) +
                       ", final mean ||E^s|| = " + g6(s.final_window_mean_Es) + " < 0.05, sup|g| = " +
                       g6(s.sup_abs_g);
  if (r.failure) detail += "; aborted: " + r.failure->message;
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"example thresholds", example_thresholds},
      {"baseline contrast", baseline_contrast},
      {"M_u sweep", mu_sweep},
      {"barrier invariant", barrier_invariant},
      {"saturation identity", saturation_identity},
      {"Lyapunov decrease", lyapunov_decrease},
      {"numerical kernels", numerical_kernels},
      {"nonlinear extension", nonlinear_extension},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
