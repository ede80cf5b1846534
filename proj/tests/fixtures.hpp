#pragma once

#include <random>

#include "cmrac/scenario.hpp"

namespace cmrac::fixtures {

/// Third-order example, M_u = 3, T = 30 s, dt = 1e-3, Q = I.
[[nodiscard]] ScenarioConfig third_order_example();

/// Random scenario of dimension n that passes validate_scenario: Hurwitz A_m,
/// matching-consistent plant, constraints scaled from the target bound and
/// M_u chosen to satisfy the offline stability condition.
[[nodiscard]] ScenarioConfig random_admissible(std::mt19937_64& rng, int n, double horizon = 10.0);

/// Two-state plant with A1 = -B lambda K1^T and Phi = tanh.
[[nodiscard]] ScenarioConfig nonlinear_tanh();

[[nodiscard]] Matrix random_hurwitz(std::mt19937_64& rng, int n);

}  // namespace cmrac::fixtures
