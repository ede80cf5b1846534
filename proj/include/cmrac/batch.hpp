#pragma once

#include <span>
#include <vector>

#include "cmrac/simulator.hpp"

namespace cmrac {

/// Runs independent scenarios across OpenMP threads. Exceptions (e.g. failed
/// validation) are captured into RunResult::failure, never propagated.
[[nodiscard]] std::vector<RunResult> run_batch(std::span<const ScenarioConfig> configs, const RunOptions& options = {});

/// Serial reference for run_batch; results must be bit-identical.
[[nodiscard]] std::vector<RunResult> run_batch_serial(std::span<const ScenarioConfig> configs,
                                                      const RunOptions& options = {});

struct SweepEntry {
  double M_u = 0.0;
  RunResult result;
};

/// One run per M_u value (otherwise identical configs), executed via run_batch.
[[nodiscard]] std::vector<SweepEntry> sweep_Mu(const ScenarioConfig& config, std::span<const double> values,
                                               const RunOptions& options = {});

}  // namespace cmrac
