#include "cmrac/batch.hpp"

#include <exception>

#include <omp.h>

namespace cmrac {

namespace {

RunResult guarded_run(const ScenarioConfig& config, const RunOptions& options) {
  try {
    return run(config, options);
  } catch (const Error& e) {
    RunResult r;
    r.failure = RunFailure{e.kind(), 0.0, e.what()};
    return r;
  } catch (const std::exception& e) {
    RunResult r;
    r.failure = RunFailure{ErrorKind::InvalidScenario, 0.0, e.what()};
    return r;
  }
}

}  // namespace

std::vector<RunResult> run_batch(std::span<const ScenarioConfig> configs, const RunOptions& options) {
  std::vector<RunResult> results(configs.size());
  const auto count = static_cast<long>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    results[static_cast<std::size_t>(i)] = guarded_run(configs[static_cast<std::size_t>(i)], options);
  }
  return results;
}

std::vector<RunResult> run_batch_serial(std::span<const ScenarioConfig> configs, const RunOptions& options) {
  std::vector<RunResult> results;
  results.reserve(configs.size());
  for (const auto& c : configs) results.push_back(guarded_run(c, options));
  return results;
}

std::vector<SweepEntry> sweep_Mu(const ScenarioConfig& config, std::span<const double> values,
                                 const RunOptions& options) {
  std::vector<ScenarioConfig> configs(values.size(), config);
  for (std::size_t i = 0; i < values.size(); ++i) {
    configs[i].constraints.M_u = values[i];
    configs[i].name = config.name + "/M_u=" + std::to_string(values[i]);
  }
  auto results = run_batch(configs, options);
  std::vector<SweepEntry> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({values[i], std::move(results[i])});
  return out;
}

}  // namespace cmrac
