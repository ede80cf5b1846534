// cmrac: validate, simulate, compare and sweep constrained MRAC scenarios.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cmrac/batch.hpp"
#include "cmrac/error.hpp"
#include "cmrac/figures.hpp"
#include "cmrac/scenario.hpp"
#include "cmrac/scenario_io.hpp"
#include "cmrac/simulator.hpp"
#include "cmrac/trace_io.hpp"

namespace fs = std::filesystem;
using namespace cmrac;

namespace {

enum ExitCode { kOk = 0, kViolation = 1, kParse = 2, kNumerical = 3 };

struct Overrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> M_u;
  std::optional<std::string> variant;
  bool force = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--dt", o.dt, "Integration step [s]")->check(CLI::PositiveNumber);
  cmd->add_option("--T", o.horizon, "Horizon [s]")->check(CLI::PositiveNumber);
  cmd->add_option("--Mu", o.M_u, "Input bound M_u")->check(CLI::PositiveNumber);
  cmd->add_option("--variant", o.variant, "state_only | state_and_input | nonlinear_state_and_input | baseline_mrac");
  cmd->add_flag("--force", o.force, "Run even if validation fails");
}

ScenarioConfig load_with(const std::string& path, const Overrides& o) {
  ScenarioConfig c = load_scenario(path);
  if (o.dt) c.integrator.dt = *o.dt;
  if (o.horizon) c.integrator.horizon = *o.horizon;
  if (o.M_u) c.constraints.M_u = *o.M_u;
  if (o.variant) {
    const auto v = variant_from_string(*o.variant);
    if (!v) throw Error(ErrorKind::ParseError, "unknown variant '" + *o.variant + "'");
    c.variant = *v;
  }
  return c;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_summary(const std::string& label, const RunResult& r) {
  const auto& s = r.summary;
  const auto& m = r.trace.meta;
  std::cout << label << " [" << to_string(m.variant) << ", M_u = " << num(m.M_u) << "]\n"
            << "  samples " << s.samples << ", end time " << num(s.end_time) << " s\n"
            << "  sup ||X||      " << num(s.sup_norm_X) << "  (M_x = " << num(m.M_x) << ") "
            << (s.state_constraint_ok ? "ok" : "VIOLATED") << "\n"
            << "  sup |u|        " << num(s.sup_abs_u) << "  (M_u = " << num(m.M_u) << ") "
            << (s.input_constraint_ok ? "ok" : "VIOLATED") << "\n"
            << "  sup ||E^s||    " << num(s.sup_norm_Es) << "  (M_e = " << num(m.M_e) << ") "
            << (s.error_bound_ok ? "ok" : "exceeded") << "\n"
            << "  sup |g|        " << num(s.sup_abs_g) << "\n"
            << "  inf margin     " << num(s.inf_margin) << (s.stability_condition_ok ? "" : "  (condition violated)")
            << "\n"
            << "  sup ||Xms-Xm|| " << num(s.sup_target_deviation) << "\n";
  if (r.failure) {
    std::cout << "  ABORTED at t = " << num(r.failure->t) << ": " << to_string(r.failure->kind) << ": "
              << r.failure->message << "\n";
  }
}

int run_exit_code(const RunResult& r) {
  if (r.failure) return r.failure->kind == ErrorKind::InvalidScenario ? kViolation : kNumerical;
  return r.summary.constraints_ok() ? kOk : kViolation;
}

std::vector<TraceTable> tables_of(const std::vector<const RunResult*>& runs) {
  std::vector<TraceTable> out;
  for (const auto* r : runs) {
    std::stringstream ss;
    write_trace_csv(ss, r->trace);
    out.push_back(parse_trace_csv(ss, "M_u=" + num(r->trace.meta.M_u)));
  }
  return out;
}

int cmd_validate(const std::string& path, const Overrides& o) {
  const ScenarioConfig c = load_with(path, o);
  std::cout << "scenario " << c.name << " (n = " << c.dim() << ", variant " << to_string(c.variant) << ")\n";
  const auto violations = validate_scenario(c);
  for (const auto& v : violations) std::cout << "  FAIL " << v.message << "\n";

  try {
    const auto pair = solve_lyapunov(c.target.Am, c.lyapunov_Q());
    const auto barrier = compute_barrier(c.constraints, pair);
    const auto ext = eig_extrema_sym(pair.P);
    std::cout << "  lambda_min(P) = " << num(ext.min) << ", lambda_max(P) = " << num(ext.max)
              << ", Lyapunov residual = " << num(pair.residual_norm) << "\n"
              << "  M_e = " << num(barrier.M_e) << ", barrier radius M = " << num(barrier.M) << "\n";
    const auto ref = verify_reference_bound(c.target, c.constraints.f_M, c.constraints.M_xm, pair);
    std::cout << "  target bound (analytic): " << num(ref.analytic_bound) << (ref.analytic_pass ? " <= " : " > ")
              << num(ref.M_xm) << (ref.analytic_pass ? " ok" : " not certified (informational)") << "\n"
              << "  target bound (dither sup): " << num(ref.empirical_sup) << (ref.empirical_pass ? " <= " : " > ")
              << num(ref.M_xm) << (ref.empirical_pass ? " ok" : " FAIL") << "\n";
  } catch (const Error& e) {
    std::cout << "  barrier data unavailable: " << e.what() << "\n";
  }

  const auto offline = verify_offline_stability(c.bounds, c.constraints);
  std::cout << "  " << num(offline.rhs) << (offline.pass ? " <= " : " > ") << num(offline.lhs)
            << ": offline check " << (offline.pass ? "ok" : "FAIL (informational)") << " [" << offline.detail << "]\n";
  std::cout << "  |g| bound: " << num(g_sup_bound(c.constraints.f_M, c.constraints.M_u, c.bounds.m_l, c.bounds.M_K,
                                                  c.constraints.M_x, c.bounds.M_l))
            << "\n";
  if (const auto truth = resolve_truth(c)) {
    std::cout << "  matching gains: K = [";
    for (Eigen::Index i = 0; i < truth->K.size(); ++i) std::cout << (i ? ", " : "") << num(truth->K(i));
    std::cout << "], l = " << num(truth->l) << "\n";
  }
  std::cout << (violations.empty() ? "valid" : "INVALID") << "\n";
  return violations.empty() ? kOk : kViolation;
}

int cmd_simulate(const std::string& path, const Overrides& o, const std::string& out) {
  const ScenarioConfig c = load_with(path, o);
  RunResult r;
  try {
    r = run(c, {o.force, true});
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidScenario) throw;
    std::cerr << e.what() << "\n";
    return kViolation;
  }
  print_summary(c.name, r);
  if (!out.empty()) {
    write_run_artifacts(out, r);
    std::cout << "wrote " << out << "/{trace.csv,events.csv,summary.json}\n";
  }
  return run_exit_code(r);
}

int cmd_compare(const std::string& path, const Overrides& o, const std::string& out) {
  ScenarioConfig proposed = load_with(path, o);
  ScenarioConfig baseline = proposed;
  baseline.variant = ControllerVariant::BaselineMrac;
  baseline.name += "/baseline";
  const std::vector<ScenarioConfig> configs{proposed, baseline};
  const auto results = run_batch(configs, {o.force, true});
  print_summary(proposed.name, results[0]);
  print_summary(baseline.name, results[1]);
  if (!out.empty()) {
    write_run_artifacts(fs::path(out) / "proposed", results[0]);
    write_run_artifacts(fs::path(out) / "baseline", results[1]);
    if (!results[0].trace.records.empty() && !results[1].trace.records.empty()) {
      const auto tables = tables_of({&results[0], &results[1]});
      (void)export_figures({tables[0]}, tables[1], fs::path(out) / "figures");
    }
    std::cout << "wrote " << out << "\n";
  }
  return run_exit_code(results[0]);
}

int cmd_sweep(const std::string& path, const Overrides& o, const std::vector<double>& values, const std::string& out) {
  const ScenarioConfig c = load_with(path, o);
  const auto entries = sweep_Mu(c, values, {o.force, true});
  std::cout << "M_u,sup_norm_X,sup_abs_u,sup_abs_g,sup_target_deviation,inf_margin,status\n";
  int code = kOk;
  std::vector<const RunResult*> ok_runs;
  for (const auto& e : entries) {
    const auto& s = e.result.summary;
    const int ec = run_exit_code(e.result);
    code = std::max(code, ec);
    std::cout << num(e.M_u) << "," << num(s.sup_norm_X) << "," << num(s.sup_abs_u) << "," << num(s.sup_abs_g) << ","
              << num(s.sup_target_deviation) << "," << num(s.inf_margin) << ","
              << (e.result.failure ? std::string(to_string(e.result.failure->kind)) : (ec == kOk ? "ok" : "violated"))
              << "\n";
    if (!e.result.trace.records.empty()) ok_runs.push_back(&e.result);
  }
  if (!out.empty()) {
    for (const auto& e : entries) write_run_artifacts(fs::path(out) / ("Mu_" + num(e.M_u)), e.result);
    if (!ok_runs.empty()) (void)export_figures(tables_of(ok_runs), std::nullopt, fs::path(out) / "figures");
    std::cout << "wrote " << out << "\n";
  }
  return code;
}

int cmd_export(const std::vector<std::string>& traces, const std::string& baseline, const std::string& out) {
  std::vector<TraceTable> tables;
  for (const auto& p : traces) tables.push_back(read_trace_csv(p));
  std::optional<TraceTable> base;
  if (!baseline.empty()) base = read_trace_csv(baseline);
  const auto written = export_figures(tables, base, out);
  for (const auto& p : written) std::cout << p.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained MRAC with barrier Lyapunov adaptation and reference modification"};
  app.require_subcommand(1);

  std::string scenario, out, baseline_trace;
  Overrides o;
  std::vector<double> values{3.0, 3.5, 7.0, 14.0};
  std::vector<std::string> traces;

  auto* validate = app.add_subcommand("validate", "Check scenario preconditions and print derived constants");
  validate->add_option("scenario", scenario, "Scenario JSON")->required();
  add_overrides(validate, o);

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write trace/events/summary");
  simulate->add_option("scenario", scenario, "Scenario JSON")->required();
  simulate->add_option("--out", out, "Output directory");
  add_overrides(simulate, o);

  auto* compare = app.add_subcommand("compare", "Run the scenario and the baseline MRAC side by side");
  compare->add_option("scenario", scenario, "Scenario JSON")->required();
  compare->add_option("--out", out, "Output directory");
  add_overrides(compare, o);

  auto* sweep = app.add_subcommand("sweep", "Run the scenario for several input bounds M_u");
  sweep->add_option("scenario", scenario, "Scenario JSON")->required();
  sweep->add_option("--values", values, "M_u values")->delimiter(',');
  sweep->add_option("--out", out, "Output directory");
  add_overrides(sweep, o);

  auto* figures = app.add_subcommand("export-figures", "Write figure CSV/SVG files from trace CSVs");
  figures->add_option("--trace", traces, "Trace CSV (repeatable; the first drives figures 1-7)")->required();
  figures->add_option("--baseline", baseline_trace, "Baseline trace CSV");
  figures->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParse;
  }

  try {
    if (*validate) return cmd_validate(scenario, o);
    if (*simulate) return cmd_simulate(scenario, o, out);
    if (*compare) return cmd_compare(scenario, o, out);
    if (*sweep) return cmd_sweep(scenario, o, values, out);
    if (*figures) return cmd_export(traces, baseline_trace, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::IoError:
      case ErrorKind::MissingColumn: return kParse;
      case ErrorKind::InvalidScenario: return kViolation;
      default: return kNumerical;
    }
  }
  return kOk;
}
