#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cmrac/error.hpp"
#include "cmrac/figures.hpp"
#include "cmrac/scenario_io.hpp"
#include "cmrac/trace_io.hpp"
#include "fixtures.hpp"

using namespace cmrac;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = CMRAC_SCENARIO_DIR;

ErrorKind parse_kind(const std::string& text) {
  try {
    (void)scenario_from_json(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

std::string example_json() {
  std::ifstream in(kScenarios / "third_order_example.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cmrac_test_" + name);
  fs::remove_all(dir);
  return dir;
}

RunResult short_run(ControllerVariant v, double horizon) {
  auto c = fixtures::third_order_example();
  c.variant = v;
  c.integrator.horizon = horizon;
  return run(c);
}

TraceTable as_table(const RunResult& r) {
  std::stringstream ss;
  write_trace_csv(ss, r.trace);
  return parse_trace_csv(ss);
}

}  // namespace

TEST(ScenarioJson, BundledExampleMatchesFixture) {
  const auto loaded = load_scenario(kScenarios / "third_order_example.json");
  const auto ref = fixtures::third_order_example();
  EXPECT_EQ(loaded.plant.A, ref.plant.A);
  EXPECT_EQ(loaded.plant.B, ref.plant.B);
  EXPECT_EQ(loaded.plant.lambda, ref.plant.lambda);
  EXPECT_EQ(loaded.target.Am, ref.target.Am);
  EXPECT_EQ(loaded.target.Bm, ref.target.Bm);
  EXPECT_EQ(loaded.X0, ref.X0);
  EXPECT_EQ(loaded.constraints.M_u, 3.0);
  EXPECT_EQ(loaded.constraints.f_M, 2.4);
  EXPECT_EQ(loaded.bounds.M_K, 10.0);
  EXPECT_EQ(loaded.gains.gamma_l, 0.05);
  EXPECT_EQ(loaded.initial.K_hat, ref.initial.K_hat);
  EXPECT_EQ(loaded.reference.terms.size(), 2u);
  EXPECT_EQ(loaded.integrator.horizon, 30.0);
  EXPECT_EQ(loaded.variant, ControllerVariant::StateAndInput);
}

TEST(ScenarioJson, BundledNonlinearMatchesFixture) {
  const auto loaded = load_scenario(kScenarios / "nonlinear_tanh.json");
  const auto ref = fixtures::nonlinear_tanh();
  EXPECT_EQ(loaded.plant.A, ref.plant.A);
  EXPECT_EQ(*loaded.plant.A1, *ref.plant.A1);
  EXPECT_EQ(loaded.plant.nonlinearity->components, ref.plant.nonlinearity->components);
  EXPECT_EQ(loaded.constraints.M_u, ref.constraints.M_u);
  EXPECT_EQ(loaded.constraints.M_x, ref.constraints.M_x);
  EXPECT_EQ(loaded.variant, ControllerVariant::NonlinearStateAndInput);
  EXPECT_EQ(*loaded.truth->K1, *ref.truth->K1);
}

TEST(ScenarioJson, RoundTrip) {
  const auto a = fixtures::nonlinear_tanh();
  const auto b = scenario_from_json(scenario_to_json(a));
  EXPECT_EQ(b.plant.A, a.plant.A);
  EXPECT_EQ(*b.plant.A1, *a.plant.A1);
  EXPECT_EQ(b.constraints.M_xm, a.constraints.M_xm);
  EXPECT_EQ(*b.bounds.M_K1, *a.bounds.M_K1);
  EXPECT_EQ(*b.gains.gamma_K1, *a.gains.gamma_K1);
  EXPECT_EQ(*b.initial.K1_hat, *a.initial.K1_hat);
  EXPECT_EQ(b.reference.terms[1].omega, a.reference.terms[1].omega);
  EXPECT_EQ(b.variant, a.variant);
  EXPECT_EQ(scenario_to_json(b), scenario_to_json(a));
}

TEST(ScenarioJson, Errors) {
  EXPECT_EQ(parse_kind("{not json"), ErrorKind::ParseError);
  auto j = nlohmann::json::parse(example_json());
  j["schema_version"] = 2;
  EXPECT_EQ(parse_kind(j.dump()), ErrorKind::ParseError);
  j = nlohmann::json::parse(example_json());
  j["plant"].erase("B");
  EXPECT_EQ(parse_kind(j.dump()), ErrorKind::ParseError);
  j = nlohmann::json::parse(example_json());
  j["variant"] = "pid";
  EXPECT_EQ(parse_kind(j.dump()), ErrorKind::ParseError);
  j = nlohmann::json::parse(example_json());
  j["plant"]["A"][1] = {1.0, 2.0};
  EXPECT_EQ(parse_kind(j.dump()), ErrorKind::ParseError);
  j = nlohmann::json::parse(example_json());
  j["reference"]["table"] = {{"t", {0.0, 1.0}}, {"f", {0.0, 1.0}}};
  EXPECT_EQ(parse_kind(j.dump()), ErrorKind::ParseError);
  j["reference"]["amplitude_unchecked"] = true;
  EXPECT_TRUE(scenario_from_json(j.dump()).reference.is_tabulated());
  try {
    (void)load_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(TraceCsv, RoundTripIsExact) {
  const auto r = short_run(ControllerVariant::StateAndInput, 0.5);
  const auto t = as_table(r);
  EXPECT_EQ(t.rows(), 501u);
  EXPECT_EQ(t.columns.size(), 1u + 9u + 12u + 3u + 1u + 1u);
  EXPECT_EQ(t.meta.at("variant"), "state_and_input");
  EXPECT_EQ(t.meta_number("M_u"), 3.0);
  EXPECT_EQ(t.meta_number("M"), r.trace.meta.M);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const auto& rec = r.trace.records[i];
    ASSERT_EQ(t.column("t")[i], rec.state.t);
    ASSERT_EQ(t.column("x2")[i], rec.state.X(1));
    ASSERT_EQ(t.column("u_applied")[i], rec.decision.u_applied);
    ASSERT_EQ(t.column("V")[i], rec.V);
    ASSERT_EQ(t.column("stability_rhs")[i], 3.0 - rec.decision.margin);
  }
}

TEST(TraceCsv, NonlinearTraceHasK1Columns) {
  auto c = fixtures::nonlinear_tanh();
  c.integrator.horizon = 0.1;
  const auto t = as_table(run(c));
  EXPECT_TRUE(t.has("K1_hat2"));
  EXPECT_EQ(t.meta.at("n"), "2");
}

TEST(TraceCsv, ParseErrors) {
  std::stringstream empty("# cmrac-trace schema=1\nt,x1\n");
  EXPECT_THROW((void)parse_trace_csv(empty), Error);
  std::stringstream ragged("t,x1\n0,1\n0.1\n");
  try {
    (void)parse_trace_csv(ragged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
  std::stringstream ok("t,x1\n0,1\n");
  const auto t = parse_trace_csv(ok);
  try {
    (void)t.column("u_applied");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingColumn);
  }
}

TEST(Artifacts, WritesTraceEventsSummary) {
  const auto r = short_run(ControllerVariant::BaselineMrac, 2.0);
  const auto dir = temp_dir("artifacts");
  write_run_artifacts(dir, r);
  EXPECT_EQ(read_trace_csv(dir / "trace.csv").rows(), 2001u);
  std::ifstream events(dir / "events.csv");
  std::string header;
  std::getline(events, header);
  EXPECT_EQ(header, "t,kind,detail");
  std::ifstream in(dir / "summary.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["variant"], "baseline_mrac");
  EXPECT_EQ(j["samples"], 2001);
  EXPECT_DOUBLE_EQ(j["sup_abs_u"].get<double>(), r.summary.sup_abs_u);
  EXPECT_EQ(j["flags"]["input_constraint_ok"], r.summary.input_constraint_ok);
  EXPECT_TRUE(j["failure"].is_null());
  fs::remove_all(dir);
}

TEST(Figures, BuildsEightFigures) {
  const auto proposed = as_table(short_run(ControllerVariant::StateAndInput, 2.0));
  const auto baseline = as_table(short_run(ControllerVariant::BaselineMrac, 2.0));
  const auto figs = build_figures({proposed}, baseline);
  ASSERT_EQ(figs.size(), 8u);
  EXPECT_EQ(figs[0].id, "fig1");
  EXPECT_EQ(figs[2].names, (std::vector<std::string>{"u_applied", "u_baseline", "M_u", "neg_M_u"}));
  EXPECT_EQ(figs[3].names.back(), "M_x");
  EXPECT_EQ(figs[7].id, "fig8");
  for (const auto& f : figs) {
    for (const auto& s : f.series) EXPECT_EQ(s.size(), f.t.size()) << f.id;
  }
}

TEST(Figures, SvgIsDeterministicAndDownsampled) {
  const auto t = as_table(short_run(ControllerVariant::StateAndInput, 5.0));
  const auto figs = build_figures({t}, std::nullopt);
  const auto a = render_svg(figs[1]);
  EXPECT_EQ(a, render_svg(figs[1]));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  const auto start = a.find("points=\"");
  const auto end = a.find('"', start + 8);
  const auto points = std::count(a.begin() + static_cast<std::ptrdiff_t>(start),
                                 a.begin() + static_cast<std::ptrdiff_t>(end), ',');
  EXPECT_LE(points, 1501);
  EXPECT_GT(points, 100);
}

TEST(Figures, ExportWritesFilesAndRejectsEmpty) {
  const auto dir = temp_dir("figures");
  const auto t = as_table(short_run(ControllerVariant::StateAndInput, 1.0));
  const auto written = export_figures({t, t}, std::nullopt, dir);
  EXPECT_EQ(written.size(), 16u);
  for (const auto& p : written) EXPECT_TRUE(fs::exists(p)) << p;
  EXPECT_EQ(read_trace_csv(dir / "fig8.csv").columns.size(), 4u);
  TraceTable empty;
  try {
    (void)export_figures({empty}, std::nullopt, dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingColumn);
  }
  fs::remove_all(dir);
}
