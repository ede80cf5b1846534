#include "cmrac/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmrac/error.hpp"

namespace cmrac {

using json = nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing required field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string("field '") + what + "' must be a number");
  return j.get<double>();
}

double number_at(const json& j, const char* key) { return number(require(j, key), key); }

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j.at(key), key);
}

Vector vector_of(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) parse_fail(std::string("field '") + what + "' must be a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

Matrix matrix_of(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    parse_fail(std::string("field '") + what + "' must be an array of row arrays");
  }
  const auto rows = j.size();
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) parse_fail(std::string("ragged rows in '") + what + "'");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], what);
    }
  }
  return m;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

std::string_view to_string(BarrierPolicy p) { return p == BarrierPolicy::Abort ? "abort" : "soft"; }
std::string_view to_string(MarginPolicy p) { return p == MarginPolicy::Continue ? "continue" : "abort"; }

/// Non-finite values are written as null so the document stays valid JSON.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ScenarioConfig scenario_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) parse_fail("scenario document must be a JSON object");

  const auto version = require(j, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion) {
    parse_fail("unsupported schema_version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }

  ScenarioConfig c;
  c.name = j.value("name", std::string("scenario"));

  const auto& plant = require(j, "plant");
  c.plant.A = matrix_of(require(plant, "A"), "plant.A");
  c.plant.B = vector_of(require(plant, "B"), "plant.B");
  c.plant.lambda = number_at(plant, "lambda");
  c.X0 = vector_of(require(plant, "X0"), "plant.X0");
  if (plant.contains("A1")) c.plant.A1 = matrix_of(plant.at("A1"), "plant.A1");
  if (plant.contains("nonlinearity")) {
    const auto& nl = plant.at("nonlinearity");
    if (!nl.is_array()) parse_fail("plant.nonlinearity must be an array of names");
    NonlinearitySpec spec;
    for (const auto& name : nl) {
      if (!name.is_string()) parse_fail("plant.nonlinearity entries must be strings");
      const auto kind = nonlinearity_from_string(name.get<std::string>());
      if (!kind) parse_fail("unknown nonlinearity '" + name.get<std::string>() + "'");
      spec.components.push_back(*kind);
    }
    c.plant.nonlinearity = std::move(spec);
  }

  const auto& target = require(j, "target");
  c.target.Am = matrix_of(require(target, "A_m"), "target.A_m");
  c.target.Bm = vector_of(require(target, "B_m"), "target.B_m");
  c.target.Xm0 = vector_of(require(target, "X_m0"), "target.X_m0");

  if (j.contains("lyapunov_Q")) c.Q = matrix_of(j.at("lyapunov_Q"), "lyapunov_Q");

  const auto& k = require(j, "constraints");
  c.constraints.M_x = number_at(k, "M_x");
  c.constraints.M_u = number_at(k, "M_u");
  c.constraints.M_xm = number_at(k, "M_xm");
  c.constraints.f_M = number_at(k, "f_M");

  const auto& b = require(j, "bounds");
  c.bounds.M_K = number_at(b, "M_K");
  c.bounds.m_l = number_at(b, "m_l");
  c.bounds.M_l = number_at(b, "M_l");
  const double sign = number_at(b, "sign_l");
  c.bounds.sign_l = sign >= 0 ? 1 : -1;
  if (sign != 1.0 && sign != -1.0) parse_fail("bounds.sign_l must be +1 or -1");
  c.bounds.M_K1 = optional_number(b, "M_K1");

  const auto& g = require(j, "gains");
  c.gains.gamma_K = number_at(g, "Gamma_K");
  c.gains.gamma_l = number_at(g, "Gamma_l");
  c.gains.gamma_K1 = optional_number(g, "Gamma_K1");

  const auto& est = require(j, "initial_estimates");
  c.initial.K_hat = vector_of(require(est, "K_hat"), "initial_estimates.K_hat");
  c.initial.l_hat = number_at(est, "l_hat");
  if (est.contains("K1_hat")) c.initial.K1_hat = vector_of(est.at("K1_hat"), "initial_estimates.K1_hat");

  const auto& ref = require(j, "reference");
  if (ref.contains("sinusoids")) {
    const auto& terms = ref.at("sinusoids");
    if (!terms.is_array()) parse_fail("reference.sinusoids must be an array");
    for (const auto& t : terms) {
      c.reference.terms.push_back({number_at(t, "amplitude"), number_at(t, "omega"), t.contains("phase") ? number_at(t, "phase") : 0.0});
    }
  }
  c.reference.offset = ref.contains("offset") ? number_at(ref, "offset") : 0.0;
  if (ref.contains("table")) {
    if (!ref.value("amplitude_unchecked", false)) {
      parse_fail("tabulated references require \"amplitude_unchecked\": true");
    }
    const auto& table = ref.at("table");
    const Vector ts = vector_of(require(table, "t"), "reference.table.t");
    const Vector fs = vector_of(require(table, "f"), "reference.table.f");
    if (ts.size() != fs.size()) parse_fail("reference.table.t and reference.table.f differ in length");
    for (Eigen::Index i = 1; i < ts.size(); ++i) {
      if (!(ts(i) > ts(i - 1))) parse_fail("reference.table.t must be strictly increasing");
    }
    c.reference.table_t.assign(ts.data(), ts.data() + ts.size());
    c.reference.table_f.assign(fs.data(), fs.data() + fs.size());
  }

  if (j.contains("integrator")) {
    const auto& in = j.at("integrator");
    if (in.contains("dt")) c.integrator.dt = number_at(in, "dt");
    if (in.contains("horizon")) c.integrator.horizon = number_at(in, "horizon");
    const auto bp = in.value("barrier_policy", std::string("abort"));
    if (bp == "abort") c.integrator.barrier_policy = BarrierPolicy::Abort;
    else if (bp == "soft") c.integrator.barrier_policy = BarrierPolicy::Soft;
    else parse_fail("integrator.barrier_policy must be 'abort' or 'soft'");
    const auto mp = in.value("margin_policy", std::string("continue"));
    if (mp == "continue") c.integrator.margin_policy = MarginPolicy::Continue;
    else if (mp == "abort") c.integrator.margin_policy = MarginPolicy::Abort;
    else parse_fail("integrator.margin_policy must be 'continue' or 'abort'");
  }

  const auto variant = j.value("variant", std::string("state_and_input"));
  const auto v = variant_from_string(variant);
  if (!v) parse_fail("unknown variant '" + variant + "'");
  c.variant = *v;

  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    TruthGains truth{vector_of(require(t, "K"), "truth.K"), number_at(t, "l"), std::nullopt};
    if (t.contains("K1")) truth.K1 = vector_of(t.at("K1"), "truth.K1");
    c.truth = std::move(truth);
  }
  return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = c.name;
  json plant = {{"A", to_json(c.plant.A)}, {"B", to_json(c.plant.B)}, {"lambda", c.plant.lambda}, {"X0", to_json(c.X0)}};
  if (c.plant.A1) plant["A1"] = to_json(*c.plant.A1);
  if (c.plant.nonlinearity) {
    json names = json::array();
    for (auto kind : c.plant.nonlinearity->components) names.push_back(std::string(to_string(kind)));
    plant["nonlinearity"] = names;
  }
  j["plant"] = plant;
  j["target"] = {{"A_m", to_json(c.target.Am)}, {"B_m", to_json(c.target.Bm)}, {"X_m0", to_json(c.target.Xm0)}};
  if (c.Q.size() > 0) j["lyapunov_Q"] = to_json(c.Q);
  j["constraints"] = {{"M_x", c.constraints.M_x}, {"M_u", c.constraints.M_u}, {"M_xm", c.constraints.M_xm},
                      {"f_M", c.constraints.f_M}};
  json bounds = {{"M_K", c.bounds.M_K}, {"m_l", c.bounds.m_l}, {"M_l", c.bounds.M_l}, {"sign_l", c.bounds.sign_l}};
  if (c.bounds.M_K1) bounds["M_K1"] = *c.bounds.M_K1;
  j["bounds"] = bounds;
  json gains = {{"Gamma_K", c.gains.gamma_K}, {"Gamma_l", c.gains.gamma_l}};
  if (c.gains.gamma_K1) gains["Gamma_K1"] = *c.gains.gamma_K1;
  j["gains"] = gains;
  json est = {{"K_hat", to_json(c.initial.K_hat)}, {"l_hat", c.initial.l_hat}};
  if (c.initial.K1_hat) est["K1_hat"] = to_json(*c.initial.K1_hat);
  j["initial_estimates"] = est;

  json ref;
  json terms = json::array();
  for (const auto& t : c.reference.terms) terms.push_back({{"amplitude", t.amplitude}, {"omega", t.omega}, {"phase", t.phase}});
  ref["sinusoids"] = terms;
  ref["offset"] = c.reference.offset;
  if (c.reference.is_tabulated()) {
    ref["amplitude_unchecked"] = true;
    ref["table"] = {{"t", c.reference.table_t}, {"f", c.reference.table_f}};
  }
  j["reference"] = ref;
  j["integrator"] = {{"dt", c.integrator.dt},
                     {"horizon", c.integrator.horizon},
                     {"barrier_policy", std::string(to_string(c.integrator.barrier_policy))},
                     {"margin_policy", std::string(to_string(c.integrator.margin_policy))}};
  j["variant"] = std::string(to_string(c.variant));
  if (c.truth) {
    json t = {{"K", to_json(c.truth->K)}, {"l", c.truth->l}};
    if (c.truth->K1) t["K1"] = to_json(*c.truth->K1);
    j["truth"] = t;
  }
  return j.dump(2);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::string summary_to_json(const RunSummary& s, const TraceMetadata& meta, const std::optional<RunFailure>& failure) {
  json j;
  j["variant"] = std::string(to_string(meta.variant));
  j["limits"] = {{"M_x", meta.M_x}, {"M_u", meta.M_u}, {"M_e", meta.M_e}, {"M", meta.M}, {"f_M", meta.f_M}};
  j["integrator"] = {{"dt", meta.dt}, {"horizon", meta.horizon}};
  j["samples"] = s.samples;
  j["end_time"] = s.end_time;
  j["sup_norm_X"] = finite_or_null(s.sup_norm_X);
  j["sup_abs_u"] = finite_or_null(s.sup_abs_u);
  j["sup_abs_u_nominal"] = finite_or_null(s.sup_abs_u_nominal);
  j["sup_abs_g"] = finite_or_null(s.sup_abs_g);
  j["sup_abs_total_reference"] = finite_or_null(s.sup_abs_total_reference);
  j["inf_margin"] = finite_or_null(s.inf_margin);
  j["sup_norm_Es"] = finite_or_null(s.sup_norm_Es);
  j["sup_barrier_fraction"] = finite_or_null(s.sup_barrier_fraction);
  j["final_window_mean_Es"] = finite_or_null(s.final_window_mean_Es);
  j["sup_target_deviation"] = finite_or_null(s.sup_target_deviation);
  j["final_half_sup_tilde_E"] = finite_or_null(s.final_half_sup_tilde_E);
  j["max_norm_K_hat"] = finite_or_null(s.max_norm_K_hat);
  j["min_abs_l_hat"] = finite_or_null(s.min_abs_l_hat);
  j["max_abs_l_hat"] = finite_or_null(s.max_abs_l_hat);
  if (s.max_norm_K1_hat) j["max_norm_K1_hat"] = finite_or_null(*s.max_norm_K1_hat);
  j["violation_samples"] = {{"state", s.state_violation_samples},
                            {"input", s.input_violation_samples},
                            {"margin", s.margin_violation_samples}};
  j["flags"] = {{"state_constraint_ok", s.state_constraint_ok},
                {"input_constraint_ok", s.input_constraint_ok},
                {"stability_condition_ok", s.stability_condition_ok},
                {"error_bound_ok", s.error_bound_ok},
                {"completed", s.completed}};
  if (failure) {
    j["failure"] = {{"kind", std::string(to_string(failure->kind))}, {"t", failure->t}, {"message", failure->message}};
  } else {
    j["failure"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace cmrac
