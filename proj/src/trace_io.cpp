#include "cmrac/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cmrac/error.hpp"
#include "cmrac/scenario_io.hpp"

namespace cmrac {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string indexed(const char* stem, Eigen::Index i) { return std::string(stem) + std::to_string(i + 1); }

int mode_code(SaturationMode m) {
  switch (m) {
    case SaturationMode::SatHigh: return 1;
    case SaturationMode::SatLow: return -1;
    case SaturationMode::Unsaturated: return 0;
  }
  return 0;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += (ch == '\n' ? ' ' : ch);
  }
  return out + "\"";
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  const auto& m = trace.meta;
  const auto n = m.n;
  out << "# cmrac-trace schema=1 variant=" << to_string(m.variant) << " n=" << n << " M_u=" << num(m.M_u)
      << " M_x=" << num(m.M_x) << " M_e=" << num(m.M_e) << " M=" << num(m.M) << " f_M=" << num(m.f_M)
      << " sign_l=" << m.sign_l << " dt=" << num(m.dt) << " horizon=" << num(m.horizon) << "\n";

  std::vector<std::string> header{"t"};
  for (const char* stem : {"x", "xm", "xms"}) {
    for (Eigen::Index i = 0; i < n; ++i) header.push_back(indexed(stem, i));
  }
  for (const char* name : {"f", "u_nominal", "g", "u_applied", "total_reference", "sat_mode", "margin",
                           "stability_rhs", "norm_X", "norm_Es", "barrier_fraction", "mu"}) {
    header.emplace_back(name);
  }
  for (Eigen::Index i = 0; i < n; ++i) header.push_back(indexed("K_hat", i));
  header.emplace_back("l_hat");
  if (m.has_K1) {
    for (Eigen::Index i = 0; i < n; ++i) header.push_back(indexed("K1_hat", i));
  }
  header.emplace_back("V");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";

  std::string line;
  for (const auto& r : trace.records) {
    line.clear();
    auto put = [&line](double v) {
      if (!line.empty()) line += ',';
      line += num(v);
    };
    const auto& s = r.state;
    put(s.t);
    for (const Vector* v : {&s.X, &s.Xm, &s.Xms}) {
      for (Eigen::Index i = 0; i < n; ++i) put((*v)(i));
    }
    const auto& d = r.decision;
    put(r.f);
    put(d.u_nominal);
    put(d.g);
    put(d.u_applied);
    put(d.total_reference);
    put(mode_code(d.mode));
    put(d.margin);
    put(m.M_u - d.margin);
    put(r.norm_X);
    put(r.norm_Es);
    put(r.barrier_fraction);
    put(r.mu);
    for (Eigen::Index i = 0; i < n; ++i) put(s.est.K_hat(i));
    put(s.est.l_hat);
    if (m.has_K1) {
      for (Eigen::Index i = 0; i < n; ++i) put(s.est.K1_hat ? (*s.est.K1_hat)(i) : 0.0);
    }
    put(r.V);
    out << line << "\n";
  }
}

void write_events_csv(std::ostream& out, const SimulationTrace& trace) {
  out << "t,kind,detail\n";
  for (const auto& e : trace.events) out << num(e.t) << "," << to_string(e.kind) << "," << csv_quote(e.detail) << "\n";
}

bool TraceTable::has(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const std::vector<double>& TraceTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorKind::MissingColumn, "column '" + name + "' not in " + source);
  return data[static_cast<std::size_t>(it - columns.begin())];
}

double TraceTable::meta_number(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw Error(ErrorKind::MissingColumn, "metadata '" + key + "' not in " + source);
  return std::strtod(it->second.c_str(), nullptr);
}

TraceTable parse_trace_csv(std::istream& in, std::string source) {
  TraceTable t;
  t.source = std::move(source);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) t.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    if (t.columns.empty()) {
      t.columns = split(line, ',');
      t.data.assign(t.columns.size(), {});
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) {
      throw Error(ErrorKind::ParseError, t.source + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                                             std::to_string(t.columns.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str()) throw Error(ErrorKind::ParseError, t.source + ": non-numeric cell '" + cells[c] + "'");
      t.data[c].push_back(v);
    }
  }
  if (t.columns.empty() || t.rows() == 0) throw Error(ErrorKind::MissingColumn, t.source + ": trace has no samples");
  return t;
}

TraceTable read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return parse_trace_csv(in, path.string());
}

void write_run_artifacts(const std::filesystem::path& dir, const RunResult& result) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("trace.csv");
    write_trace_csv(out, result.trace);
  }
  {
    auto out = open("events.csv");
    write_events_csv(out, result.trace);
  }
  {
    auto out = open("summary.json");
    out << summary_to_json(result.summary, result.trace.meta, result.failure) << "\n";
  }
}

}  // namespace cmrac
