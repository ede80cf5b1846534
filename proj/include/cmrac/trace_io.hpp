#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cmrac/simulator.hpp"

namespace cmrac {

/// Trace CSV: one '#'-prefixed metadata line, a header row, then one row per sample.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);
void write_events_csv(std::ostream& out, const SimulationTrace& trace);

/// Column-oriented view of a trace CSV file, as read back by export-figures.
struct TraceTable {
  std::string source;
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[column][row]

  [[nodiscard]] std::size_t rows() const noexcept { return data.empty() ? 0 : data.front().size(); }
  [[nodiscard]] bool has(const std::string& name) const;
  /// Throws MissingColumn when absent.
  [[nodiscard]] const std::vector<double>& column(const std::string& name) const;
  /// Metadata value as a number; throws MissingColumn when absent.
  [[nodiscard]] double meta_number(const std::string& key) const;
};

[[nodiscard]] TraceTable parse_trace_csv(std::istream& in, std::string source = "<stream>");
[[nodiscard]] TraceTable read_trace_csv(const std::filesystem::path& path);

/// Writes trace.csv, events.csv and summary.json into dir (created if needed).
void write_run_artifacts(const std::filesystem::path& dir, const RunResult& result);

}  // namespace cmrac
