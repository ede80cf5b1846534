#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cmrac/trace_io.hpp"

namespace cmrac {

/// One plot: a shared time axis and named series of equal length.
struct FigureData {
  std::string id;  // "fig1" ... "fig8"
  std::string title;
  std::string y_label;
  std::vector<double> t;
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;
};

/**
 * Builds the figure set from traces. `runs` must hold at least one trace;
 * runs[0] drives figures 1-7 and every run contributes an x_ms1 series to
 * the fig8 overlay. `baseline` adds the comparison curves to fig3/fig4.
 * Throws MissingColumn if a needed series is absent.
 */
[[nodiscard]] std::vector<FigureData> build_figures(const std::vector<TraceTable>& runs,
                                                    const std::optional<TraceTable>& baseline);

void write_figure_csv(const std::filesystem::path& path, const FigureData& fig);

/// Self-contained SVG line plot.
[[nodiscard]] std::string render_svg(const FigureData& fig);

/// build_figures + <id>.csv and <id>.svg per figure; returns written paths.
std::vector<std::filesystem::path> export_figures(const std::vector<TraceTable>& runs,
                                                  const std::optional<TraceTable>& baseline,
                                                  const std::filesystem::path& out_dir);

}  // namespace cmrac
