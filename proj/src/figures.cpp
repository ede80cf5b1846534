#include "cmrac/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmrac/error.hpp"

namespace cmrac {

namespace {

std::vector<double> head(const std::vector<double>& v, std::size_t rows) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(rows, v.size()))};
}

std::vector<double> constant(double value, std::size_t rows) { return std::vector<double>(rows, value); }

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string mu_label(const TraceTable& t) {
  const auto it = t.meta.find("M_u");
  return it == t.meta.end() ? t.source : it->second;
}

}  // namespace

std::vector<FigureData> build_figures(const std::vector<TraceTable>& runs, const std::optional<TraceTable>& baseline) {
  if (runs.empty()) throw Error(ErrorKind::MissingColumn, "no trace given");
  const TraceTable& main = runs.front();
  if (main.rows() == 0) throw Error(ErrorKind::MissingColumn, main.source + ": trace has no samples");
  const std::size_t rows = main.rows();
  const auto& t = main.column("t");
  const double M_u = main.meta_number("M_u");
  const double M_x = main.meta_number("M_x");
  const double M_e = main.meta_number("M_e");

  std::vector<FigureData> figs;

  FigureData f1{"fig1", "Online stability condition", "value", t, {}, {}};
  f1.names = {"stability_rhs", "margin", "M_u"};
  f1.series = {main.column("stability_rhs"), main.column("margin"), constant(M_u, rows)};
  figs.push_back(std::move(f1));

  FigureData f2{"fig2", "Modified tracking error norm", "||E^s||", t, {}, {}};
  f2.names = {"norm_Es", "M_e"};
  f2.series = {main.column("norm_Es"), constant(M_e, rows)};
  figs.push_back(std::move(f2));

  const std::size_t paired = baseline ? std::min(rows, baseline->rows()) : rows;
  FigureData f3{"fig3", "Control input", "u", head(t, paired), {}, {}};
  f3.names = {"u_applied"};
  f3.series = {head(main.column("u_applied"), paired)};
  if (baseline) {
    f3.names.emplace_back("u_baseline");
    f3.series.push_back(head(baseline->column("u_applied"), paired));
  }
  f3.names.insert(f3.names.end(), {"M_u", "neg_M_u"});
  f3.series.push_back(constant(M_u, paired));
  f3.series.push_back(constant(-M_u, paired));
  figs.push_back(std::move(f3));

  FigureData f4{"fig4", "State norm", "||X||", head(t, paired), {}, {}};
  f4.names = {"norm_X"};
  f4.series = {head(main.column("norm_X"), paired)};
  if (baseline) {
    f4.names.emplace_back("norm_X_baseline");
    f4.series.push_back(head(baseline->column("norm_X"), paired));
  }
  f4.names.emplace_back("M_x");
  f4.series.push_back(constant(M_x, paired));
  figs.push_back(std::move(f4));

  const int n = static_cast<int>(main.meta_number("n"));
  for (int i = 1; i <= std::min(n, 3); ++i) {
    const auto k = std::to_string(i);
    FigureData f{"fig" + std::to_string(4 + i), "State x" + k + " vs targets", "x" + k, t, {}, {}};
    f.names = {"x" + k, "xms" + k, "xm" + k};
    f.series = {main.column("x" + k), main.column("xms" + k), main.column("xm" + k)};
    figs.push_back(std::move(f));
  }

  std::size_t overlay_rows = rows;
  for (const auto& r : runs) overlay_rows = std::min(overlay_rows, r.rows());
  FigureData f8{"fig8", "Modified target x_m1 across M_u", "x_m1", head(t, overlay_rows), {}, {}};
  f8.names = {"xm1"};
  f8.series = {head(main.column("xm1"), overlay_rows)};
  for (const auto& r : runs) {
    f8.names.push_back("xms1_Mu=" + mu_label(r));
    f8.series.push_back(head(r.column("xms1"), overlay_rows));
  }
  figs.push_back(std::move(f8));
  return figs;
}

void write_figure_csv(const std::filesystem::path& path, const FigureData& fig) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "t";
  for (const auto& name : fig.names) out << "," << name;
  out << "\n";
  for (std::size_t r = 0; r < fig.t.size(); ++r) {
    out << fmt("%.17g", fig.t[r]);
    for (const auto& s : fig.series) out << "," << fmt("%.17g", s[r]);
    out << "\n";
  }
}

std::string render_svg(const FigureData& fig) {
  constexpr double kWidth = 800, kHeight = 480, kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;
  constexpr std::size_t kMaxPoints = 1500;
  static const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  double x0 = fig.t.empty() ? 0.0 : fig.t.front();
  double x1 = fig.t.empty() ? 1.0 : fig.t.back();
  if (!(x1 > x0)) x1 = x0 + 1.0;
  double y0 = std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();
  for (const auto& s : fig.series) {
    for (double v : s) {
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
    }
  }
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << fig.title << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    svg << "<line x1=\"" << fmt("%.2f", px(xv)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fmt("%.2f", px(xv))
        << "\" y2=\"" << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt("%.2f", px(xv)) << "\" y=\"" << kTop + ph + 20 << "\" text-anchor=\"middle\">"
        << fmt("%.3g", xv) << "</text>\n";
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt("%.2f", py(yv)) << "\" x2=\"" << kLeft << "\" y2=\""
        << fmt("%.2f", py(yv)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt("%.2f", py(yv) + 4) << "\" text-anchor=\"end\">"
        << fmt("%.3g", yv) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">t [s]</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 16 " << kTop + ph / 2
      << ")\" text-anchor=\"middle\">" << fig.y_label << "</text>\n";

  const std::size_t rows = fig.t.size();
  const std::size_t stride = std::max<std::size_t>(1, (rows + kMaxPoints - 1) / kMaxPoints);
  for (std::size_t k = 0; k < fig.series.size(); ++k) {
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t r = 0; r < rows; r += stride) {
      const double v = fig.series[k][r];
      if (!std::isfinite(v)) continue;
      svg << (first ? "" : " ") << fmt("%.2f", px(fig.t[r])) << "," << fmt("%.2f", py(std::clamp(v, y0, y1)));
      first = false;
    }
    svg << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 30
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kWidth - kRight + 35 << "\" y=\"" << ly << "\">" << fig.names[k] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> export_figures(const std::vector<TraceTable>& runs,
                                                  const std::optional<TraceTable>& baseline,
                                                  const std::filesystem::path& out_dir) {
  const auto figs = build_figures(runs, baseline);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& fig : figs) {
    const auto csv = out_dir / (fig.id + ".csv");
    write_figure_csv(csv, fig);
    const auto svg_path = out_dir / (fig.id + ".svg");
    std::ofstream svg(svg_path);
    if (!svg) throw Error(ErrorKind::IoError, "cannot write " + svg_path.string());
    svg << render_svg(fig);
    written.push_back(csv);
    written.push_back(svg_path);
  }
  return written;
}

}  // namespace cmrac
