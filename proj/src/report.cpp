#include "evt/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evt/format.hpp"

namespace evt {

namespace {

const char* family_name(TestFamily family) {
  return family == TestFamily::MaxGumbel ? "max_gumbel" : "wald_chi_square";
}

void require_content(const AnalysisReport& report) {
  if (report.tests.empty() && !report.hill && !report.sweep)
    throw parameter_error("nothing to report: no tests, no estimates, no sweep");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write: " + path);
  out << content;
  if (!out) throw data_error("write failed: " + path);
}

// ---- SVG helpers ------------------------------------------------------

constexpr double kPanelW = 440.0;
constexpr double kPanelH = 330.0;
constexpr double kMarginL = 56.0;
constexpr double kMarginR = 16.0;
constexpr double kMarginT = 34.0;
constexpr double kMarginB = 44.0;

const char* kPalette[5] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e"};

struct Panel {
  double x0 = 0.0;  // left edge of the whole panel cell
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;

  double px(double x) const {
    return x0 + kMarginL +
           (x - xmin) / (xmax - xmin) * (kPanelW - kMarginL - kMarginR);
  }
  double py(double y) const {
    return kMarginT + (ymax - y) / (ymax - ymin) * (kPanelH - kMarginT - kMarginB);
  }
};

std::string esc(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

void panel_frame(std::ostringstream& svg, const Panel& panel,
                 const std::string& title, const std::string& x_label,
                 const std::string& y_label) {
  svg << "<rect x=\"" << format_double(panel.px(panel.xmin)) << "\" y=\""
      << format_double(panel.py(panel.ymax)) << "\" width=\""
      << format_double(panel.px(panel.xmax) - panel.px(panel.xmin))
      << "\" height=\""
      << format_double(panel.py(panel.ymin) - panel.py(panel.ymax))
      << "\" fill=\"none\" stroke=\"#444444\"/>\n";
  svg << "<text x=\"" << format_double(panel.x0 + kPanelW / 2) << "\" y=\"20\""
      << " text-anchor=\"middle\" font-weight=\"bold\">" << esc(title)
      << "</text>\n";
  svg << "<text x=\"" << format_double(panel.x0 + kPanelW / 2) << "\" y=\""
      << format_double(kPanelH - 8) << "\" text-anchor=\"middle\">"
      << esc(x_label) << "</text>\n";
  svg << "<text x=\"" << format_double(panel.x0 + 14) << "\" y=\""
      << format_double(kPanelH / 2) << "\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 " << format_double(panel.x0 + 14) << " "
      << format_double(kPanelH / 2) << ")\">" << esc(y_label) << "</text>\n";
}

void y_ticks(std::ostringstream& svg, const Panel& panel, int count) {
  for (int i = 0; i <= count; ++i) {
    const double v =
        panel.ymin + (panel.ymax - panel.ymin) * i / static_cast<double>(count);
    const double y = panel.py(v);
    svg << "<line x1=\"" << format_double(panel.px(panel.xmin) - 4) << "\" y1=\""
        << format_double(y) << "\" x2=\"" << format_double(panel.px(panel.xmin))
        << "\" y2=\"" << format_double(y) << "\" stroke=\"#444444\"/>\n";
    std::ostringstream label;
    label.precision(3);
    label << v;
    svg << "<text x=\"" << format_double(panel.px(panel.xmin) - 7) << "\" y=\""
        << format_double(y + 4) << "\" text-anchor=\"end\">" << label.str()
        << "</text>\n";
  }
}

void x_tick(std::ostringstream& svg, const Panel& panel, double v,
            const std::string& label) {
  const double x = panel.px(v);
  svg << "<line x1=\"" << format_double(x) << "\" y1=\""
      << format_double(panel.py(panel.ymin)) << "\" x2=\"" << format_double(x)
      << "\" y2=\"" << format_double(panel.py(panel.ymin) + 4)
      << "\" stroke=\"#444444\"/>\n";
  svg << "<text x=\"" << format_double(x) << "\" y=\""
      << format_double(panel.py(panel.ymin) + 17) << "\" text-anchor=\"middle\">"
      << esc(label) << "</text>\n";
}

void sweep_panel(std::ostringstream& svg, const Panel& panel,
                 const SweepResult& sweep) {
  panel_frame(svg, panel, "p-value against tail fraction", "k", "p-value");
  y_ticks(svg, panel, 5);
  const int k_lo = sweep.k_grid.front();
  const int k_hi = sweep.k_grid.back();
  const int tick_step = std::max(1, (k_hi - k_lo) / 5);
  for (int k = k_lo; k <= k_hi; k += tick_step)
    x_tick(svg, panel, k, std::to_string(k));

  // Level line.
  const double ya = panel.py(sweep.alpha);
  svg << "<line x1=\"" << format_double(panel.px(panel.xmin)) << "\" y1=\""
      << format_double(ya) << "\" x2=\"" << format_double(panel.px(panel.xmax))
      << "\" y2=\"" << format_double(ya)
      << "\" stroke=\"#888888\" stroke-dasharray=\"5,4\"/>\n";

  for (std::size_t c = 0; c < sweep.curves.size(); ++c) {
    const SweepCurve& curve = sweep.curves[c];
    const char* color = kPalette[c % 5];
    // Gaps split the trajectory into separate polylines.
    std::vector<std::string> points;
    auto flush = [&]() {
      if (points.size() == 1) {
        svg << "<circle cx=\"" << points.front().substr(0, points.front().find(','))
            << "\" cy=\"" << points.front().substr(points.front().find(',') + 1)
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      } else if (points.size() > 1) {
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (i) svg << ' ';
          svg << points[i];
        }
        svg << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < sweep.k_grid.size(); ++i) {
      if (curve.p_values[i]) {
        points.push_back(format_double(panel.px(sweep.k_grid[i])) + "," +
                         format_double(panel.py(*curve.p_values[i])));
      } else {
        flush();
      }
    }
    flush();
    // Legend entry.
    const double lx = panel.px(panel.xmax) - 92;
    const double ly = panel.py(panel.ymax) + 16 + 16 * static_cast<double>(c);
    svg << "<line x1=\"" << format_double(lx) << "\" y1=\"" << format_double(ly - 4)
        << "\" x2=\"" << format_double(lx + 22) << "\" y2=\""
        << format_double(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << format_double(lx + 27) << "\" y=\""
        << format_double(ly) << "\">" << esc(test_kind_name(curve.test))
        << "</text>\n";
  }
}

void hill_panel(std::ostringstream& svg, const Panel& panel,
                const HillSummary& hill) {
  panel_frame(svg, panel,
              "Hill estimates, " +
                  std::to_string(static_cast<int>(
                      std::lround(hill.ci_level * 100))) +
                  "% intervals (k=" + std::to_string(hill.k) + ")",
              "dimension", "extreme value index");
  y_ticks(svg, panel, 5);
  const std::size_t p = hill.gamma_hat.size();
  const std::size_t tick_step = std::max<std::size_t>(1, p / 6);
  for (std::size_t j = 0; j < p; j += tick_step)
    x_tick(svg, panel, static_cast<double>(j + 1), std::to_string(j + 1));

  for (std::size_t j = 0; j < p; ++j) {
    const double x = panel.px(static_cast<double>(j + 1));
    svg << "<line x1=\"" << format_double(x) << "\" y1=\""
        << format_double(panel.py(hill.lower[j])) << "\" x2=\""
        << format_double(x) << "\" y2=\"" << format_double(panel.py(hill.upper[j]))
        << "\" stroke=\"#1f77b4\" stroke-width=\"1.2\"/>\n";
    svg << "<circle cx=\"" << format_double(x) << "\" cy=\""
        << format_double(panel.py(hill.gamma_hat[j]))
        << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
  }
}

void contributions_panel(std::ostringstream& svg, const Panel& panel,
                         const NamedTest& test) {
  panel_frame(svg, panel,
              test_kind_name(test.kind) + " per-dimension contributions (k=" +
                  std::to_string(test.k) + ")",
              "dimension", "contribution");
  y_ticks(svg, panel, 5);
  const std::size_t p = test.report.per_dim_contrib.size();
  const std::size_t tick_step = std::max<std::size_t>(1, p / 6);
  for (std::size_t j = 0; j < p; j += tick_step)
    x_tick(svg, panel, static_cast<double>(j + 1), std::to_string(j + 1));

  const double base = panel.py(std::max(0.0, panel.ymin));
  const double width =
      0.7 * (panel.px(panel.xmax) - panel.px(panel.xmin)) / std::max<std::size_t>(p, 1);
  for (std::size_t j = 0; j < p; ++j) {
    const double v = test.report.per_dim_contrib[j];
    const double x = panel.px(static_cast<double>(j + 1));
    const double top = panel.py(v);
    svg << "<rect x=\"" << format_double(x - width / 2) << "\" y=\""
        << format_double(std::min(top, base)) << "\" width=\""
        << format_double(width) << "\" height=\""
        << format_double(std::fabs(base - top))
        << "\" fill=\"" << (j == test.report.argmax_dim ? "#d62728" : "#1f77b4")
        << "\"/>\n";
  }
  if (test.report.threshold <= panel.ymax) {
    const double yt = panel.py(test.report.threshold);
    svg << "<line x1=\"" << format_double(panel.px(panel.xmin)) << "\" y1=\""
        << format_double(yt) << "\" x2=\"" << format_double(panel.px(panel.xmax))
        << "\" y2=\"" << format_double(yt)
        << "\" stroke=\"#888888\" stroke-dasharray=\"5,4\"/>\n";
  }
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "svg") return ReportFormat::Svg;
  throw parameter_error("unknown format '" + name +
                        "' (expected json, csv or svg)");
}

std::string report_json(const AnalysisReport& report) {
  require_content(report);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "analysis_report";
  j["command"] = report.command;
  j["input"] = {{"path", report.input_path},
                {"n", report.n},
                {"p", report.p},
                {"transform", report.transform}};
  j["alpha"] = report.alpha;
  j["null"] = report.null_kind;

  j["tests"] = nlohmann::json::array();
  for (const NamedTest& test : report.tests) {
    nlohmann::json t;
    t["name"] = test_kind_name(test.kind);
    t["k"] = test.k;
    t["family"] = family_name(test.report.family);
    t["statistic"] = test.report.statistic;
    t["normalized"] = test.report.normalized;
    t["threshold"] = test.report.threshold;
    t["p_value"] = test.report.p_value.value();
    t["reject"] = test.report.reject;
    t["argmax_dimension"] = test.report.argmax_dim + 1;
    if (test.report.gamma_bar) t["gamma_bar"] = *test.report.gamma_bar;
    if (test.report.df) t["df"] = *test.report.df;
    t["per_dim_contrib"] = test.report.per_dim_contrib;
    j["tests"].push_back(std::move(t));
  }

  if (report.hill) {
    nlohmann::json h;
    h["k"] = report.hill->k;
    h["ci_level"] = report.hill->ci_level;
    h["names"] = report.hill->names;
    h["gamma_hat"] = report.hill->gamma_hat;
    h["lower"] = report.hill->lower;
    h["upper"] = report.hill->upper;
    h["thresholds"] = report.hill->thresholds;
    j["hill"] = std::move(h);
  }
  if (report.sweep) {
    nlohmann::json s;
    s["k_grid"] = report.sweep->k_grid;
    s["alpha"] = report.sweep->alpha;
    s["curves"] = nlohmann::json::array();
    for (const SweepCurve& curve : report.sweep->curves) {
      nlohmann::json c;
      c["test"] = test_kind_name(curve.test);
      c["p_values"] = nlohmann::json::array();
      for (const auto& pv : curve.p_values) {
        if (pv)
          c["p_values"].push_back(*pv);
        else
          c["p_values"].push_back(nullptr);
      }
      c["gap_reasons"] = curve.gap_reasons;
      s["curves"].push_back(std::move(c));
    }
    j["sweep"] = std::move(s);
  }
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string report_csv(const AnalysisReport& report) {
  require_content(report);
  std::ostringstream out;
  if (!report.tests.empty()) {
    out << "name,k,family,statistic,normalized,threshold,p_value,reject,"
           "argmax_dimension,gamma_bar,df\n";
    for (const NamedTest& test : report.tests) {
      out << test_kind_name(test.kind) << ',' << test.k << ','
          << family_name(test.report.family) << ','
          << format_double(test.report.statistic) << ','
          << format_double(test.report.normalized) << ','
          << format_double(test.report.threshold) << ','
          << format_double(test.report.p_value.value()) << ','
          << (test.report.reject ? "true" : "false") << ','
          << test.report.argmax_dim + 1 << ',';
      if (test.report.gamma_bar) out << format_double(*test.report.gamma_bar);
      out << ',';
      if (test.report.df) out << *test.report.df;
      out << '\n';
    }
    return out.str();
  }
  if (report.sweep) {
    out << "k";
    for (const SweepCurve& curve : report.sweep->curves)
      out << ',' << test_kind_name(curve.test);
    out << '\n';
    for (std::size_t i = 0; i < report.sweep->k_grid.size(); ++i) {
      out << report.sweep->k_grid[i];
      for (const SweepCurve& curve : report.sweep->curves) {
        out << ',';
        if (curve.p_values[i]) out << format_double(*curve.p_values[i]);
      }
      out << '\n';
    }
    return out.str();
  }
  out << "dimension,name,gamma_hat,lower,upper,threshold\n";
  for (std::size_t j = 0; j < report.hill->gamma_hat.size(); ++j) {
    out << j + 1 << ',' << report.hill->names[j] << ','
        << format_double(report.hill->gamma_hat[j]) << ','
        << format_double(report.hill->lower[j]) << ','
        << format_double(report.hill->upper[j]) << ','
        << format_double(report.hill->thresholds[j]) << '\n';
  }
  return out.str();
}

std::string report_svg(const AnalysisReport& report) {
  require_content(report);

  // Panels, left to right: sweep trajectories, Hill intervals, or the
  // contribution profile of the first test when neither is present.
  int panels = 0;
  if (report.sweep) ++panels;
  if (report.hill) ++panels;
  const bool contributions = panels == 0;
  if (contributions) panels = 1;

  const double width = kPanelW * panels;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << format_double(width) << "\" height=\"" << format_double(kPanelH)
      << "\" viewBox=\"0 0 " << format_double(width) << " "
      << format_double(kPanelH) << "\" font-family=\"sans-serif\""
      << " font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << format_double(width)
      << "\" height=\"" << format_double(kPanelH) << "\" fill=\"#ffffff\"/>\n";

  double x0 = 0.0;
  if (report.sweep) {
    Panel panel;
    panel.x0 = x0;
    panel.xmin = report.sweep->k_grid.front();
    panel.xmax = std::max<double>(report.sweep->k_grid.back(),
                                  panel.xmin + 1.0);
    panel.ymin = 0.0;
    panel.ymax = 1.0;
    sweep_panel(svg, panel, *report.sweep);
    x0 += kPanelW;
  }
  if (report.hill) {
    Panel panel;
    panel.x0 = x0;
    panel.xmin = 0.5;
    panel.xmax = static_cast<double>(report.hill->gamma_hat.size()) + 0.5;
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < report.hill->gamma_hat.size(); ++j) {
      lo = std::min(lo, report.hill->lower[j]);
      hi = std::max(hi, report.hill->upper[j]);
    }
    panel.ymin = lo;
    panel.ymax = hi <= lo ? lo + 1.0 : hi * 1.05;
    hill_panel(svg, panel, *report.hill);
    x0 += kPanelW;
  }
  if (contributions) {
    const NamedTest& test = report.tests.front();
    Panel panel;
    panel.x0 = x0;
    panel.xmin = 0.5;
    panel.xmax = static_cast<double>(test.report.per_dim_contrib.size()) + 0.5;
    double hi = test.report.threshold;
    for (double v : test.report.per_dim_contrib) hi = std::max(hi, v);
    panel.ymin = 0.0;
    panel.ymax = hi <= 0.0 ? 1.0 : hi * 1.08;
    contributions_panel(svg, panel, test);
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit_report(const AnalysisReport& report,
                                     ReportFormat format,
                                     const std::string& out_stem) {
  require_content(report);
  std::vector<std::string> written;
  switch (format) {
    case ReportFormat::Json: {
      const std::string path = out_stem + ".json";
      write_file(path, report_json(report));
      written.push_back(path);
      break;
    }
    case ReportFormat::Csv: {
      const std::string path = out_stem + ".csv";
      write_file(path, report_csv(report));
      written.push_back(path);
      break;
    }
    case ReportFormat::Svg: {
      const std::string path = out_stem + ".svg";
      write_file(path, report_svg(report));
      written.push_back(path);
      break;
    }
  }
  return written;
}

}  // namespace evt
