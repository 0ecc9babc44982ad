#include "stochsync/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace stochsync {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  Range xr, yr;
  for (const auto& s : spec.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  if (spec.y_range) {
    yr.lo = spec.y_range->first;
    yr.hi = spec.y_range->second;
  } else {
    yr.finish();
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << xv << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
    << escape(spec.xlabel) << "</text>\n";
  o << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.ylabel) << "</text>\n";

  std::size_t idx = 0;
  for (const auto& s : spec.series) {
    const char* color = kPalette[idx++ % std::size(kPalette)];
    if (s.scatter) {
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(std::clamp(s.y[i], yr.lo, yr.hi))
          << "\" r=\"2.5\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o << px(s.x[i]) << ',' << py(std::clamp(s.y[i], yr.lo, yr.hi)) << ' ';
      }
      o << "\"/>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string trajectory_plot(const CsvTable& table, std::size_t component, const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  spec.xlabel = "t";
  spec.ylabel = "component " + std::to_string(component);
  const std::size_t tcol = table.column("t");
  // At most ~2000 points per trace.
  const std::size_t stride = std::max<std::size_t>(1, table.rows.size() / 2000);
  const std::string suffix = "_" + std::to_string(component);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& h = table.header[c];
    if (h.size() <= suffix.size() || h.compare(h.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    if (h.rfind("x_", 0) != 0) continue;
    PlotSeries s;
    s.label = h;
    for (std::size_t r = 0; r < table.rows.size(); r += stride) {
      s.x.push_back(table.rows[r][tcol]);
      s.y.push_back(table.rows[r][c]);
    }
    spec.series.push_back(std::move(s));
  }
  return render_svg(spec);
}

std::string sweep_plot(const CsvTable& table, const std::string& title) {
  const std::size_t pcol = 0;
  const std::size_t rcol = table.column("R");
  PlotSeries scatter{"R per seed", {}, {}, true};
  std::map<double, std::pair<double, int>> sums;
  for (const auto& row : table.rows) {
    scatter.x.push_back(row[pcol]);
    scatter.y.push_back(row[rcol]);
    if (std::isfinite(row[rcol])) {
      auto& [sum, count] = sums[row[pcol]];
      sum += row[rcol];
      ++count;
    }
  }
  PlotSeries mean{"mean R", {}, {}, false};
  for (const auto& [p, sc] : sums) {
    mean.x.push_back(p);
    mean.y.push_back(sc.first / sc.second);
  }
  PlotSpec spec;
  spec.title = title;
  spec.xlabel = table.header.empty() ? "parameter" : table.header[pcol];
  spec.ylabel = "R";
  spec.y_range = std::make_pair(0.0, 1.1);
  spec.series = {std::move(mean), std::move(scatter)};
  return render_svg(spec);
}

}  // namespace stochsync
