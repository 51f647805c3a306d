#include "convexmix/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "convexmix/errors.hpp"

namespace convexmix {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<std::size_t> decimate(std::size_t count, std::size_t max_points) {
  std::vector<std::size_t> idx;
  if (count <= max_points || max_points < 2) {
    for (std::size_t i = 0; i < count; ++i) idx.push_back(i);
    return idx;
  }
  const std::size_t stride = (count + max_points - 2) / (max_points - 1);
  for (std::size_t i = 0; i < count; i += stride) idx.push_back(i);
  if (idx.back() != count - 1) idx.push_back(count - 1);
  return idx;
}

}  // namespace

PlotSeries plot_series_from_table(const CsvTable& table) {
  const std::size_t it = table.column("t");
  const std::size_t ir = table.column("norm_regret");
  const std::size_t ib = table.column("bound_norm");
  if (table.rows.empty()) throw ParseError("no data rows", 2);
  PlotSeries s;
  for (const auto& row : table.rows) {
    s.n.push_back(row[it]);
    s.norm_regret.push_back(row[ir]);
    s.bound_norm.push_back(row[ib]);
  }
  return s;
}

std::string render_plot_svg(const PlotSeries& series, const PlotOptions& options) {
  const std::size_t count = series.n.size();
  if (count == 0 || series.norm_regret.size() != count || series.bound_norm.size() != count) {
    throw DomainError("render_plot_svg: series must be non-empty and equally long");
  }
  if (options.logx && *std::min_element(series.n.begin(), series.n.end()) <= 0.0) {
    throw DomainError("render_plot_svg: log-scale x needs positive n");
  }

  auto xval = [&](double n) { return options.logx ? std::log10(n) : n; };
  double x_lo = xval(series.n.front()), x_hi = x_lo;
  double y_lo = 0.0, y_hi = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    x_lo = std::min(x_lo, xval(series.n[i]));
    x_hi = std::max(x_hi, xval(series.n[i]));
    y_lo = std::min({y_lo, series.norm_regret[i], series.bound_norm[i]});
    y_hi = std::max({y_hi, series.norm_regret[i], series.bound_norm[i]});
  }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi == y_lo) y_hi = y_lo + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double n) { return kLeft + (xval(n) - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double v) { return kTop + (y_hi - v) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << options.title << "</text>\n";
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w) << "\" height=\""
      << fmt(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double v = y_lo + (y_hi - y_lo) * k / 4.0;
    svg << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(v) << "</text>\n";
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
    const double n_label = options.logx ? std::pow(10.0, xv) : xv;
    svg << "<text x=\"" << fmt(kLeft + plot_w * k / 4.0) << "\" y=\"" << fmt(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(n_label)
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">n" << (options.logx ? " (log scale)" : "")
      << "</text>\n";
  if (y_lo < 0.0 && y_hi > 0.0) {
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py(0.0)) << "\" x2=\"" << fmt(kLeft + plot_w) << "\" y2=\""
        << fmt(py(0.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }

  const auto idx = decimate(count, options.max_points);
  auto emit = [&](const std::vector<double>& values, const char* color, const char* id) {
    if (idx.size() == 1) {
      svg << "<circle id=\"" << id << "\" cx=\"" << fmt(px(series.n[idx[0]])) << "\" cy=\"" << fmt(py(values[idx[0]]))
          << "\" r=\"4\" fill=\"" << color << "\"/>\n";
      return;
    }
    svg << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < idx.size(); ++k) {
      svg << (k ? " " : "") << fmt(px(series.n[idx[k]])) << ',' << fmt(py(values[idx[k]]));
    }
    svg << "\"/>\n";
  };
  emit(series.bound_norm, "#d62728", "bound");
  emit(series.norm_regret, "#1f77b4", "regret");

  const double lx = kLeft + plot_w - 330;
  const double ly = kTop + 16;
  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\"" << fmt(ly)
      << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4)
      << "\">bound / n  (ln 2 / a at lambda_1 = 1/2)</text>\n";
  svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly + 18) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\""
      << fmt(ly + 18) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 22) << "\">time-normalized regret R_n / n</text>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace convexmix
