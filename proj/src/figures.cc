// Copyright 2026 The Spreadlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spreadlearn/figures.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spreadlearn/error.h"

namespace spreadlearn {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

struct Frame {
  double left, top, width, height;
  AxisRange x, y;

  double X(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * width; }
  double Y(double v) const {
    return top + height - (v - y.lo) / (y.hi - y.lo) * height;
  }
};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void Axes(std::ostringstream& svg, const Frame& f, const std::string& x_label,
          const std::string& y_label) {
  svg << fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
      "fill=\"none\" stroke=\"black\"/>\n",
      f.left, f.top, f.width, f.height);
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
    const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
    svg << fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" "
        "text-anchor=\"middle\">{:.3g}</text>\n",
        f.X(xv), f.top + f.height + 14, xv);
    svg << fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" "
        "text-anchor=\"end\">{:.3g}</text>\n",
        f.left - 4, f.Y(yv) + 3, yv);
  }
  svg << fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" "
      "text-anchor=\"middle\">{}</text>\n",
      f.left + f.width / 2, f.top + f.height + 32, Escape(x_label));
  svg << fmt::format(
      "<text transform=\"translate({:.1f},{:.1f}) rotate(-90)\" "
      "font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
      f.left - 40, f.top + f.height / 2, Escape(y_label));
}

}  // namespace

AxisRange PaddedRange(const std::vector<double>& values, double margin) {
  if (values.empty()) return {0.0, 1.0};
  const auto [lo, hi] = std::ranges::minmax(values);
  const double span = hi - lo;
  if (span == 0.0) return {lo - margin, hi + margin};
  return {lo - margin * span, hi + margin * span};
}

LinePlot AccuracyPlot(const ExperimentReport& report,
                      const std::vector<Arm>& arms,
                      const std::vector<double>& p_flips,
                      std::vector<std::string>* warnings) {
  LinePlot plot;
  plot.title = "Clean test accuracy";
  plot.x_label = "flip probability p_f";
  plot.y_label = "test accuracy";
  const auto summaries = report.Summaries(arms, p_flips);
  std::vector<double> xs, ys;
  for (Arm arm : arms) {
    PlotSeries series;
    series.name = ToString(arm);
    for (const auto& s : summaries) {
      if (s.arm != arm || s.runs == 0) continue;
      series.x.push_back(s.p_flip);
      series.y.push_back(s.mean_test);
      series.err.push_back(s.std_test);
      xs.push_back(s.p_flip);
      ys.push_back(s.mean_test - s.std_test);
      ys.push_back(s.mean_test + s.std_test);
    }
    if (series.x.empty()) {
      if (warnings) warnings->push_back("arm " + series.name + " has no rows");
      continue;
    }
    plot.series.push_back(std::move(series));
  }
  if (plot.series.empty()) throw InvalidArgument("empty report: nothing to plot");
  plot.x_range = PaddedRange(xs);
  plot.y_range = PaddedRange(ys);
  return plot;
}

std::string RenderSvg(const LinePlot& plot) {
  const Frame f{70, 40, 460, 300, plot.x_range, plot.y_range};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
         "height=\"400\" font-family=\"sans-serif\">\n";
  svg << fmt::format(
      "<text x=\"{:.1f}\" y=\"24\" font-size=\"14\" "
      "text-anchor=\"middle\">{}</text>\n",
      f.left + f.width / 2, Escape(plot.title));
  Axes(svg, f, plot.x_label, plot.y_label);
  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      svg << fmt::format("{:.2f},{:.2f} ", f.X(s.x[j]), f.Y(s.y[j]));
    }
    svg << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!s.err.empty() && s.err[j] > 0.0) {
        svg << fmt::format(
            "<line x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1:.2f}\" y2=\"{2:.2f}\" "
            "stroke=\"{3}\"/>\n",
            f.X(s.x[j]), f.Y(s.y[j] - s.err[j]), f.Y(s.y[j] + s.err[j]), color);
      }
      svg << fmt::format(
          "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
          f.X(s.x[j]), f.Y(s.y[j]), color);
    }
    const double ly = f.top + 14 + 18 * static_cast<double>(i);
    svg << fmt::format(
        "<line x1=\"550\" x2=\"575\" y1=\"{0:.1f}\" y2=\"{0:.1f}\" "
        "stroke=\"{1}\" stroke-width=\"2\"/>\n"
        "<text x=\"582\" y=\"{2:.1f}\" font-size=\"11\">{3}</text>\n",
        ly, color, ly + 4, Escape(s.name));
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string RenderReconPanels(const std::vector<ReconstructionCurve>& curves) {
  if (curves.empty()) throw InvalidArgument("no curves to plot");
  const double panel = 200, gap = 60;
  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" "
      "height=\"300\" font-family=\"sans-serif\">\n",
      gap + curves.size() * (panel + gap));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const Frame f{gap + i * (panel + gap), 40, panel, panel,
                  PaddedRange({0.0, 1.0}), PaddedRange({0.0, 1.0})};
    svg << fmt::format(
        "<text x=\"{:.1f}\" y=\"24\" font-size=\"13\" "
        "text-anchor=\"middle\">p_f = {}</text>\n",
        f.left + panel / 2, c.p_flip);
    Axes(svg, f, "theta0", "argmax theta");
    svg << fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
        "stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n",
        f.X(0), f.Y(0), f.X(1), f.Y(1));
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
           "points=\"";
    for (std::size_t j = 0; j < c.theta0.size(); ++j) {
      svg << fmt::format("{:.2f},{:.2f} ", f.X(c.theta0[j]),
                         f.Y(c.argmax_theta[j]));
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string RenderImageGrid(const std::vector<ImageRow>& rows, std::size_t side,
                            double lo, double hi) {
  if (rows.empty()) throw InvalidArgument("no images to draw");
  const double px = 4.0, cell = side * px + 8, label_w = 90;
  std::size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.records.size());
  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" "
      "height=\"{:.0f}\" font-family=\"sans-serif\" "
      "shape-rendering=\"crispEdges\">\n",
      label_w + cols * cell, rows.size() * cell + 8);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const double top = 4 + r * cell;
    svg << fmt::format(
        "<text x=\"4\" y=\"{:.1f}\" font-size=\"11\">{}</text>\n",
        top + cell / 2, Escape(row.label));
    const bool discrete = row.data->domain().discrete();
    const double k1 = discrete ? row.data->domain().num_states - 1 : 1.0;
    for (std::size_t c = 0; c < row.records.size(); ++c) {
      const auto x = row.data->x(row.records[c]);
      if (x.size() != side * side) {
        throw InvalidArgument("record size does not match the image side");
      }
      const double left = label_w + c * cell;
      for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
          double v = x[i * side + j];
          v = discrete ? v / k1 : (v - lo) / (hi - lo);
          const int grey = 255 - static_cast<int>(
                                     std::lround(255 * std::clamp(v, 0.0, 1.0)));
          svg << fmt::format(
              "<rect x=\"{:.0f}\" y=\"{:.0f}\" width=\"{:.0f}\" "
              "height=\"{:.0f}\" fill=\"rgb({},{},{})\"/>\n",
              left + j * px, top + i * px, px, px, grey, grey, grey);
        }
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void WriteText(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace spreadlearn
