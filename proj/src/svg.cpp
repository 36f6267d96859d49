/*
 * Copyright 2026 The vtf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vtf/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace vtf::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string header(const std::string& comment) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!comment.empty()) {
    std::string c = comment;
    for (std::size_t pos; (pos = c.find("--")) != std::string::npos;) c.replace(pos, 2, "- -");
    out << "<!-- " << c << " -->\n";
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out.str();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string bar_chart(const std::vector<Bar>& bars, const std::string& title,
                      const std::string& comment) {
  std::ostringstream out;
  out << header(comment);
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& b : bars) {
    if (std::isfinite(b.value)) {
      lo = std::min(lo, b.value);
      hi = std::max(hi, b.value);
    }
  }
  if (hi == lo) hi = lo + 1.0;
  const double plot_w = kWidth - kLeft - 20.0;
  const double plot_h = kHeight - kTop - kBottom;
  const auto y_of = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };
  const double zero = y_of(0.0);
  out << "<line x1=\"" << kLeft << "\" y1=\"" << zero << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << zero << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << y_of(hi) + 4 << "\" text-anchor=\"end\">"
      << fmt(hi) << "</text>\n";
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << y_of(lo) + 4 << "\" text-anchor=\"end\">"
      << fmt(lo) << "</text>\n";
  const double slot = bars.empty() ? plot_w : plot_w / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.1;
    const double v = std::isfinite(bars[i].value) ? bars[i].value : (bars[i].value > 0 ? hi : lo);
    const double top = std::min(zero, y_of(v));
    const double h = std::abs(y_of(v) - zero);
    out << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << top << "\" width=\"" << slot * 0.8
        << "\" height=\"" << h << "\" fill=\"" << kPalette[0] << "\"><title>"
        << escape(bars[i].label) << ": " << fmt(bars[i].value) << "</title></rect>\n";
    out << "<text x=\"" << x + slot * 0.4 << "\" y=\"" << kHeight - kBottom + 15
        << "\" text-anchor=\"end\" transform=\"rotate(-45 " << x + slot * 0.4 << ' '
        << kHeight - kBottom + 15 << ")\">" << escape(bars[i].label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& comment) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream out;
  out << header(comment);
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-size=\"14\">" << escape(title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text x=\"15\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 15 " << kTop + plot_h / 2 << ")\">" << escape(y_label)
      << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_lo + (x_hi - x_lo) * t / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * t / 4.0;
    out << "<text x=\"" << px(fx) << "\" y=\"" << kTop + plot_h + 15
        << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
    out << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">"
        << fmt(fy) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::ostringstream path;
    bool pen_down = false;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        pen_down = false;
        continue;
      }
      path << (pen_down ? " L " : " M ") << px(s.x[i]) << ' ' << py(s.y[i]);
      pen_down = true;
    }
    out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    const double ly = kTop + 15.0 * static_cast<double>(k) + 10.0;
    out << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace vtf::svg
