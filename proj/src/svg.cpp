/*
 * Copyright 2026 The cagebo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cagebo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cagebo {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string heat(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(255 * t);
  const int g = static_cast<int>(220 * (1.0 - std::abs(2.0 * t - 1.0)) + 35);
  const int b = static_cast<int>(255 * (1.0 - t));
  std::ostringstream os;
  os << "rgb(" << r << ',' << g << ',' << b << ')';
  return os.str();
}

}  // namespace

std::string convergence_svg(const std::vector<MethodSeries>& series, const std::string& title) {
  const double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 50;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t len = 1;
  for (const auto& s : series) {
    len = std::max(len, s.median.size());
    for (const auto* v : {&s.median, &s.ci_low, &s.ci_high}) {
      for (double y : *v) {
        if (!std::isfinite(y)) continue;
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](std::size_t i) { return left + pw * (len > 1 ? double(i) / double(len - 1) : 0.0); };
  auto py = [&](double y) { return top + ph * (1.0 - (y - lo) / (hi - lo)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = lo + (hi - lo) * k / 4.0;
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << y << "</text>\n";
    const std::size_t i = (len - 1) * static_cast<std::size_t>(k) / 4;
    os << "<text x=\"" << px(i) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << i
       << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10
     << "\" text-anchor=\"middle\">iteration</text>\n";
  for (std::size_t m = 0; m < series.size(); ++m) {
    const auto& s = series[m];
    const std::string color = kPalette[m % std::size(kPalette)];
    const std::size_t n = std::min({s.median.size(), s.ci_low.size(), s.ci_high.size()});
    if (n == 0) continue;
    os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < n; ++i) os << px(i) << ',' << py(s.ci_high[i]) << ' ';
    for (std::size_t i = n; i-- > 0;) os << px(i) << ',' << py(s.ci_low[i]) << ' ';
    os << "\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) os << px(i) << ',' << py(s.median[i]) << ' ';
    os << "\"/>\n";
    const double ly = top + 16 + 18.0 * static_cast<double>(m);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\""
       << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape(s.method) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string district_map_svg(const DistrictingInstance& inst, const Plan& plan, const PlanEvaluation& eval) {
  const double size = 520, margin = 30;
  std::vector<double> xs(inst.regions), ys(inst.regions);
  for (std::size_t a = 0; a < inst.regions; ++a) {
    if (inst.coords.size() == inst.regions) {
      xs[a] = inst.coords[a][0];
      ys[a] = inst.coords[a][1];
    } else {
      const double ang = 2.0 * M_PI * double(a) / double(inst.regions);
      xs[a] = std::cos(ang);
      ys[a] = std::sin(ang);
    }
  }
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  const double span = std::max({*xmax - *xmin, *ymax - *ymin, 1e-9});
  auto sx = [&](double x) { return margin + (size - 2 * margin) * (x - *xmin) / span; };
  auto sy = [&](double y) { return size - margin - (size - 2 * margin) * (y - *ymin) / span; };

  double wlo = std::numeric_limits<double>::infinity(), whi = -wlo;
  for (const auto& z : eval.zones) wlo = std::min(wlo, z.workload), whi = std::max(whi, z.workload);
  const double wspan = whi - wlo > 1e-12 ? whi - wlo : 1.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 40
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t a = 0; a < inst.regions; ++a) {
    for (std::size_t b : inst.neighbors[a]) {
      if (b <= a) continue;
      const bool cut = plan.zone[a] != plan.zone[b];
      os << "<line x1=\"" << sx(xs[a]) << "\" y1=\"" << sy(ys[a]) << "\" x2=\"" << sx(xs[b]) << "\" y2=\""
         << sy(ys[b]) << "\" stroke=\"" << (cut ? "#bbbbbb" : "black") << "\" stroke-width=\""
         << (cut ? 0.5 : 2) << "\"/>\n";
    }
  }
  for (std::size_t a = 0; a < inst.regions; ++a) {
    const std::size_t z = plan.zone[a];
    const double w = z < eval.zones.size() ? eval.zones[z].workload : wlo;
    os << "<circle cx=\"" << sx(xs[a]) << "\" cy=\"" << sy(ys[a]) << "\" r=\"11\" fill=\""
       << heat((w - wlo) / wspan) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << sx(xs[a]) << "\" y=\"" << sy(ys[a]) + 3 << "\" text-anchor=\"middle\">" << z
       << "</text>\n";
  }
  const double bar_x = margin, bar_y = size + 4, bar_w = 200, bar_h = 10;
  os << "<defs><linearGradient id=\"rho\">";
  for (int k = 0; k <= 4; ++k) {
    os << "<stop offset=\"" << k * 25 << "%\" stop-color=\"" << heat(k / 4.0) << "\"/>";
  }
  os << "</linearGradient></defs>\n";
  os << "<rect x=\"" << bar_x << "\" y=\"" << bar_y << "\" width=\"" << bar_w << "\" height=\"" << bar_h
     << "\" fill=\"url(#rho)\" stroke=\"black\"/>\n";
  os << "<text x=\"" << bar_x << "\" y=\"" << bar_y + 22 << "\">" << wlo << "</text>\n";
  os << "<text x=\"" << bar_x + bar_w << "\" y=\"" << bar_y + 22 << "\" text-anchor=\"end\">" << whi
     << "</text>\n";
  os << "<text x=\"" << bar_x + bar_w + 12 << "\" y=\"" << bar_y + 9 << "\">zone workload, variance "
     << eval.variance << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace cagebo
