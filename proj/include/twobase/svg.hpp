// Copyright 2026 The twobase Authors
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

/**
 * @file  svg.hpp
 * @brief Minimal scatter/line SVG charts. Every chart is a function of CSV
 *        text only, so re-rendering from a saved CSV reproduces the file.
 */

#ifndef TWOBASE_SVG_HPP
#define TWOBASE_SVG_HPP

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twobase/decimal.hpp"
#include "twobase/io.hpp"

namespace twobase::svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool line = false;
};

struct Chart {
  std::string title;
  std::string x_label, y_label;
  bool log_y = false;
  std::vector<Series> series;
  /// Horizontal reference lines (value, label).
  std::vector<std::pair<double, std::string>> hlines;
};

inline constexpr double kLogFloor = 1e-18;

namespace detail {

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

inline std::string tick_label(double v, bool log) {
  if (log) return "1e" + std::to_string(static_cast<int>(std::lround(v)));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace detail

inline std::string render(const Chart& c) {
  constexpr double W = 640, H = 420, L = 80, R = 160, T = 40, B = 60;
  auto ty = [&](double y) { return c.log_y ? std::log10(std::max(y, kLogFloor)) : y; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : c.series)
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  for (const auto& h : c.hlines) {
    y0 = std::min(y0, ty(h.first));
    y1 = std::max(y1, ty(h.first));
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  if (c.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);
  const double px = (W - L - R) / (x1 - x0), py = (H - T - B) / (y1 - y0);
  auto sx = [&](double x) { return L + (x - x0) * px; };
  auto sy = [&](double y) { return H - B - (ty(y) - y0) * py; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  o += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  o += "<text x=\"" + detail::num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       detail::escape(c.title) + "</text>\n";
  o += "<rect x=\"" + detail::num(L) + "\" y=\"" + detail::num(T) + "\" width=\"" + detail::num(W - L - R) + "\" height=\"" +
       detail::num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks: five on x, integer decades (or five) on y.
  for (int i = 0; i <= 4; ++i) {
    const double x = x0 + (x1 - x0) * i / 4.0;
    o += "<text x=\"" + detail::num(sx(x)) + "\" y=\"" + detail::num(H - B + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick_label(x, false) + "</text>\n";
  }
  std::vector<double> yt;
  if (c.log_y) {
    const int step = std::max(1, static_cast<int>(std::ceil((y1 - y0) / 8.0)));
    for (double v = y0; v <= y1 + 1e-9; v += step) yt.push_back(v);
  } else {
    for (int i = 0; i <= 4; ++i) yt.push_back(y0 + (y1 - y0) * i / 4.0);
  }
  for (double v : yt) {
    const double yy = H - B - (v - y0) * py;
    o += "<line x1=\"" + detail::num(L - 4) + "\" y1=\"" + detail::num(yy) + "\" x2=\"" + detail::num(L) + "\" y2=\"" +
         detail::num(yy) + "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + detail::num(L - 6) + "\" y=\"" + detail::num(yy + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick_label(v, c.log_y) + "</text>\n";
  }
  o += "<text x=\"" + detail::num(L + (W - L - R) / 2) + "\" y=\"" + detail::num(H - 16) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + detail::escape(c.x_label) + "</text>\n";
  o += "<text x=\"16\" y=\"" + detail::num(T + (H - T - B) / 2) + "\" transform=\"rotate(-90 16 " +
       detail::num(T + (H - T - B) / 2) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
       detail::escape(c.y_label) + "</text>\n";

  for (const auto& h : c.hlines) {
    o += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(sy(h.first)) + "\" x2=\"" + detail::num(W - R) + "\" y2=\"" +
         detail::num(sy(h.first)) + "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
    o += "<text x=\"" + detail::num(W - R + 4) + "\" y=\"" + detail::num(sy(h.first) + 4) +
         "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"red\">" + detail::escape(h.second) + "</text>\n";
  }

  double legend_y = T + 10;
  for (const Series& s : c.series) {
    if (s.line && s.points.size() > 1) {
      o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"";
      for (auto [x, y] : s.points)
        if (std::isfinite(x) && std::isfinite(y)) o += detail::num(sx(x)) + "," + detail::num(sy(y)) + " ";
      o += "\"/>\n";
    }
    for (auto [x, y] : s.points)
      if (std::isfinite(x) && std::isfinite(y))
        o += "<circle cx=\"" + detail::num(sx(x)) + "\" cy=\"" + detail::num(sy(y)) + "\" r=\"2.5\" fill=\"" + s.color +
             "\" fill-opacity=\"0.7\"/>\n";
    o += "<circle cx=\"" + detail::num(W - R + 12) + "\" cy=\"" + detail::num(legend_y + 20) + "\" r=\"4\" fill=\"" + s.color + "\"/>\n";
    o += "<text x=\"" + detail::num(W - R + 20) + "\" y=\"" + detail::num(legend_y + 24) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::escape(s.label) + "</text>\n";
    legend_y += 18;
  }
  o += "</svg>\n";
  return o;
}

/// Column lookup over parsed CSV rows (first row is the header).
class Table {
 public:
  explicit Table(const std::string& csv) : rows_(parse_csv(csv)) {
    if (rows_.empty()) throw Error("svg: empty CSV");
    for (std::size_t i = 0; i < rows_[0].size(); ++i) col_[rows_[0][i]] = i;
  }
  std::size_t size() const { return rows_.size() - 1; }
  const std::string& str(std::size_t r, const std::string& c) const { return rows_.at(r + 1).at(index(c)); }
  double num(std::size_t r, const std::string& c) const {
    const std::string& s = str(r, c);
    if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(s);
  }
  bool has(const std::string& c) const { return col_.count(c) > 0; }

 private:
  std::size_t index(const std::string& c) const {
    auto it = col_.find(c);
    if (it == col_.end()) throw Error("svg: missing CSV column " + c);
    return it->second;
  }
  std::vector<std::vector<std::string>> rows_;
  std::map<std::string, std::size_t> col_;
};

/// Epsilon per trial against state index, split at fidelity 0.99.
inline std::string ensemble_epsilon_plot(const std::string& trials_csv, double threshold = 8e-5) {
  Table t(trials_csv);
  Series hi{"fidelity > 0.99", "#e6862e", {}}, lo{"fidelity <= 0.99", "#2e6fe6", {}};
  for (std::size_t r = 0; r < t.size(); ++r) {
    const double f = t.num(r, "fidelity");
    (f > 0.99 ? hi : lo).points.emplace_back(t.num(r, "state_id"), t.num(r, "epsilon"));
  }
  Chart c{"Reconstruction error per trial", "state index", "epsilon", true, {lo, hi}, {{threshold, "8e-5"}}};
  return render(c);
}

/// Mean fidelity per state inside the low and mid epsilon bands.
inline std::string ensemble_band_plot(const std::string& trials_csv) {
  Table t(trials_csv);
  std::map<long, std::pair<double, int>> low, mid;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const long id = std::lround(t.num(r, "state_id"));
    const double e = t.num(r, "epsilon"), f = t.num(r, "fidelity");
    if (e < 1e-5) low[id].first += f, ++low[id].second;
    if (e > 1e-2 && e < 1e-1) mid[id].first += f, ++mid[id].second;
  }
  Series a{"epsilon < 1e-5", "#d62728", {}}, b{"1e-2 < epsilon < 1e-1", "#1f77b4", {}};
  for (auto& [id, v] : low) a.points.emplace_back(static_cast<double>(id), v.first / v.second);
  for (auto& [id, v] : mid) b.points.emplace_back(static_cast<double>(id), v.first / v.second);
  Chart c{"Band mean fidelity per state", "state index", "mean fidelity", false, {a, b}, {}};
  return render(c);
}

/// Band mean fidelity against noise strength.
inline std::string noise_plot(const std::string& trials_csv, double band = 8e-6) {
  Table t(trials_csv);
  std::map<double, std::pair<double, int>> low, best;
  std::map<std::pair<double, long>, std::pair<double, double>> per_state;  // (p, state) -> (eps, fid) of best
  for (std::size_t r = 0; r < t.size(); ++r) {
    const double p = t.num(r, "p"), e = t.num(r, "epsilon"), f = t.num(r, "fidelity");
    if (e < band) low[p].first += f, ++low[p].second;
    auto key = std::make_pair(p, std::lround(t.num(r, "state_id")));
    auto it = per_state.find(key);
    if (it == per_state.end() || e < it->second.first) per_state[key] = {e, f};
  }
  for (auto& [k, v] : per_state) best[k.first].first += v.second, ++best[k.first].second;
  Series a{"band mean", "#d62728", {}, true}, b{"best-epsilon mean", "#1f77b4", {}, true};
  for (auto& [p, v] : low) a.points.emplace_back(p, v.first / v.second);
  for (auto& [p, v] : best) b.points.emplace_back(p, v.first / v.second);
  Chart c{"Fidelity under noise", "noise p", "mean fidelity", false, {a, b}, {}};
  return render(c);
}

/// Best-epsilon mean and |1 - mean fidelity| along one precision axis.
inline std::string precision_plot(const std::string& trials_csv, const std::string& axis) {
  Table t(trials_csv);
  std::map<std::pair<double, long>, std::pair<double, double>> per_state;
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (t.str(r, "axis") != axis) continue;
    const double v = t.num(r, "value"), e = t.num(r, "epsilon"), f = t.num(r, "fidelity");
    auto key = std::make_pair(v, std::lround(t.num(r, "state_id")));
    auto it = per_state.find(key);
    if (it == per_state.end() || e < it->second.first) per_state[key] = {e, f};
  }
  std::map<double, std::pair<double, double>> sums;
  std::map<double, int> counts;
  for (auto& [k, v] : per_state) sums[k.first].first += v.first, sums[k.first].second += v.second, ++counts[k.first];
  Series a{"epsilon", "#1f77b4", {}, true}, b{"|1 - fidelity|", "#d62728", {}, true};
  for (auto& [v, s] : sums) {
    a.points.emplace_back(v, s.first / counts[v]);
    b.points.emplace_back(v, std::abs(1.0 - s.second / counts[v]));
  }
  Chart c{"Precision sweep: " + axis, axis, "value", true, {a, b}, {}};
  return render(c);
}

/// Fidelity against iteration for each qubit count (traces CSV).
inline std::string trace_plot(const std::string& traces_csv) {
  Table t(traces_csv);
  std::map<long, Series> by_n;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (t.num(r, "restart") != 0) continue;
    const long n = std::lround(t.num(r, "qubits"));
    Series& s = by_n[n];
    if (s.label.empty()) {
      s.label = std::to_string(n) + " qubits";
      s.color = colors[by_n.size() % 5];
      s.line = true;
    }
    s.points.emplace_back(t.num(r, "iteration"), std::abs(1.0 - t.num(r, "fidelity")));
  }
  Chart c{"Infidelity during reconstruction", "iteration", "|1 - fidelity|", true, {}, {}};
  for (auto& [n, s] : by_n) c.series.push_back(s);
  return render(c);
}

/// Second-basis distribution of a state and of its twin.
inline std::string twin_plot(const std::string& csv) {
  Table t(csv);
  Series a{"original", "#1f77b4", {}, true}, b{"twin", "#d62728", {}};
  for (std::size_t r = 0; r < t.size(); ++r) {
    a.points.emplace_back(t.num(r, "j"), t.num(r, "q_original"));
    b.points.emplace_back(t.num(r, "j"), t.num(r, "q_twin"));
  }
  Chart c{"Second-basis distribution: state and twin", "outcome j", "Q_j", false, {a, b}, {}};
  return render(c);
}

}  // namespace twobase::svg

#endif  // TWOBASE_SVG_HPP
