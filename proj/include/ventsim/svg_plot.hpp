#pragma once

// Minimal static SVG rendering of reports. Output is a pure function of the
// inputs: fixed-precision coordinates, fixed palette, no timestamps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ventsim/errors.hpp"
#include "ventsim/parameters.hpp"
#include "ventsim/sobol.hpp"
#include "ventsim/uq.hpp"

namespace ventsim::svg {

inline constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                        "#9467bd", "#ff7f0e", "#555555"};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

/// Rounded axis tick values covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// A plot area with linear data-to-pixel mapping.
class Figure {
 public:
  Figure(double width, double height, std::string title) : w_(width), h_(height), title_(std::move(title)) {}

  void set_limits(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) {
      y0 -= 0.5;
      y1 += 0.5;
    }
    x0_ = x0, x1_ = x1, y0_ = y0, y1_ = y1;
  }

  double px(double x) const { return left_ + (x - x0_) / (x1_ - x0_) * (w_ - left_ - right_); }
  double py(double y) const { return h_ - bottom_ + (y - y0_) / (y1_ - y0_) * -(h_ - top_ - bottom_); }
  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }

  std::ostringstream& body() { return body_; }

  void axes(const std::string& xlabel, const std::string& ylabel, bool x_ticks = true) {
    auto& b = body_;
    b << "<g class=\"axes\" stroke=\"#000\" stroke-width=\"1\" fill=\"none\">\n";
    b << "<rect x=\"" << num(left_) << "\" y=\"" << num(top_) << "\" width=\"" << num(w_ - left_ - right_)
      << "\" height=\"" << num(h_ - top_ - bottom_) << "\"/>\n</g>\n";
    b << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    if (x_ticks) {
      for (double t : ticks(x0_, x1_)) {
        b << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(h_ - bottom_) << "\" x2=\"" << num(px(t))
          << "\" y2=\"" << num(h_ - bottom_ + 4) << "\" stroke=\"#000\"/>";
        b << "<text x=\"" << num(px(t)) << "\" y=\"" << num(h_ - bottom_ + 16) << "\" text-anchor=\"middle\">"
          << tick_label(t) << "</text>\n";
      }
    }
    for (double t : ticks(y0_, y1_)) {
      b << "<line x1=\"" << num(left_ - 4) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(left_) << "\" y2=\""
        << num(py(t)) << "\" stroke=\"#000\"/>";
      b << "<text x=\"" << num(left_ - 7) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
        << tick_label(t) << "</text>\n";
    }
    b << "</g>\n";
    b << "<text x=\"" << num(0.5 * (left_ + w_ - right_)) << "\" y=\"" << num(h_ - 10)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    b << "<text transform=\"translate(16," << num(0.5 * (top_ + h_ - bottom_))
      << ") rotate(-90)\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << escape(ylabel)
      << "</text>\n";
  }

  void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
    double y = top_ + 14;
    for (const auto& [label, colour] : entries) {
      body_ << "<rect x=\"" << num(w_ - right_ - 110) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"10\" fill=\""
            << colour << "\"/><text x=\"" << num(w_ - right_ - 94) << "\" y=\"" << num(y)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(label) << "</text>\n";
      y += 15;
    }
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
        << "\" viewBox=\"0 0 " << num(w_) << ' ' << num(h_) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    out << "<text x=\"" << num(0.5 * w_) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" "
           "text-anchor=\"middle\">"
        << escape(title_) << "</text>\n";
    out << body_.str();
    out << "</svg>\n";
    return out.str();
  }

  double left_ = 64, right_ = 16, top_ = 32, bottom_ = 48;

 private:
  double w_, h_;
  std::string title_;
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
  std::ostringstream body_;
};

/// Mean line and shaded 95% band per model over time in hours. `quantity` is
/// t_air (plotted in degrees Celsius) or ach.
inline std::string band_plot(const UqReport& r, const std::string& quantity) {
  if (quantity != "t_air" && quantity != "ach") throw ValidationError("quantity", "expected t_air or ach");
  const bool temp = quantity == "t_air";
  const double offset = temp ? -kZeroCelsiusK : 0.0;
  std::vector<const ModelBands*> all;
  for (const auto& m : r.models) all.push_back(&m);
  if (r.ensemble) all.push_back(&*r.ensemble);
  if (all.empty() || r.time.empty()) throw ValidationError("report", "nothing to plot");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* m : all) {
    const Band& b = temp ? m->t_air : m->ach;
    for (std::size_t k = 0; k < r.time.size(); ++k) {
      lo = std::min(lo, b.ci_low[k] + offset);
      hi = std::max(hi, b.ci_high[k] + offset);
    }
  }
  Figure f(820, 420, temp ? "Indoor air temperature" : "Air changes per hour");
  const double pad = 0.05 * (hi - lo);
  f.set_limits(r.time.front() / 3600.0, r.time.back() / 3600.0, lo - pad, hi + pad);
  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Band& b = temp ? all[i]->t_air : all[i]->ach;
    const char* colour = kPalette[i % kPalette.size()];
    auto& o = f.body();
    o << "<g class=\"model\" data-model=\"" << escape(all[i]->model) << "\">\n<polygon class=\"ci\" fill=\"" << colour
      << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t k = 0; k < r.time.size(); ++k) {
      o << num(f.px(r.time[k] / 3600.0)) << ',' << num(f.py(b.ci_high[k] + offset)) << ' ';
    }
    for (std::size_t k = r.time.size(); k-- > 0;) {
      o << num(f.px(r.time[k] / 3600.0)) << ',' << num(f.py(b.ci_low[k] + offset)) << ' ';
    }
    o << "\"/>\n<polyline class=\"mean\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < r.time.size(); ++k) {
      o << num(f.px(r.time[k] / 3600.0)) << ',' << num(f.py(b.mean[k] + offset)) << ' ';
    }
    o << "\"/>\n</g>\n";
    legend.emplace_back(all[i]->model, colour);
  }
  f.axes("Time (h)", temp ? "Temperature (\xC2\xB0" "C)" : "ACH (1/h)");
  f.legend(legend);
  return f.str();
}

struct ScatterPoint {
  std::string label;
  double measured = 0.0;
  double measured_std = 0.0;
  double predicted = 0.0;
  double predicted_low = 0.0;
  double predicted_high = 0.0;
};

/// Predicted vs measured ACH with horizontal (measurement +-1.96 std) and
/// vertical (prediction CI) error bars and the 1:1 line.
inline std::string ach_scatter(const std::vector<ScatterPoint>& pts, const std::string& title = "ACH") {
  if (pts.empty()) throw ValidationError("points", "nothing to plot");
  double hi = 0.0;
  for (const auto& p : pts) {
    hi = std::max({hi, p.measured + 1.96 * p.measured_std, p.predicted_high, p.predicted});
  }
  Figure f(520, 520, title);
  f.set_limits(0.0, hi * 1.05, 0.0, hi * 1.05);
  auto& o = f.body();
  o << "<line class=\"identity\" x1=\"" << num(f.px(0)) << "\" y1=\"" << num(f.py(0)) << "\" x2=\""
    << num(f.px(f.x1())) << "\" y2=\"" << num(f.py(f.y1())) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  std::map<std::string, const char*> colours;
  for (const auto& p : pts) {
    if (!colours.count(p.label)) colours[p.label] = kPalette[colours.size() % kPalette.size()];
  }
  for (const auto& p : pts) {
    const char* c = colours[p.label];
    const double xl = std::max(0.0, p.measured - 1.96 * p.measured_std), xh = p.measured + 1.96 * p.measured_std;
    o << "<g class=\"point\" data-config=\"" << escape(p.label) << "\" stroke=\"" << c << "\">";
    o << "<line class=\"xerr\" x1=\"" << num(f.px(xl)) << "\" y1=\"" << num(f.py(p.predicted)) << "\" x2=\""
      << num(f.px(xh)) << "\" y2=\"" << num(f.py(p.predicted)) << "\"/>";
    o << "<line class=\"yerr\" x1=\"" << num(f.px(p.measured)) << "\" y1=\"" << num(f.py(p.predicted_low))
      << "\" x2=\"" << num(f.px(p.measured)) << "\" y2=\"" << num(f.py(p.predicted_high)) << "\"/>";
    o << "<circle cx=\"" << num(f.px(p.measured)) << "\" cy=\"" << num(f.py(p.predicted)) << "\" r=\"3.5\" fill=\""
      << c << "\"/></g>\n";
  }
  f.axes("Measured ACH (1/h)", "Predicted ACH (1/h)");
  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& [label, c] : colours) legend.emplace_back(label, c);
  f.legend(legend);
  return f.str();
}

/// One box per (parameter, window), grouped by parameter, for the rows of a
/// single model and quantity.
inline std::string sobol_boxplot(const std::vector<SobolReportRow>& rows, const std::string& model,
                                 const std::string& quantity) {
  std::vector<std::string> windows;
  for (const auto& r : rows) {
    if (r.model == model && r.quantity == quantity &&
        std::find(windows.begin(), windows.end(), r.window) == windows.end()) {
      windows.push_back(r.window);
    }
  }
  if (windows.empty()) throw ValidationError("report", "no rows for model '" + model + "' and " + quantity);
  Figure f(820, 420, "First-order Sobol indices: " + quantity + " (" + model + ")");
  f.set_limits(0.0, static_cast<double>(kParameterCount), 0.0, 1.0);
  auto& o = f.body();
  const double box_w = 0.7 / static_cast<double>(windows.size());
  for (const auto& r : rows) {
    if (r.model != model || r.quantity != quantity) continue;
    const auto wi = static_cast<std::size_t>(std::find(windows.begin(), windows.end(), r.window) - windows.begin());
    const double x = static_cast<double>(static_cast<std::size_t>(r.parameter)) + 0.15 +
                     (static_cast<double>(wi) + 0.1) * box_w;
    const double bw = 0.8 * box_w;
    const char* c = kPalette[wi % kPalette.size()];
    const auto& s = r.stats;
    o << "<g class=\"box\" data-parameter=\"" << to_string(r.parameter) << "\" data-window=\"" << escape(r.window)
      << "\" stroke=\"" << c << "\">";
    o << "<line x1=\"" << num(f.px(x + bw / 2)) << "\" y1=\"" << num(f.py(s.min)) << "\" x2=\""
      << num(f.px(x + bw / 2)) << "\" y2=\"" << num(f.py(s.max)) << "\"/>";
    o << "<rect x=\"" << num(f.px(x)) << "\" y=\"" << num(f.py(s.q75)) << "\" width=\""
      << num(f.px(x + bw) - f.px(x)) << "\" height=\"" << num(f.py(s.q25) - f.py(s.q75)) << "\" fill=\"" << c
      << "\" fill-opacity=\"0.3\"/>";
    o << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(f.py(s.median)) << "\" x2=\"" << num(f.px(x + bw))
      << "\" y2=\"" << num(f.py(s.median)) << "\" stroke-width=\"2\"/></g>\n";
  }
  o << "<g font-family=\"sans-serif\" font-size=\"11\">";
  for (std::size_t i = 0; i < kParameterCount; ++i) {
    o << "<text x=\"" << num(f.px(static_cast<double>(i) + 0.5)) << "\" y=\"" << num(f.py(0.0) + 16)
      << "\" text-anchor=\"middle\">" << to_string(kAllParameters[i]) << "</text>";
  }
  o << "</g>\n";
  f.axes("Parameter", "First-order index", false);
  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t i = 0; i < windows.size(); ++i) legend.emplace_back(windows[i], kPalette[i % kPalette.size()]);
  f.legend(legend);
  return f.str();
}

}  // namespace ventsim::svg
