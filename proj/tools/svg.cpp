#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace entfeat::tools {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;
};

double parse(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }
};

Axis fit_axis(const std::vector<double>& vals, bool log) {
  Axis ax;
  ax.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : vals) {
    if (!std::isfinite(v) || (log && v <= 0)) continue;
    const double a = log ? std::log10(v) : v;
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.04 * (hi - lo);
  ax.lo = lo - pad;
  ax.hi = hi + pad;
  return ax;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_svg(const Table& t, const PlotSpec& spec) {
  const int xi = t.column(spec.x);
  if (xi < 0) throw std::invalid_argument("plot column not found: " + spec.x);
  const int gi = spec.group.empty() ? -1 : t.column(spec.group);
  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  for (const auto& y : spec.ys) {
    const int yi = t.column(y);
    if (yi < 0) throw std::invalid_argument("plot column not found: " + y);
    for (const auto& row : t.rows) {
      const std::string label = gi < 0 ? y : y + " " + spec.group + "=" + row[gi];
      auto it = index.find(label);
      if (it == index.end()) {
        it = index.emplace(label, series.size()).first;
        series.push_back({label, {}});
      }
      const double xv = parse(row[xi]), yv = parse(row[yi]);
      if (std::isfinite(xv) && std::isfinite(yv)) series[it->second].pts.emplace_back(xv, yv);
    }
  }
  std::vector<double> xs, ys;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      xs.push_back(x);
      ys.push_back(y);
    }
  const Axis ax = fit_axis(xs, spec.log_x), ay = fit_axis(ys, spec.log_y);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + ax.map(x) * pw; };
  auto py = [&](double y) { return kTop + (1 - ay.map(y)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double f = k / 4.0;
    const double xv = ax.lo + f * (ax.hi - ax.lo), yv = ay.lo + f * (ay.hi - ay.lo);
    const double gx = kLeft + f * pw, gy = kTop + (1 - f) * ph;
    os << "<text x=\"" << gx << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << num(ax.log ? std::pow(10, xv) : xv) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
       << num(ay.log ? std::pow(10, yv) : yv) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
     << escape(spec.x) << (spec.log_x ? " (log)" : "") << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    const auto& pts = series[s].pts;
    if (spec.scatter) {
      for (const auto& [x, y] : pts) {
        if ((ax.log && x <= 0) || (ay.log && y <= 0)) continue;
        os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"1.2\" fill=\"" << color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) {
        if ((ax.log && x <= 0) || (ay.log && y <= 0)) continue;
        os << num(px(x)) << "," << num(py(y)) << " ";
      }
      os << "\"/>\n";
    }
    const double ly = kTop + 14 + 16 * s;
    os << "<rect x=\"" << kWidth - kRight + 10 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
       << "\"/>\n";
    os << "<text x=\"" << kWidth - kRight + 24 << "\" y=\"" << ly << "\">" << escape(series[s].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace entfeat::tools
