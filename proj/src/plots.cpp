#include "couponalloc/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace couponalloc::plots {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                "#bcbd22", "#17becf"};

std::string color(std::size_t i) { return kPalette[i % 10]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

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

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom -
           (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * (kHeight - kTop - kBottom);
  }
};

Frame padded(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.05 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad};
}

void open(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& xl,
          const std::string& yl) {
  const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
  out << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << r - l
      << "\" height=\"" << b - t << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    out << "<text x=\"" << f.px(xv) << "\" y=\"" << b + 15
        << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
    out << "<text x=\"" << l - 5 << "\" y=\"" << f.py(yv) + 4
        << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
    out << "<line x1=\"" << l << "\" x2=\"" << r << "\" y1=\"" << f.py(yv)
        << "\" y2=\"" << f.py(yv) << "\" stroke=\"#eee\"/>\n";
  }
  out << "<text x=\"" << (l + r) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  out << "<text transform=\"translate(16," << (t + b) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

void legend(std::ostringstream& out, std::size_t i, const std::string& label) {
  const double x = kWidth - kRight + 15, y = kTop + 10 + 18.0 * static_cast<double>(i);
  out << "<rect x=\"" << x << "\" y=\"" << y - 8 << "\" width=\"12\" height=\"10\" fill=\""
      << color(i) << "\"/>\n<text x=\"" << x + 18 << "\" y=\"" << y << "\">"
      << escape(label) << "</text>\n";
}

void polyline(std::ostringstream& out, const Frame& f,
              const std::vector<std::pair<double, double>>& pts,
              const std::string& stroke, bool dashed = false) {
  out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\""
      << (dashed ? " stroke-dasharray=\"4,3\"" : "") << " points=\"";
  for (const auto& [x, y] : pts) out << num(f.px(x)) << "," << num(f.py(y)) << " ";
  out << "\"/>\n";
}

}  // namespace

std::string uplift_curves(const std::vector<evaluation::UpliftCurve>& curves,
                          const CouponCatalog& cat, double scale) {
  std::ostringstream out;
  open(out, "Uplift curves");
  double n = 1, lo = 0, hi = 0;
  for (const auto& c : curves) {
    n = std::max(n, static_cast<double>(c.points.size() - 1));
    for (double v : c.points) {
      lo = std::min(lo, v / scale);
      hi = std::max(hi, v / scale);
    }
  }
  const Frame f = padded(0, n, lo, hi);
  axes(out, f, "targeted customers", "cumulative uplift (normalized)");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    std::vector<std::pair<double, double>> pts;
    const std::size_t step = std::max<std::size_t>(1, c.points.size() / 400);
    for (std::size_t t = 0; t < c.points.size(); t += step) {
      pts.emplace_back(static_cast<double>(t), c.points[t] / scale);
    }
    pts.emplace_back(static_cast<double>(c.points.size() - 1), c.points.back() / scale);
    polyline(out, f, pts, color(i));
    polyline(out, f, {{0, 0}, pts.back()}, color(i), true);
    legend(out, i, cat.label(c.coupon) + " AUUC " + num(c.auuc / scale));
  }
  out << "</svg>\n";
  return out.str();
}

std::string uplift_vs_cost(const evaluation::UpliftReport& report, double scale) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  double x1 = 0, lo = 0, hi = 0;
  for (const auto& p : report.points) {
    if (!p.error.empty()) continue;
    if (!series.count(p.strategy)) order.push_back(p.strategy);
    series[p.strategy].emplace_back(p.consumed_cost / scale, p.uplift_gmv / scale);
    x1 = std::max(x1, p.consumed_cost / scale);
    lo = std::min(lo, p.uplift_gmv / scale);
    hi = std::max(hi, p.uplift_gmv / scale);
  }
  std::ostringstream out;
  open(out, "Uplift-GMV vs consumed cost");
  const Frame f = padded(0, x1, lo, hi);
  axes(out, f, "consumed cost (normalized)", "Uplift-GMV (normalized)");
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& pts = series[order[i]];
    polyline(out, f, pts, color(i));
    for (const auto& [x, y] : pts) {
      out << "<circle cx=\"" << num(f.px(x)) << "\" cy=\"" << num(f.py(y))
          << "\" r=\"3\" fill=\"" << color(i) << "\"/>\n";
    }
    legend(out, i, order[i]);
  }
  out << "</svg>\n";
  return out.str();
}

std::string proportions(const evaluation::UpliftReport& report,
                        const std::string& strategy, const CouponCatalog& cat) {
  std::vector<const evaluation::SweepPoint*> pts;
  for (const auto& p : report.points) {
    if (p.strategy == strategy) pts.push_back(&p);
  }
  std::ostringstream out;
  open(out, "Allocated coupon proportions: " + strategy);
  const Frame f{0, static_cast<double>(std::max<std::size_t>(1, pts.size())), 0, 1};
  axes(out, f, "budget index", "proportion of customers");
  const double bw = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(1, pts.size()));
  for (std::size_t b = 0; b < pts.size(); ++b) {
    double base = 0;
    for (std::size_t j = 0; j < pts[b]->proportions.size(); ++j) {
      const double v = pts[b]->proportions[j];
      out << "<rect x=\"" << num(kLeft + bw * (static_cast<double>(b) + 0.1)) << "\" y=\""
          << num(f.py(base + v)) << "\" width=\"" << num(bw * 0.8) << "\" height=\""
          << num(f.py(base) - f.py(base + v)) << "\" fill=\"" << color(j) << "\"/>\n";
      base += v;
    }
    out << "<text x=\"" << num(kLeft + bw * (static_cast<double>(b) + 0.5)) << "\" y=\""
        << kHeight - kBottom - 4 << "\" text-anchor=\"middle\" font-size=\"8\">"
        << num(pts[b]->budget) << "</text>\n";
  }
  for (const auto& c : cat.coupons()) legend(out, static_cast<std::size_t>(c.id - 1), c.label);
  out << "</svg>\n";
  return out.str();
}

std::string boxplots(const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                     const std::string& title, const std::string& y_label) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [name, v] : groups) {
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0;
  std::ostringstream out;
  open(out, title);
  const Frame f = padded(0, static_cast<double>(std::max<std::size_t>(1, groups.size())), lo, hi);
  axes(out, f, "", y_label);
  const double bw = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(1, groups.size()));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> v = groups[g].second;
    const double cx = kLeft + bw * (static_cast<double>(g) + 0.5);
    out << "<text x=\"" << num(cx) << "\" y=\"" << kHeight - kBottom + 28
        << "\" text-anchor=\"middle\">" << escape(groups[g].first) << "</text>\n";
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    auto q = [&](double t) {
      const double pos = t * static_cast<double>(v.size() - 1);
      const auto i = static_cast<std::size_t>(std::floor(pos));
      const std::size_t k = std::min(i + 1, v.size() - 1);
      return v[i] + (pos - static_cast<double>(i)) * (v[k] - v[i]);
    };
    const double q1 = q(0.25), q2 = q(0.5), q3 = q(0.75);
    const double w = bw * 0.25;
    out << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(f.py(v.front()))
        << "\" y2=\"" << num(f.py(v.back())) << "\" stroke=\"#333\"/>\n";
    out << "<rect x=\"" << num(cx - w) << "\" y=\"" << num(f.py(q3)) << "\" width=\"" << num(2 * w)
        << "\" height=\"" << num(f.py(q1) - f.py(q3)) << "\" fill=\"" << color(0)
        << "\" fill-opacity=\"0.5\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << num(cx - w) << "\" x2=\"" << num(cx + w) << "\" y1=\"" << num(f.py(q2))
        << "\" y2=\"" << num(f.py(q2)) << "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace couponalloc::plots
