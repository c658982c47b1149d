#include "nehari_cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace nehari::cli {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
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
  double left = 70, right = 160, top = 40, bottom = 50;
  int w, h;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
  double py(double y) const { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); }
};

void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double c = std::isfinite(lo) ? lo : 0.0;
    lo = c - 1.0;
    hi = c + 1.0;
    return;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

std::string axes(const Frame& f, const std::string& title, const std::string& xl, const std::string& yl) {
  std::string s;
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(f.w) + "\" height=\"" + std::to_string(f.h) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(f.w / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(title) + "</text>\n";
  const double xa = f.left, xb = f.w - f.right, ya = f.top, yb = f.h - f.bottom;
  s += "<rect x=\"" + num(xa) + "\" y=\"" + num(ya) + "\" width=\"" + num(xb - xa) + "\" height=\"" +
       num(yb - ya) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(yb + 16) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + tick(xv) + "</text>\n";
    s += "<text x=\"" + num(xa - 6) + "\" y=\"" + num(f.py(yv) + 4) +
         "\" text-anchor=\"end\" font-size=\"11\">" + tick(yv) + "</text>\n";
  }
  s += "<text x=\"" + num((xa + xb) / 2) + "\" y=\"" + num(f.h - 12.0) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + escape(xl) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((ya + yb) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
       num((ya + yb) / 2) + ")\">" + escape(yl) + "</text>\n";
  return s;
}

std::string header(int w, int h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) +
         " " + std::to_string(h) + "\" font-family=\"sans-serif\">\n";
}

}  // namespace

std::string line_plot(const PlotSpec& spec) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i < s.y.size() && s.y[i] && std::isfinite(*s.y[i])) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, *s.y[i]);
        y1 = std::max(y1, *s.y[i]);
      }
    }
  }
  for (const auto& m : spec.markers) {
    if (std::isfinite(m.x)) {
      x0 = std::min(x0, m.x);
      x1 = std::max(x1, m.x);
    }
  }
  widen(x0, x1);
  widen(y0, y1);
  Frame f{x0, x1, y0, y1};
  f.w = spec.width;
  f.h = spec.height;

  std::string s = header(f.w, f.h);
  s += axes(f, spec.title, spec.x_label, spec.y_label);
  if (y0 < 0.0 && y1 > 0.0) {
    s += "<line x1=\"" + num(f.px(x0)) + "\" y1=\"" + num(f.py(0)) + "\" x2=\"" + num(f.px(x1)) + "\" y2=\"" +
         num(f.py(0)) + "\" stroke=\"#cccccc\"/>\n";
  }
  for (std::size_t k = 0; k < spec.markers.size(); ++k) {
    const auto& m = spec.markers[k];
    if (!std::isfinite(m.x)) {
      continue;
    }
    const double xp = f.px(m.x);
    s += "<line x1=\"" + num(xp) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(xp) + "\" y2=\"" +
         num(f.h - f.bottom) + "\" stroke=\"" + m.color + "\" stroke-dasharray=\"4 3\"/>\n";
    s += "<text x=\"" + num(xp + 3) + "\" y=\"" + num(f.top + 12 + 13.0 * static_cast<double>(k)) +
         "\" font-size=\"11\" fill=\"" + m.color + "\">" + escape(m.label) + "</text>\n";
  }
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& se = spec.series[k];
    std::string dash = se.dashed ? " stroke-dasharray=\"6 4\"" : "";
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        s += "<polyline fill=\"none\" stroke=\"" + se.color + "\" stroke-width=\"1.8\"" + dash + " points=\"" +
             pts + "\"/>\n";
        pts.clear();
      }
    };
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      const bool ok = i < se.y.size() && se.y[i] && std::isfinite(*se.y[i]);
      if (!ok) {
        flush();
        continue;
      }
      if (se.markers) {
        s += "<circle cx=\"" + num(f.px(se.x[i])) + "\" cy=\"" + num(f.py(*se.y[i])) + "\" r=\"2.5\" fill=\"" +
             se.color + "\"/>\n";
      } else {
        pts += (pts.empty() ? "" : " ") + num(f.px(se.x[i])) + "," + num(f.py(*se.y[i]));
      }
    }
    flush();
    const double ly = f.top + 14 + 16.0 * static_cast<double>(k);
    const double lx = f.w - f.right + 12;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 18) + "\" y2=\"" + num(ly - 4) +
         "\" stroke=\"" + se.color + "\" stroke-width=\"2\"" + dash + "/>\n";
    s += "<text x=\"" + num(lx + 24) + "\" y=\"" + num(ly) + "\" font-size=\"11\">" + escape(se.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string profile_svg(const ProblemInstance& pi, const Vector& u, const std::string& title) {
  const Mesh& mesh = pi.mesh();
  const Vector nodal = mesh.expand(u);
  if (mesh.dimension() == 1) {
    std::vector<std::size_t> order(mesh.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mesh.nodes()[a].x < mesh.nodes()[b].x; });
    Series s{"u", "#1f4e9c", {}, {}};
    for (std::size_t i : order) {
      s.x.push_back(mesh.nodes()[i].x);
      s.y.push_back(nodal[static_cast<Eigen::Index>(i)]);
    }
    PlotSpec spec;
    spec.title = title;
    spec.x_label = "x";
    spec.y_label = "u(x)";
    spec.series.push_back(std::move(s));
    return line_plot(spec);
  }

  const double lo = nodal.minCoeff();
  const double hi = nodal.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  const int w = 560;
  const int h = 520;
  const double left = 40, top = 40, side = 440;
  const double scale = side / std::max(mesh.width(), mesh.height());
  std::string s = header(w, h);
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(w / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
       "</text>\n";
  auto color = [&](double v) {
    const double t = std::clamp((v - lo) / span, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255 * t));
    const int b = static_cast<int>(std::lround(255 * (1 - t)));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x40%02x", r, b);
    return std::string(buf);
  };
  for (const auto& e : mesh.elements()) {
    double avg = 0.0;
    std::string pts;
    for (int k = 0; k < 3; ++k) {
      const auto node = static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(k)]);
      avg += nodal[static_cast<Eigen::Index>(node)] / 3.0;
      const Point& pt = mesh.nodes()[node];
      pts += (k ? " " : "") + num(left + pt.x * scale) + "," + num(top + side - pt.y * scale);
    }
    s += "<polygon points=\"" + pts + "\" fill=\"" + color(avg) + "\" stroke=\"none\"/>\n";
  }
  s += "<text x=\"" + num(left + side + 10) + "\" y=\"" + num(top + 10) + "\" font-size=\"11\">max " + tick(hi) +
       "</text>\n";
  s += "<text x=\"" + num(left + side + 10) + "\" y=\"" + num(top + side) + "\" font-size=\"11\">min " + tick(lo) +
       "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace nehari::cli
