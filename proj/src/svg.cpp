#include "liftlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace liftlab::svg {

namespace {

constexpr const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

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

// Maps a data box onto a pixel box with y up.
struct Frame {
  double x0, x1, y0, y1;
  double left, top, width, height;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string polygon(const Frame& f, const Body& b, const std::string& style) {
  std::string pts;
  for (const auto& v : b.vertices()) pts += num(f.px(v.x())) + "," + num(f.py(v.y())) + " ";
  return "<polygon points=\"" + pts + "\" " + style + "/>\n";
}

std::string rect(const Frame& f, const Rectd& r, const std::string& style) {
  return "<rect x=\"" + num(f.px(-r.half_width)) + "\" y=\"" + num(f.py(r.half_height)) + "\" width=\"" +
         num(f.px(r.half_width) - f.px(-r.half_width)) + "\" height=\"" +
         num(f.py(-r.half_height) - f.py(r.half_height)) + "\" " + style + "/>\n";
}

Frame channel_frame(const Rectd& R, double width) {
  const double scale = (width - 20) / (2 * R.half_width);
  return {-R.half_width, R.half_width, -R.half_height, R.half_height, 10, 10, width - 20, 2 * R.half_height * scale};
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double x : s.x) x0 = std::min(x0, x), x1 = std::max(x1, x);
    for (double y : s.y) y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (!(x1 > x0)) x0 -= 1, x1 += 1;
  if (!(y1 > y0)) y0 -= 1, y1 += 1;
  const double pad = 0.05 * (y1 - y0);
  const Frame f{x0, x1, y0 - pad, y1 + pad, 70, 40, 560, 320};
  std::string out = header(680, 420);
  out += "<text x=\"340\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) + "</text>\n";
  out += "<rect x=\"70\" y=\"40\" width=\"560\" height=\"320\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = f.y0 + (f.y1 - f.y0) * i / 4;
    out += "<text x=\"" + num(f.px(xv)) + "\" y=\"378\" text-anchor=\"middle\" font-size=\"11\">" + num(xv) + "</text>\n";
    out += "<text x=\"64\" y=\"" + num(f.py(yv) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" + num(yv) + "</text>\n";
  }
  if (f.y0 < 0 && f.y1 > 0)
    out += "<line x1=\"70\" x2=\"630\" y1=\"" + num(f.py(0)) + "\" y2=\"" + num(f.py(0)) +
           "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  out += "<text x=\"350\" y=\"405\" text-anchor=\"middle\" font-size=\"13\">" + escape(xlabel) + "</text>\n";
  out += "<text x=\"16\" y=\"200\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 200)\">" +
         escape(ylabel) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kColours[k % std::size(kColours)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) pts += num(f.px(s.x[i])) + "," + num(f.py(s.y[i])) + " ";
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
    if (!s.label.empty())
      out += "<text x=\"640\" y=\"" + num(56 + 16.0 * k) + "\" text-anchor=\"end\" font-size=\"12\" fill=\"" +
             colour + "\">" + escape(s.label) + "</text>\n";
  }
  return out + "</svg>\n";
}

std::string shapes(const Rectd& R, const std::vector<Body>& bodies, const std::optional<Rectd>& D) {
  const Frame f = channel_frame(R, 800);
  std::string out = header(800, f.height + 20);
  out += rect(f, R, "fill=\"none\" stroke=\"#444\"");
  if (D) out += rect(f, *D, "fill=\"none\" stroke=\"#888\" stroke-dasharray=\"5 4\"");
  for (std::size_t k = 0; k < bodies.size(); ++k)
    out += polygon(f, bodies[k],
                   "fill=\"" + std::string(kColours[k % std::size(kColours)]) + "\" fill-opacity=\"0.35\" stroke=\"" +
                       kColours[k % std::size(kColours)] + "\"");
  return out + "</svg>\n";
}

std::string mesh(const Mesh& M) {
  const Frame f = channel_frame(M.R, 1000);
  std::string out = header(1000, f.height + 20);
  out += "<g fill=\"none\" stroke=\"#555\" stroke-width=\"0.4\">\n";
  for (int t = 0; t < M.num_triangles(); ++t) {
    std::string pts;
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = M.node(M.triangles(i, t));
      pts += num(f.px(p.x())) + "," + num(f.py(p.y())) + " ";
    }
    out += "<polygon points=\"" + pts + "\"/>\n";
  }
  out += "</g>\n";
  if (M.body) out += polygon(f, *M.body, "fill=\"#d62728\" fill-opacity=\"0.3\" stroke=\"#d62728\"");
  return out + "</svg>\n";
}

std::string profiles(const FlowShapePair& p, const std::string& title) {
  Series in{"V_in", {}, {}}, out{"V_out", {}, {}};
  for (int i = 0; i < p.v_in.size(); ++i) {
    in.x.push_back(p.v_in.x(i));
    in.y.push_back(p.v_in.nodes()(i));
  }
  for (int i = 0; i < p.v_out.size(); ++i) {
    out.x.push_back(p.v_out.x(i));
    out.y.push_back(p.v_out.nodes()(i));
  }
  return line_chart({in, out}, title, "x2", "profile");
}

}  // namespace liftlab::svg
