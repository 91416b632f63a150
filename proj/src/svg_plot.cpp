#include "fockrad/svg_plot.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "fockrad/number_format.h"

namespace fockrad {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 6> kColors{"#000000", "#c0392b", "#2471a3",
                                             "#239b56", "#af7ac5", "#d68910"};

std::string escape(const std::string& s) {
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

std::string fmt(double v) {
  // Two decimals are plenty for pixel coordinates.
  return format_double(std::round(v * 100.0) / 100.0);
}

}  // namespace

void write_svg_plot(std::ostream& out, const PlotAxes& axes, std::span<const PlotSeries> series) {
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!axes.log_x || x > 0) && (!axes.log_y || y > 0);
  };
  auto tx = [&](double x) { return axes.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return axes.log_y ? std::log10(y) : y; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      x0 = std::min(x0, tx(s.x[k]));
      x1 = std::max(x1, tx(s.x[k]));
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  }
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (ty(y) - y0) / (y1 - y0) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << escape(axes.title)
      << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double vx = axes.log_x ? std::pow(10.0, fx) : fx;
    const double vy = axes.log_y ? std::pow(10.0, fy) : fy;
    const double gx = kLeft + pw * k / 4.0, gy = kTop + ph - ph * k / 4.0;
    out << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << format_double(std::round(vx * 1e4) / 1e4) << "</text>\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", vy);
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(gy + 4)
        << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  out << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16)
      << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << fmt(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(axes.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kColors[s % kColors.size()];
    if (ser.markers) {
      for (std::size_t k = 0; k < std::min(ser.x.size(), ser.y.size()); ++k) {
        if (!usable(ser.x[k], ser.y[k])) continue;
        out << "<circle cx=\"" << fmt(px(ser.x[k])) << "\" cy=\"" << fmt(py(ser.y[k]))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
          << (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (std::size_t k = 0; k < std::min(ser.x.size(), ser.y.size()); ++k) {
        if (!usable(ser.x[k], ser.y[k])) continue;
        out << fmt(px(ser.x[k])) << ',' << fmt(py(ser.y[k])) << ' ';
      }
      out << "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(s);
    out << "<rect x=\"" << fmt(kWidth - kRight + 12) << "\" y=\"" << fmt(ly - 8)
        << "\" width=\"12\" height=\"3\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << fmt(kWidth - kRight + 30) << "\" y=\"" << fmt(ly) << "\">"
        << escape(ser.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace fockrad
