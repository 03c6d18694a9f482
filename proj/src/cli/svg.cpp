#include "vortex/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "vortex/cli/format.hpp"
#include "vortex/errors.hpp"

namespace vortex::cli {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 78, kRight = 24, kTop = 40, kBottom = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt_tick(double v) {
  const double a = std::abs(v);
  char buf[40];
  if (v == 0.0) return "0";
  if (a >= 1e4 || a < 1e-3)
    std::snprintf(buf, sizeof buf, "%.1e", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// 1-2-5 ladder of tick positions covering [lo, hi]
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int e = int(std::floor(std::log10(lo))); e <= int(std::ceil(std::log10(hi))); ++e) {
    const double t = std::pow(10.0, e);
    if (t >= lo / 1.001 && t <= hi * 1.001) ticks.push_back(t);
  }
  if (ticks.empty()) ticks = {lo, hi};
  return ticks;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

std::string SvgPlot::next_color() {
  const auto* c = kPalette[color_index_ % (sizeof kPalette / sizeof kPalette[0])];
  ++color_index_;
  return c;
}

void SvgPlot::add_line(const std::string& name, const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  series_.push_back({name, xs, ys, true, next_color()});
}

void SvgPlot::add_points(const std::string& name, const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  series_.push_back({name, xs, ys, false, next_color()});
}

void SvgPlot::write(const std::filesystem::path& path) const {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series_)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      const double y = s.ys[i];
      if (log_y_ && !(y > 0.0)) continue;
      x_lo = std::min(x_lo, s.xs[i]);
      x_hi = std::max(x_hi, s.xs[i]);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  if (!(x_lo <= x_hi)) { x_lo = 0; x_hi = 1; y_lo = 0; y_hi = 1; }
  if (x_lo == x_hi) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_lo == y_hi) { y_lo -= 0.5; y_hi += 0.5; }
  if (!log_y_) {
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  } else {
    y_lo /= 1.3;
    y_hi *= 1.3;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) {
    const double t = log_y_ ? (std::log10(y) - std::log10(y_lo)) /
                                  (std::log10(y_hi) - std::log10(y_lo))
                            : (y - y_lo) / (y_hi - y_lo);
    return kTop + (1.0 - t) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\""
      << " text-anchor=\"middle\">" << title_ << "</text>\n";

  // frame
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : linear_ticks(x_lo, x_hi)) {
    const double px = sx(t);
    out << "<line x1=\"" << px << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << kTop + plot_h + 20
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt_tick(t) << "</text>\n";
  }
  const auto yticks = log_y_ ? log_ticks(y_lo, y_hi) : linear_ticks(y_lo, y_hi);
  for (double t : yticks) {
    const double py = sy(t);
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\""
        << py << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt_tick(t)
        << "</text>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << py << "\" stroke=\"#dddddd\"/>\n";
  }

  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << xlabel_
      << "</text>\n"
      << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << ylabel_ << "</text>\n";

  for (const auto& s : series_) {
    if (s.line) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (log_y_ && !(s.ys[i] > 0.0)) continue;
        out << fmt_double(sx(s.xs[i])) << ',' << fmt_double(sy(s.ys[i])) << ' ';
      }
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (log_y_ && !(s.ys[i] > 0.0)) continue;
        out << "<circle cx=\"" << fmt_double(sx(s.xs[i])) << "\" cy=\""
            << fmt_double(sy(s.ys[i])) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    }
  }

  // legend
  double ly = kTop + 14;
  for (const auto& s : series_) {
    out << "<rect x=\"" << kLeft + plot_w - 170 << "\" y=\"" << ly - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n"
        << "<text x=\"" << kLeft + plot_w - 152 << "\" y=\"" << ly + 2
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
}

} // namespace vortex::cli
