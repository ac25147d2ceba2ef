#include "fracpf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "fracpf/errors.hpp"

namespace fracpf {

namespace {

constexpr double kWidth = 720.0, kHeight = 540.0;
constexpr double kLeft = 80.0, kRight = 30.0, kTop = 40.0, kBottom = 60.0;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Affine map from data range to pixel range.
struct AxisMap {
  double v0, v1, p0, p1;
  double operator()(double v) const { return p0 + (v - v0) / (v1 - v0) * (p1 - p0); }
};

AxisMap x_map(double v0, double v1) { return {v0, v1, kLeft, kWidth - kRight}; }
AxisMap y_map(double v0, double v1) { return {v0, v1, kHeight - kBottom, kTop}; }

void pad_range(double& lo, double& hi) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
}

void open_svg(std::ostringstream& out) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void draw_axes(std::ostringstream& out, const AxisMap& xm, const AxisMap& ym,
               const std::string& x_label, const std::string& y_label,
               const std::string& title) {
  const double x0 = kLeft, x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom, y1 = kTop;
  out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1)
      << "\" y2=\"" << fmt(y0) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0)
      << "\" y2=\"" << fmt(y1) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xm.v0 + k * (xm.v1 - xm.v0) / 4.0;
    const double fy = ym.v0 + k * (ym.v1 - ym.v0) / 4.0;
    const double px = xm(fx), py = ym(fy);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << fmt(y0 + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(y0 + 20)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(fx) << "</text>\n";
    out << "<line x1=\"" << fmt(x0 - 5) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(x0)
        << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(py + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(fy) << "</text>\n";
  }
  out << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kHeight - 15)
      << "\" font-size=\"14\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt((y0 + y1) / 2)
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt((y0 + y1) / 2) << ")\">" << y_label << "</text>\n";
  out << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"24\" font-size=\"15\" "
      << "text-anchor=\"middle\">" << title << "</text>\n";
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << body;
  if (!f.flush()) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_series_svg(const std::filesystem::path& path, const TimeSeries& series,
                      FitChannel channel, const PowerLawFit& fit) {
  std::vector<double> lt, lv;
  for (const auto& r : series.records) {
    if (r.t <= 0.0) continue;
    const double v = channel == FitChannel::ENERGY ? r.energy : r.roughness;
    if (v <= 0.0) {
      throw ConfigError(std::string("cannot plot ") + fit_channel_name(channel) +
                        " on a log axis: nonpositive value at t=" + std::to_string(r.t));
    }
    lt.push_back(std::log10(r.t));
    lv.push_back(std::log10(v));
  }
  if (lt.empty()) throw ConfigError("empty series: nothing to plot");

  double xlo = *std::min_element(lt.begin(), lt.end());
  double xhi = *std::max_element(lt.begin(), lt.end());
  double ylo = *std::min_element(lv.begin(), lv.end());
  double yhi = *std::max_element(lv.begin(), lv.end());
  pad_range(xlo, xhi);
  pad_range(ylo, yhi);
  const AxisMap xm = x_map(xlo, xhi), ym = y_map(ylo, yhi);

  std::ostringstream out;
  open_svg(out);
  draw_axes(out, xm, ym, "log10(t)", std::string("log10(") + fit_channel_name(channel) + ")",
            std::string(fit_channel_name(channel)) + " vs t (log-log)");

  out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < lt.size(); ++i) {
    out << fmt(xm(lt[i])) << "," << fmt(ym(lv[i])) << " ";
  }
  out << "\"/>\n";

  // fitted line over its own window
  const double sgn = fit.decaying ? -1.0 : 1.0;
  const double fx0 = std::log10(std::max(fit.t_min, std::pow(10.0, xlo)));
  const double fx1 = std::log10(fit.t_max);
  out << "<polyline fill=\"none\" stroke=\"#bf3f1f\" stroke-width=\"1.5\" "
      << "stroke-dasharray=\"6 4\" points=\"";
  out << fmt(xm(fx0)) << "," << fmt(ym(sgn * fit.slope * fx0 + fit.intercept)) << " "
      << fmt(xm(fx1)) << "," << fmt(ym(sgn * fit.slope * fx1 + fit.intercept));
  out << "\"/>\n";
  out << "<text x=\"" << fmt(kWidth - kRight - 10) << "\" y=\"" << fmt(kTop + 16)
      << "\" font-size=\"12\" text-anchor=\"end\">slope " << (fit.decaying ? "-" : "+")
      << fmt_tick(fit.slope) << "</text>\n";
  out << "</svg>\n";
  write_file(path, out.str());
}

void write_sweep_svg(const std::filesystem::path& path, const std::vector<double>& alphas,
                     const std::vector<double>& slopes,
                     const std::optional<std::pair<double, double>>& regression) {
  if (alphas.empty() || alphas.size() != slopes.size()) {
    throw ConfigError("sweep plot needs one fitted exponent per alpha");
  }
  double xlo = *std::min_element(alphas.begin(), alphas.end());
  double xhi = *std::max_element(alphas.begin(), alphas.end());
  double ylo = *std::min_element(slopes.begin(), slopes.end());
  double yhi = *std::max_element(slopes.begin(), slopes.end());
  pad_range(xlo, xhi);
  pad_range(ylo, yhi);
  const AxisMap xm = x_map(xlo, xhi), ym = y_map(ylo, yhi);

  std::ostringstream out;
  open_svg(out);
  draw_axes(out, xm, ym, "alpha", "fitted exponent", "fitted exponent vs alpha");
  if (regression) {
    const auto [m, b] = *regression;
    out << "<line x1=\"" << fmt(xm(xlo)) << "\" y1=\"" << fmt(ym(m * xlo + b)) << "\" x2=\""
        << fmt(xm(xhi)) << "\" y2=\"" << fmt(ym(m * xhi + b))
        << "\" stroke=\"#bf3f1f\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out << "<circle cx=\"" << fmt(xm(alphas[i])) << "\" cy=\"" << fmt(ym(slopes[i]))
        << "\" r=\"4\" fill=\"#1f5fbf\"/>\n";
  }
  out << "</svg>\n";
  write_file(path, out.str());
}

}  // namespace fracpf
