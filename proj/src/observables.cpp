#include "fracpf/observables.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fracpf/errors.hpp"

namespace fracpf {

void TimeSeries::append(const TimeSeriesRecord& r) {
  if (!std::isfinite(r.t) || !std::isfinite(r.energy) || !std::isfinite(r.roughness) ||
      !std::isfinite(r.mass)) {
    throw std::invalid_argument("TimeSeries: non-finite record");
  }
  if (!records.empty() && r.t <= records.back().t) {
    throw std::invalid_argument("TimeSeries: time must be strictly increasing");
  }
  records.push_back(r);
}

double roughness(const Field& phi) {
  const double m = mean(phi);
  double sum = 0.0;
  for (double v : phi.data) {
    const double d = v - m;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(phi.grid.size()));
}

double mass(const Field& phi) { return integrate(phi); }

PowerLawFit fit_power_law(const TimeSeries& series, FitChannel channel,
                          double t_min, double t_max, int max_points) {
  if (!(t_min > 0.0) || !(t_max > t_min)) {
    throw std::invalid_argument("fit_power_law: need 0 < t_min < t_max");
  }
  auto value = [channel](const TimeSeriesRecord& r) {
    return channel == FitChannel::ENERGY ? r.energy : r.roughness;
  };

  std::vector<double> ts, vs;
  for (const auto& r : series.records) {
    if (r.t < t_min || r.t > t_max) continue;
    if (!(value(r) > 0.0)) {
      throw std::invalid_argument(
          "fit_power_law: nonpositive value in window (log undefined)");
    }
    ts.push_back(r.t);
    vs.push_back(value(r));
  }
  if (ts.size() < 3) {
    throw std::invalid_argument("fit_power_law: fewer than 3 points in window");
  }

  // log-spaced subsample so the (linearly recorded) early times do not
  // dominate the least squares
  if (static_cast<int>(ts.size()) > max_points) {
    std::vector<double> st, sv;
    const double la = std::log(ts.front());
    const double lb = std::log(ts.back());
    std::size_t prev = static_cast<std::size_t>(-1);
    for (int k = 0; k < max_points; ++k) {
      const double target = std::exp(la + (lb - la) * k / (max_points - 1));
      auto it = std::lower_bound(ts.begin(), ts.end(), target);
      std::size_t idx = static_cast<std::size_t>(it - ts.begin());
      if (idx == ts.size()) idx = ts.size() - 1;
      if (idx > 0 && target - ts[idx - 1] < ts[idx] - target) idx -= 1;
      if (idx == prev) continue;
      prev = idx;
      st.push_back(ts[idx]);
      sv.push_back(vs[idx]);
    }
    ts.swap(st);
    vs.swap(sv);
  }

  const std::size_t n = ts.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log10(ts[i]);
    const double y = std::log10(vs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log10(vs[i]) - (intercept + slope * std::log10(ts[i]));
    ss += r * r;
  }

  PowerLawFit fit;
  fit.slope = std::abs(slope);
  fit.decaying = slope < 0.0;
  fit.intercept = intercept;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.rms_residual = std::sqrt(ss / n);
  fit.n_points = static_cast<int>(n);
  return fit;
}

const char* fit_channel_name(FitChannel channel) {
  return channel == FitChannel::ENERGY ? "energy" : "roughness";
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  out << "t,energy,roughness,mass\n";
  out.precision(17);
  for (const auto& r : series.records) {
    out << r.t << ',' << r.energy << ',' << r.roughness << ',' << r.mass << '\n';
  }
}

TimeSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("series csv: empty input");
  }
  if (line != "t,energy,roughness,mass" && line != "t,energy,roughness,mass\r") {
    throw ConfigError("series csv: unexpected header '" + line + "'");
  }
  TimeSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    TimeSeriesRecord r;
    char c1, c2, c3;
    if (!(ss >> r.t >> c1 >> r.energy >> c2 >> r.roughness >> c3 >> r.mass) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw ConfigError("series csv: malformed line " + std::to_string(line_no));
    }
    try {
      series.append(r);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("series csv: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return series;
}

void write_fit_report(std::ostream& out, const PowerLawFit& fit, FitChannel channel) {
  out.precision(17);
  out << "channel=" << fit_channel_name(channel) << '\n'
      << "slope=" << fit.slope << '\n'
      << "intercept=" << fit.intercept << '\n'
      << "t_min=" << fit.t_min << '\n'
      << "t_max=" << fit.t_max << '\n'
      << "rms_residual=" << fit.rms_residual << '\n'
      << "n_points=" << fit.n_points << '\n'
      << "direction=" << (fit.decaying ? "decay" : "growth") << '\n';
}

}  // namespace fracpf
