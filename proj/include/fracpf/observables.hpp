// Scalar observables recorded along a run, plus the log-log power-law fit
// used to extract coarsening exponents.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fracpf/spectral.hpp"

namespace fracpf {

struct TimeSeriesRecord {
  double t = 0.0;
  double energy = 0.0;
  double roughness = 0.0;
  double mass = 0.0;
};

struct TimeSeries {
  std::vector<TimeSeriesRecord> records;

  void append(const TimeSeriesRecord& r);  // enforces strictly increasing t
};

enum class FitChannel { ENERGY, ROUGHNESS };

struct PowerLawFit {
  double slope = 0.0;  // positive magnitude
  bool decaying = false;
  double intercept = 0.0;
  double t_min = 0.0, t_max = 0.0;
  double rms_residual = 0.0;
  int n_points = 0;
};

// W = sqrt( (1/|Omega|) int (phi - mean)^2 )
double roughness(const Field& phi);

// int_Omega phi
double mass(const Field& phi);

// Ordinary least squares of log10(value) on log10(t) over [t_min, t_max].
// When the window holds more than max_points records, log-spaced subsampling
// keeps early times from dominating the fit. Throws std::invalid_argument on
// fewer than 3 usable points or nonpositive values in the window.
PowerLawFit fit_power_law(const TimeSeries& series, FitChannel channel,
                          double t_min, double t_max, int max_points = 100);

const char* fit_channel_name(FitChannel channel);

// CSV with header "t,energy,roughness,mass", 17 significant digits.
void write_series_csv(std::ostream& out, const TimeSeries& series);
TimeSeries read_series_csv(std::istream& in);  // throws ConfigError on malformed input

// key=value lines: channel, slope, intercept, t_min, t_max, rms_residual,
// n_points, direction.
void write_fit_report(std::ostream& out, const PowerLawFit& fit, FitChannel channel);

}  // namespace fracpf
