// Minimal self-contained SVG plots: a log-log series plot with the fitted
// power law overlaid (exactly two polylines: data, fit), and the sweep
// scatter of fitted exponent vs alpha with an optional regression line.
#pragma once

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "fracpf/observables.hpp"

namespace fracpf {

// Points with t <= 0 cannot appear on a log axis and are skipped; a
// nonpositive channel value among the remaining points is a hard error
// (ConfigError), as is an empty plot. No file is written on error.
void write_series_svg(const std::filesystem::path& path, const TimeSeries& series,
                      FitChannel channel, const PowerLawFit& fit);

// Linear axes: one circle marker per (alpha, exponent) pair plus the
// least-squares regression line when provided. regression = {slope, intercept}.
void write_sweep_svg(const std::filesystem::path& path, const std::vector<double>& alphas,
                     const std::vector<double>& slopes,
                     const std::optional<std::pair<double, double>>& regression);

}  // namespace fracpf
