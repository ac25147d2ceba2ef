// Experiment orchestration: single runs and alpha sweeps, with all artifacts
// (manifest, kernel dump, series CSV, fit reports, snapshots, plots) written
// under the configured output directory.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracpf/config.hpp"
#include "fracpf/observables.hpp"
#include "fracpf/spectral.hpp"

namespace fracpf {

struct RunArtifacts {
  std::filesystem::path out_dir;
  TimeSeries series;
  std::map<std::string, PowerLawFit> fits;  // by channel name; absent if the fit was skipped
  std::vector<std::string> notes;           // reasons for skipped fits etc.
  double mass_drift = 0.0;                  // |mean(t_end) - mean(0)| / max(|mean(0)|, 1)
  long steps = 0;
};

struct SweepRow {
  double alpha = 0.0;
  std::optional<PowerLawFit> fit;  // the sweep channel's fit for this alpha
};

struct SweepResult {
  std::filesystem::path out_dir;
  std::vector<SweepRow> rows;
  // least-squares line of fitted exponent vs alpha; present when >= 3 rows fit
  std::optional<std::pair<double, double>> regression;  // slope, intercept
};

// Runs one simulation at cfg.model.alpha. Refuses a non-empty out_dir unless
// force; progress (if non-null) receives a line every 5% of steps. Throws
// ConfigError / DivergenceError / IoError; on divergence the partial series
// is still written before the exception propagates.
RunArtifacts run_single(const RunConfig& cfg, bool force, std::ostream* progress);

// One subrun per alpha under out_dir/alpha_<a>, fanned out over at most
// cfg.workers threads, then summary.csv (header alpha,slope,residual),
// regression.txt when >= 3 alphas fit, and optionally summary.svg.
SweepResult run_sweep(const RunConfig& cfg, bool force, std::ostream* progress);

// Machine-readable summaries printed on stdout by the CLI.
std::string summary_json(const RunConfig& cfg, const RunArtifacts& art);
std::string summary_json(const RunConfig& cfg, const SweepResult& res);

// mean + amp * uniform(-1,1), drawn in row-major order from SplitMix64(seed).
Field seeded_field(const Grid& grid, std::uint64_t seed, double mean, double amp);

}  // namespace fracpf
