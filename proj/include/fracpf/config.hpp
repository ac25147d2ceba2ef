// Run configuration: one flat JSON document with per-model defaults, strict
// key checking (unknown keys are hard errors naming the field), and a
// manifest writer whose echo replays bitwise.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fracpf/models.hpp"
#include "fracpf/observables.hpp"

namespace fracpf {

struct RunConfig {
  ModelSpec model;  // kind, alpha, eps, lambda0, mobility, m_coef, stabilizers, dt, t_end, dealias
  int nx = 128, ny = 128;
  double lx = 0.0, ly = 0.0;     // set by defaults_for
  std::vector<double> alphas;    // sweep list; single runs use model.alpha
  std::uint64_t seed = 1234;
  double soe_eps = 1e-8;         // kernel certification target
  double init_amp = 1e-3;
  double init_mean = 0.5;        // defaults_for sets 0 for the height models
  bool paper_literal_init = false;  // force the zero-mean initial condition
  std::vector<double> snapshot_times;
  std::string out_dir;
  std::optional<double> fit_t_min, fit_t_max;  // default window [t_end/15, t_end]
  FitChannel fit_channel = FitChannel::ENERGY;
  int record_every = 10;
  int workers = 1;  // sweep parallelism cap
  bool emit_svg = false;

  // FCH/FAC: [0,4pi]^2, eps 0.05, t_end 150, mean 0.5, snapshots {5,25,50,100,125,145},
  // energy channel. FMBE: [0,10pi]^2, eps 0.1, t_end 200, mean 0, snapshots
  // {5,25,50,100,150,200}, roughness channel. Everything else is model-independent.
  static RunConfig defaults_for(ModelKind kind);

  [[nodiscard]] double fit_window_min() const;
  [[nodiscard]] double fit_window_max() const;
  [[nodiscard]] double effective_init_mean() const;
  [[nodiscard]] Grid grid() const;

  void validate() const;  // throws ConfigError naming the offending field
};

// Strict parse of a JSON config document; also accepts a manifest (the
// embedded "config" object is extracted). ConfigError on unknown keys, type
// mismatches, or invalid values; IoError if the file cannot be read.
RunConfig load_config_file(const std::filesystem::path& path);
RunConfig parse_config_json(const std::string& text);

// Full-echo JSON of a config (every field explicit, stable key order).
std::string config_to_json(const RunConfig& cfg);

// manifest.json: format version + generator + full config echo.
void write_manifest(const std::filesystem::path& path, const RunConfig& cfg);

const char* model_kind_name(ModelKind kind);
const char* mobility_kind_name(MobilityKind kind);
ModelKind model_kind_from_name(const std::string& name);      // ConfigError on unknown
MobilityKind mobility_kind_from_name(const std::string& name);  // ConfigError on unknown

}  // namespace fracpf
