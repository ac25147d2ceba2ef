#include "fracpf/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "fracpf/errors.hpp"
#include "fracpf/models.hpp"
#include "fracpf/rng.hpp"
#include "fracpf/snapshot.hpp"
#include "fracpf/svg.hpp"
#include "fracpf/version.hpp"

namespace fs = std::filesystem;

namespace fracpf {

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

fs::path prepare_out_dir(const std::string& dir, bool force) {
  if (dir.empty()) throw ConfigError("config field 'out_dir' is required for runs");
  fs::path out(dir);
  std::error_code ec;
  if (fs::exists(out, ec)) {
    if (!fs::is_directory(out, ec)) {
      throw ConfigError("output path " + out.string() + " exists and is not a directory");
    }
    if (!fs::is_empty(out, ec) && !force) {
      throw ConfigError("output directory " + out.string() +
                        " already exists and is not empty (pass --force to overwrite)");
    }
  } else {
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << body;
  if (!f.flush()) throw IoError("write failed for " + path.string());
}

void write_series_file(const fs::path& path, const TimeSeries& series) {
  std::ostringstream buf;
  write_series_csv(buf, series);
  write_text_file(path, buf.str());
}

// Fits one channel over the configured window; on success writes the report
// and returns the fit, otherwise records the reason in notes.
std::optional<PowerLawFit> try_fit_channel(const RunConfig& cfg, const TimeSeries& series,
                                           FitChannel channel, const fs::path& out,
                                           std::vector<std::string>& notes) {
  try {
    PowerLawFit fit =
        fit_power_law(series, channel, cfg.fit_window_min(), cfg.fit_window_max());
    std::ostringstream rep;
    write_fit_report(rep, fit, channel);
    write_text_file(out / (std::string("fit_") + fit_channel_name(channel) + ".txt"),
                    rep.str());
    return fit;
  } catch (const std::invalid_argument& e) {
    notes.push_back(std::string(fit_channel_name(channel)) + " fit skipped: " + e.what());
    return std::nullopt;
  }
}

struct ProgressMeter {
  std::ostream* out;
  long nsteps;
  int last_twentieth = 0;

  void tick(long k, double t) {
    if (!out || nsteps <= 0) return;
    const int cur = static_cast<int>((20 * k) / nsteps);
    if (cur > last_twentieth) {
      last_twentieth = cur;
      char buf[128];
      std::snprintf(buf, sizeof buf, "[%3d%%] step %ld/%ld t=%g\n", cur * 5, k, nsteps, t);
      (*out) << buf << std::flush;
    }
  }
};

}  // namespace

Field seeded_field(const Grid& grid, std::uint64_t seed, double mean, double amp) {
  Field f(grid);
  SplitMix64 rng(seed);
  for (double& v : f.data) v = mean + amp * rng.uniform_pm1();
  return f;
}

RunArtifacts run_single(const RunConfig& cfg, bool force, std::ostream* progress) {
  cfg.validate();
  const fs::path out = prepare_out_dir(cfg.out_dir, force);
  write_manifest(out / "manifest.json", cfg);

  const Grid grid = cfg.grid();
  Field phi0 = seeded_field(grid, cfg.seed, cfg.effective_init_mean(), cfg.init_amp);

  const double dt = cfg.model.dt;
  const long nsteps = std::llround(cfg.model.t_end / dt);

  RunArtifacts art;
  art.out_dir = out;
  art.steps = nsteps;

  SnapshotHeader header;
  header.nx = grid.nx;
  header.ny = grid.ny;
  header.lx = grid.lx;
  header.ly = grid.ly;
  header.model = model_kind_name(cfg.model.kind);
  header.alpha = cfg.model.alpha;
  header.seed = cfg.seed;
  header.rng_algorithm = rng_algorithm_name;

  // configured time -> step index, dropping anything past the last step
  std::map<long, double> snap_steps;
  for (double ts : cfg.snapshot_times) {
    const long k = std::llround(ts / dt);
    if (k <= nsteps) snap_steps[k] = ts;
  }

  Spectral sp(grid);
  auto record = [&](const Field& phi, double t) {
    art.series.append(
        {t, model_energy(sp, phi, cfg.model), roughness(phi), mass(phi)});
  };
  auto snap = [&](const Field& phi, double t, double label) {
    header.time = t;
    write_snapshot(out / ("snapshot_t" + fmt_g(label)), header, phi);
  };

  record(phi0, 0.0);
  if (auto it = snap_steps.find(0); it != snap_steps.end()) snap(phi0, 0.0, it->second);

  if (nsteps > 0) {
    SoeKernel kernel;
    const SoeKernel* kp = nullptr;
    if (cfg.model.alpha < 1.0) {
      kernel = build_soe(1.0 + cfg.model.alpha, dt, cfg.model.t_end + dt, cfg.soe_eps);
      std::ostringstream kbuf;
      write_soe_csv(kernel, kbuf);
      write_text_file(out / "kernel.csv", kbuf.str());
      kp = &kernel;
    }
    SimState st = make_sim_state(cfg.model, phi0, kp);
    ProgressMeter meter{progress, nsteps};
    try {
      for (long k = 1; k <= nsteps; ++k) {
        if (cfg.model.kind == ModelKind::FCH) {
          step_fch(sp, st, cfg.model);
        } else {
          step_fmbe(sp, st, cfg.model);
        }
        if (k % cfg.record_every == 0 || k == nsteps || snap_steps.count(k)) {
          record(st.phi, st.time);
        }
        if (auto it = snap_steps.find(k); it != snap_steps.end()) {
          snap(st.phi, st.time, it->second);
        }
        meter.tick(k, st.time);
      }
    } catch (const DivergenceError&) {
      write_series_file(out / "series.csv", art.series);  // keep what we have
      throw;
    }
  }

  write_series_file(out / "series.csv", art.series);

  for (FitChannel ch : {FitChannel::ENERGY, FitChannel::ROUGHNESS}) {
    if (auto fit = try_fit_channel(cfg, art.series, ch, out, art.notes)) {
      art.fits[fit_channel_name(ch)] = *fit;
      if (cfg.emit_svg) {
        write_series_svg(out / (std::string("series_") + fit_channel_name(ch) + ".svg"),
                         art.series, ch, *fit);
      }
    }
  }

  const double m0 = art.series.records.front().mass / grid.area();
  const double m1 = art.series.records.back().mass / grid.area();
  art.mass_drift = std::abs(m1 - m0) / std::max(std::abs(m0), 1.0);
  return art;
}

SweepResult run_sweep(const RunConfig& cfg, bool force, std::ostream* progress) {
  cfg.validate();
  const fs::path out = prepare_out_dir(cfg.out_dir, force);
  write_manifest(out / "manifest.json", cfg);

  std::vector<RunConfig> subcfgs;
  for (double a : cfg.alphas) {
    RunConfig sub = cfg;
    sub.model.alpha = a;
    sub.alphas = {a};
    sub.out_dir = (out / ("alpha_" + fmt_g(a))).string();
    sub.workers = 1;
    subcfgs.push_back(std::move(sub));
  }

  const std::size_t n = subcfgs.size();
  std::vector<RunArtifacts> results(n);
  std::vector<std::exception_ptr> errors(n);
  const int nworkers = static_cast<int>(std::min<std::size_t>(cfg.workers, n));

  if (nworkers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      if (progress) {
        (*progress) << "[sweep] alpha=" << fmt_g(subcfgs[i].model.alpha) << " (" << (i + 1)
                    << "/" << n << ")\n";
      }
      results[i] = run_single(subcfgs[i], force, progress);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          results[i] = run_single(subcfgs[i], force, nullptr);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SweepResult res;
  res.out_dir = out;
  const char* channel = fit_channel_name(cfg.fit_channel);
  std::ostringstream csv;
  csv << "alpha,slope,residual\n";
  csv.precision(17);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    SweepRow row;
    row.alpha = subcfgs[i].model.alpha;
    if (auto it = results[i].fits.find(channel); it != results[i].fits.end()) {
      row.fit = it->second;
      xs.push_back(row.alpha);
      ys.push_back(it->second.slope);
      csv << row.alpha << ',' << it->second.slope << ',' << it->second.rms_residual << '\n';
    } else {
      csv << row.alpha << ",nan,nan\n";
    }
    res.rows.push_back(row);
  }
  write_text_file(out / "summary.csv", csv.str());

  if (xs.size() >= 3) {
    // least squares of exponent on alpha
    const auto sn = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double det = sn * sxx - sx * sx;
    if (std::abs(det) > 1e-300) {
      const double slope = (sn * sxy - sx * sy) / det;
      const double intercept = (sy - slope * sx) / sn;
      res.regression = {slope, intercept};
      std::ostringstream reg;
      reg.precision(17);
      reg << "slope=" << slope << "\nintercept=" << intercept << "\nn_points=" << xs.size()
          << "\n";
      write_text_file(out / "regression.txt", reg.str());
    }
  }

  if (cfg.emit_svg && !xs.empty()) {
    write_sweep_svg(out / "summary.svg", xs, ys, res.regression);
  }
  return res;
}

std::string summary_json(const RunConfig& cfg, const RunArtifacts& art) {
  nlohmann::ordered_json j;
  j["status"] = "ok";
  j["mode"] = "run";
  j["model"] = model_kind_name(cfg.model.kind);
  j["alpha"] = cfg.model.alpha;
  j["out_dir"] = art.out_dir.string();
  j["steps"] = art.steps;
  const auto& last = art.series.records.back();
  j["t_final"] = last.t;
  j["energy_final"] = last.energy;
  j["roughness_final"] = last.roughness;
  j["mass_drift"] = art.mass_drift;
  nlohmann::ordered_json fits = nlohmann::ordered_json::object();
  for (const auto& [name, fit] : art.fits) {
    fits[name] = {{"slope", fit.slope},
                  {"direction", fit.decaying ? "decay" : "growth"},
                  {"intercept", fit.intercept},
                  {"rms_residual", fit.rms_residual},
                  {"n_points", fit.n_points}};
  }
  j["fits"] = fits;
  j["notes"] = art.notes;
  return j.dump();
}

std::string summary_json(const RunConfig& cfg, const SweepResult& res) {
  nlohmann::ordered_json j;
  j["status"] = "ok";
  j["mode"] = "sweep";
  j["model"] = model_kind_name(cfg.model.kind);
  j["channel"] = fit_channel_name(cfg.fit_channel);
  j["out_dir"] = res.out_dir.string();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : res.rows) {
    nlohmann::ordered_json r;
    r["alpha"] = row.alpha;
    if (row.fit) {
      r["slope"] = row.fit->slope;
      r["residual"] = row.fit->rms_residual;
    } else {
      r["slope"] = nullptr;
      r["residual"] = nullptr;
    }
    rows.push_back(r);
  }
  j["rows"] = rows;
  if (res.regression) {
    j["regression"] = {{"slope", res.regression->first},
                       {"intercept", res.regression->second}};
  } else {
    j["regression"] = nullptr;
  }
  return j.dump();
}

}  // namespace fracpf
