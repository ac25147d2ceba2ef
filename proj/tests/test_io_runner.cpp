#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fracpf/config.hpp"
#include "fracpf/errors.hpp"
#include "fracpf/models.hpp"
#include "fracpf/observables.hpp"
#include "fracpf/rng.hpp"
#include "fracpf/runner.hpp"
#include "fracpf/snapshot.hpp"

using namespace fracpf;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "fracpf_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// small FCH config that runs in well under a second
RunConfig tiny_fch() {
  RunConfig cfg = RunConfig::defaults_for(ModelKind::FCH);
  cfg.nx = cfg.ny = 32;
  cfg.model.alpha = 0.7;
  cfg.model.t_end = 0.5;
  cfg.record_every = 10;
  cfg.soe_eps = 1e-6;
  return cfg;
}

int count_occurrences(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("snapshot round trip preserves header and payload") {
  const fs::path dir = fresh_dir("snap_rt");
  const Grid g(16, 8, 2.0, 1.0);
  SplitMix64 rng(9);
  Field f(g);
  for (double& v : f.data) v = rng.uniform_pm1();

  SnapshotHeader h;
  h.nx = g.nx;
  h.ny = g.ny;
  h.lx = g.lx;
  h.ly = g.ly;
  h.time = 12.25;
  h.model = "fch";
  h.alpha = 0.7;
  h.seed = 4321;
  h.rng_algorithm = rng_algorithm_name;
  write_snapshot(dir / "t12", h, f);
  CHECK(fs::exists(dir / "t12.json"));
  CHECK(fs::exists(dir / "t12.raw"));

  const auto [h2, f2] = read_snapshot(dir / "t12");
  CHECK(h2 == h);
  REQUIRE(f2.data.size() == f.data.size());
  for (std::size_t i = 0; i < f.data.size(); ++i) CHECK(f2.data[i] == f.data[i]);
}

TEST_CASE("snapshot reader rejects broken inputs") {
  const fs::path dir = fresh_dir("snap_bad");
  CHECK_THROWS_AS(read_snapshot(dir / "nope"), IoError);

  const Grid g(8, 8, 1.0, 1.0);
  Field f(g, 0.25);
  SnapshotHeader h;
  h.nx = g.nx;
  h.ny = g.ny;
  h.lx = g.lx;
  h.ly = g.ly;
  h.model = "fac";
  h.rng_algorithm = rng_algorithm_name;
  write_snapshot(dir / "ok", h, f);

  // truncated payload
  fs::copy_file(dir / "ok.json", dir / "short.json");
  {
    std::ofstream out(dir / "short.raw", std::ios::binary);
    const std::string bytes = slurp(dir / "ok.raw");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 8));
  }
  CHECK_THROWS_AS(read_snapshot(dir / "short"), IoError);

  // oversized payload
  fs::copy_file(dir / "ok.json", dir / "long.json");
  {
    std::ofstream out(dir / "long.raw", std::ios::binary);
    const std::string bytes = slurp(dir / "ok.raw");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    const double extra = 0.0;
    out.write(reinterpret_cast<const char*>(&extra), sizeof extra);
  }
  CHECK_THROWS_AS(read_snapshot(dir / "long"), IoError);

  // wrong format version
  {
    std::string hdr = slurp(dir / "ok.json");
    const auto pos = hdr.find("\"format_version\"");
    REQUIRE(pos != std::string::npos);
    std::ofstream out(dir / "vers.json", std::ios::binary);
    std::string patched = hdr;
    patched.replace(patched.find(':', pos) + 1, patched.find(',', pos) - patched.find(':', pos) - 1,
                    " 999");
    out << patched;
  }
  fs::copy_file(dir / "ok.raw", dir / "vers.raw");
  CHECK_THROWS_AS(read_snapshot(dir / "vers"), IoError);

  // odd grid dimension
  {
    std::string hdr = slurp(dir / "ok.json");
    const auto pos = hdr.find("\"nx\"");
    REQUIRE(pos != std::string::npos);
    std::string patched = hdr;
    patched.replace(patched.find(':', pos) + 1, patched.find(',', pos) - patched.find(':', pos) - 1,
                    " 7");
    std::ofstream out(dir / "odd.json", std::ios::binary);
    out << patched;
  }
  fs::copy_file(dir / "ok.raw", dir / "odd.raw");
  CHECK_THROWS_AS(read_snapshot(dir / "odd"), IoError);
}

TEST_CASE("config defaults and strict parsing") {
  const RunConfig fch = parse_config_json("{}");
  CHECK(fch.model.kind == ModelKind::FCH);
  CHECK(fch.nx == 128);
  CHECK(fch.lx == doctest::Approx(4.0 * pi));
  CHECK(fch.model.eps == 0.05);
  CHECK(fch.model.lambda0 == 0.02);
  CHECK(fch.model.t_end == 150.0);
  CHECK(fch.init_mean == 0.5);
  CHECK(fch.fit_channel == FitChannel::ENERGY);
  CHECK(fch.fit_window_min() == doctest::Approx(10.0));
  CHECK(fch.fit_window_max() == doctest::Approx(150.0));
  CHECK(fch.snapshot_times == std::vector<double>{5, 25, 50, 100, 125, 145});

  const RunConfig mbe = parse_config_json(R"({"model": "fmbe_slope"})");
  CHECK(mbe.model.kind == ModelKind::FMBE_SLOPE);
  CHECK(mbe.lx == doctest::Approx(10.0 * pi));
  CHECK(mbe.model.eps == 0.1);
  CHECK(mbe.model.t_end == 200.0);
  CHECK(mbe.init_mean == 0.0);
  CHECK(mbe.fit_channel == FitChannel::ROUGHNESS);
  CHECK(mbe.snapshot_times == std::vector<double>{5, 25, 50, 100, 150, 200});

  CHECK_THROWS_WITH_AS(parse_config_json(R"({"modle": "fch"})"),
                       doctest::Contains("modle"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_json(R"({"alpha": 0.5, "alphas": [0.5, 0.7]})"),
                       doctest::Contains("alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_json(R"({"mobility": "cubic"})"),
                       doctest::Contains("cubic"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"alpha": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"nx": 31})"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);

  // explicit snapshot past t_end is the user's error; trimmed defaults are not
  CHECK_THROWS_WITH_AS(parse_config_json(R"({"t_end": 1.0, "snapshot_times": [5.0]})"),
                       doctest::Contains("snapshot"), ConfigError);
  const RunConfig trimmed = parse_config_json(R"({"t_end": 30.0})");
  CHECK(trimmed.snapshot_times == std::vector<double>{5, 25});
}

TEST_CASE("config echo reparses to the same document") {
  RunConfig cfg = parse_config_json(
      R"({"model": "fch", "alpha": 0.6, "mobility": "two_sided", "nx": 64, "ny": 32,
          "seed": 77, "dt": 0.005, "t_end": 2.0, "fit_t_min": 0.5, "fit_t_max": 2.0,
          "dealias": true, "emit_svg": true, "out_dir": "x"})");
  const std::string echo = config_to_json(cfg);
  const RunConfig back = parse_config_json(echo);
  CHECK(config_to_json(back) == echo);
  CHECK(back.model.mobility == MobilityKind::TWO_SIDED);
  CHECK(back.model.dt == 0.005);
  CHECK(back.fit_t_min.has_value());
  CHECK(*back.fit_t_min == 0.5);
}

TEST_CASE("seeded field reproduces the published generator") {
  const Grid g(4, 4, 1.0, 1.0);
  const Field f = seeded_field(g, 42, 0.5, 1e-3);
  // first draws of splitmix64(42), mapped to (-1,1)
  const double u0 = 0.74156487877182331;
  const double u1 = 0.1599103928769201;
  const double u2 = 0.27860113025513866;
  CHECK(f(0, 0) == 0.5 + 1e-3 * (2.0 * u0 - 1.0));
  CHECK(f(1, 0) == 0.5 + 1e-3 * (2.0 * u1 - 1.0));
  CHECK(f(2, 0) == 0.5 + 1e-3 * (2.0 * u2 - 1.0));

  const Field f2 = seeded_field(g, 42, 0.5, 1e-3);
  for (std::size_t i = 0; i < f.data.size(); ++i) CHECK(f.data[i] == f2.data[i]);
  const Field f3 = seeded_field(g, 43, 0.5, 1e-3);
  CHECK(f3(0, 0) != f(0, 0));
}

TEST_CASE("zero-length run records exactly the initial state") {
  RunConfig cfg = tiny_fch();
  cfg.model.t_end = 0.0;
  cfg.out_dir = fresh_dir("run_t0").string();
  const RunArtifacts art = run_single(cfg, true, nullptr);
  REQUIRE(art.series.records.size() == 1);
  CHECK(art.series.records[0].t == 0.0);
  CHECK(art.steps == 0);
  CHECK(art.fits.empty());
  CHECK(!art.notes.empty());  // both fits skipped, reasons recorded
  CHECK(fs::exists(fs::path(cfg.out_dir) / "manifest.json"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "series.csv"));
}

TEST_CASE("run artifacts are complete and self-consistent") {
  RunConfig cfg = tiny_fch();
  cfg.snapshot_times = {0.2};
  cfg.out_dir = fresh_dir("run_tiny").string();
  const RunArtifacts art = run_single(cfg, true, nullptr);
  const fs::path out = cfg.out_dir;

  CHECK(art.steps == 50);
  CHECK(art.mass_drift <= 1e-12);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "kernel.csv"));  // alpha < 1 runs dump the kernel

  // the CSV on disk holds exactly the in-memory series
  std::ifstream sin(out / "series.csv");
  const TimeSeries disk = read_series_csv(sin);
  REQUIRE(disk.records.size() == art.series.records.size());
  for (std::size_t i = 0; i < disk.records.size(); ++i) {
    CHECK(disk.records[i].t == art.series.records[i].t);
    CHECK(disk.records[i].energy == art.series.records[i].energy);
  }

  // snapshot at t=0.2 reloads to the same observables as the series row
  const auto [hdr, phi] = read_snapshot(out / "snapshot_t0.2");
  CHECK(hdr.model == "fch");
  CHECK(hdr.alpha == cfg.model.alpha);
  CHECK(hdr.seed == cfg.seed);
  const auto row = std::find_if(disk.records.begin(), disk.records.end(), [&](const auto& r) {
    return std::abs(r.t - hdr.time) < 1e-12;
  });
  REQUIRE(row != disk.records.end());
  CHECK(roughness(phi) == doctest::Approx(row->roughness).epsilon(1e-12));
  CHECK(mass(phi) == doctest::Approx(row->mass).epsilon(1e-12));
  Spectral sp(phi.grid);
  CHECK(model_energy(sp, phi, cfg.model) == doctest::Approx(row->energy).epsilon(1e-12));
}

TEST_CASE("existing output is refused without force") {
  RunConfig cfg = tiny_fch();
  cfg.model.t_end = 0.0;
  cfg.out_dir = fresh_dir("run_force").string();
  run_single(cfg, false, nullptr);  // empty dir: fine without force
  CHECK_THROWS_WITH_AS(run_single(cfg, false, nullptr), doctest::Contains("--force"),
                       ConfigError);
  CHECK_NOTHROW(run_single(cfg, true, nullptr));
}

TEST_CASE("runs are deterministic and manifests replay bitwise") {
  RunConfig cfg = tiny_fch();
  cfg.out_dir = fresh_dir("run_det_a").string();
  run_single(cfg, true, nullptr);

  RunConfig cfg_b = cfg;
  cfg_b.out_dir = fresh_dir("run_det_b").string();
  run_single(cfg_b, true, nullptr);
  CHECK(slurp(fs::path(cfg.out_dir) / "series.csv") ==
        slurp(fs::path(cfg_b.out_dir) / "series.csv"));

  // replay from the manifest alone
  RunConfig replay = load_config_file(fs::path(cfg.out_dir) / "manifest.json");
  CHECK(replay.model.alpha == cfg.model.alpha);
  CHECK(replay.seed == cfg.seed);
  replay.out_dir = fresh_dir("run_det_c").string();
  run_single(replay, true, nullptr);
  CHECK(slurp(fs::path(cfg.out_dir) / "series.csv") ==
        slurp(fs::path(replay.out_dir) / "series.csv"));
}

TEST_CASE("summary json names the run outcome") {
  RunConfig cfg = tiny_fch();
  cfg.out_dir = fresh_dir("run_sum").string();
  const RunArtifacts art = run_single(cfg, true, nullptr);
  const std::string js = summary_json(cfg, art);
  for (const char* key : {"\"status\"", "\"mode\"", "\"alpha\"", "\"steps\"", "\"mass_drift\""}) {
    CAPTURE(key);
    CHECK(js.find(key) != std::string::npos);
  }
}

TEST_CASE("sweep writes summary, regression, and per-alpha runs") {
  RunConfig cfg = tiny_fch();
  cfg.model.t_end = 0.3;
  cfg.record_every = 1;
  cfg.alphas = {0.5, 0.7, 0.9};
  cfg.fit_t_min = 0.05;
  cfg.fit_t_max = 0.3;
  cfg.out_dir = fresh_dir("sweep_a").string();
  const SweepResult res = run_sweep(cfg, true, nullptr);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[0].alpha == 0.5);
  for (const auto& row : res.rows) CHECK(row.fit.has_value());
  CHECK(res.regression.has_value());

  const fs::path out = cfg.out_dir;
  const std::string summary = slurp(out / "summary.csv");
  CHECK(summary.substr(0, 21) == "alpha,slope,residual\n");
  CHECK(count_occurrences(summary, "\n") == 4);  // header + 3 rows
  CHECK(fs::exists(out / "regression.txt"));
  for (const char* sub : {"alpha_0.5", "alpha_0.7", "alpha_0.9"}) {
    CAPTURE(sub);
    CHECK(fs::exists(out / sub / "series.csv"));
    CHECK(fs::exists(out / sub / "manifest.json"));
  }

  // parallel execution changes nothing observable
  RunConfig cfg2 = cfg;
  cfg2.workers = 2;
  cfg2.out_dir = fresh_dir("sweep_b").string();
  const SweepResult res2 = run_sweep(cfg2, true, nullptr);
  CHECK(slurp(out / "summary.csv") == slurp(fs::path(cfg2.out_dir) / "summary.csv"));
  REQUIRE(res2.regression.has_value());
  CHECK(res2.regression->first == res.regression->first);

  const std::string js = summary_json(cfg, res);
  CHECK(js.find("\"regression\"") != std::string::npos);
}

TEST_CASE("svg artifacts have the promised structure") {
  RunConfig cfg = tiny_fch();
  cfg.model.t_end = 0.3;
  cfg.record_every = 1;
  cfg.fit_t_min = 0.05;
  cfg.fit_t_max = 0.3;
  cfg.emit_svg = true;
  cfg.out_dir = fresh_dir("run_svg").string();
  const RunArtifacts art = run_single(cfg, true, nullptr);
  REQUIRE(art.fits.count("energy") == 1);
  const std::string svg = slurp(fs::path(cfg.out_dir) / "series_energy.svg");
  CHECK(count_occurrences(svg, "<polyline") == 2);  // data + fit, nothing else

  cfg.alphas = {0.5, 0.7, 0.9};
  cfg.out_dir = fresh_dir("sweep_svg").string();
  run_sweep(cfg, true, nullptr);
  const std::string ssvg = slurp(fs::path(cfg.out_dir) / "summary.svg");
  CHECK(count_occurrences(ssvg, "<circle") == 3);
  CHECK(count_occurrences(ssvg, "<polyline") == 0);
}
