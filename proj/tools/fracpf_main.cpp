// fracpf: time-fractional phase-field experiments from the command line.
//   run    one simulation (alpha from config or --alpha)
//   sweep  one run per alpha, plus a summary table and exponent regression
//   fit    offline power-law fit of a stored series CSV
//   plot   SVG plot of a series CSV or a sweep summary CSV
// Exit codes: 0 ok, 2 invalid config/input, 3 numerical divergence, 4 I/O.
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fracpf/config.hpp"
#include "fracpf/errors.hpp"
#include "fracpf/observables.hpp"
#include "fracpf/runner.hpp"
#include "fracpf/svg.hpp"
#include "fracpf/version.hpp"

namespace {

using namespace fracpf;

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--alpha expects a comma-separated list of numbers, got '" + text +
                        "'");
    }
  }
  if (out.empty()) throw ConfigError("--alpha list is empty");
  return out;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string alpha_list;
  std::optional<std::uint64_t> seed;
  bool force = false;
  bool emit_svg = false;
  bool dealias = false;
  bool paper_literal_init = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
  cmd->add_option("--config", fl.config_path, "JSON config (or manifest) file");
  cmd->add_option("--out", fl.out_dir, "output directory (overrides config)");
  cmd->add_option("--alpha", fl.alpha_list, "fractional order(s), comma separated");
  cmd->add_option("--seed", fl.seed, "RNG seed (overrides config)");
  cmd->add_flag("--force", fl.force, "allow writing into a non-empty output directory");
  cmd->add_flag("--emit-svg", fl.emit_svg, "write SVG plots next to the CSVs");
  cmd->add_flag("--dealias", fl.dealias, "apply the 2/3 rule to nonlinear terms");
  cmd->add_flag("--paper-literal-init", fl.paper_literal_init,
                "use the zero-mean initial condition");
}

RunConfig build_config(const CommonFlags& fl, bool sweep) {
  RunConfig cfg = fl.config_path.empty() ? RunConfig::defaults_for(ModelKind::FCH)
                                         : load_config_file(fl.config_path);
  if (!fl.alpha_list.empty()) {
    const auto alphas = parse_alpha_list(fl.alpha_list);
    if (!sweep && alphas.size() != 1) {
      throw ConfigError("'run' takes a single --alpha; use 'sweep' for a list");
    }
    cfg.alphas = alphas;
    cfg.model.alpha = alphas.front();
  }
  if (!fl.out_dir.empty()) cfg.out_dir = fl.out_dir;
  if (fl.seed) cfg.seed = *fl.seed;
  if (fl.emit_svg) cfg.emit_svg = true;
  if (fl.dealias) cfg.model.dealias = true;
  if (fl.paper_literal_init) cfg.paper_literal_init = true;
  return cfg;
}

FitChannel parse_channel(const std::string& name) {
  if (name == "energy") return FitChannel::ENERGY;
  if (name == "roughness") return FitChannel::ROUGHNESS;
  throw ConfigError("unknown channel '" + name + "' (expected energy or roughness)");
}

TimeSeries load_series(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return read_series_csv(f);
}

// Offline fit: window defaults mirror a finished run, [t_last/15, t_last].
PowerLawFit fit_series(const TimeSeries& series, FitChannel channel,
                       std::optional<double> t_min, std::optional<double> t_max) {
  if (series.records.empty()) throw ConfigError("series is empty");
  const double t_last = series.records.back().t;
  const double lo = t_min ? *t_min : t_last / 15.0;
  const double hi = t_max ? *t_max : t_last;
  try {
    return fit_power_law(series, channel, lo, hi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("fit over window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] failed: " + e.what());
  }
}

int run_command(const CommonFlags& fl) {
  const RunConfig cfg = build_config(fl, false);
  RunArtifacts art = run_single(cfg, fl.force, &std::cerr);
  std::cout << summary_json(cfg, art) << '\n';
  return 0;
}

int sweep_command(const CommonFlags& fl) {
  const RunConfig cfg = build_config(fl, true);
  SweepResult res = run_sweep(cfg, fl.force, &std::cerr);
  std::cout << summary_json(cfg, res) << '\n';
  return 0;
}

int fit_command(const std::string& series_path, const std::string& channel,
                std::optional<double> t_min, std::optional<double> t_max,
                const std::string& out_path) {
  const TimeSeries series = load_series(series_path);
  const FitChannel ch = parse_channel(channel);
  const PowerLawFit fit = fit_series(series, ch, t_min, t_max);
  std::ostringstream rep;
  write_fit_report(rep, fit, ch);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write " + out_path);
    f << rep.str();
  }
  std::cout << rep.str();
  return 0;
}

// A summary CSV row: alpha,slope,residual. Rows whose slope is not finite
// (skipped fits) are dropped from the plot.
void load_summary(const std::string& path, std::vector<double>& alphas,
                  std::vector<double>& slopes) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || (line != "alpha,slope,residual" &&
                                 line != "alpha,slope,residual\r")) {
    throw ConfigError("summary CSV must start with header 'alpha,slope,residual'");
  }
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, s, r;
    if (!std::getline(ss, a, ',') || !std::getline(ss, s, ',') || !std::getline(ss, r)) {
      throw ConfigError("malformed summary row at line " + std::to_string(lineno));
    }
    try {
      const double av = std::stod(a), sv = std::stod(s);
      if (std::isfinite(sv)) {
        alphas.push_back(av);
        slopes.push_back(sv);
      }
    } catch (const std::exception&) {
      throw ConfigError("malformed summary row at line " + std::to_string(lineno));
    }
  }
}

int plot_command(const std::string& input_path, const std::string& channel,
                 std::optional<double> t_min, std::optional<double> t_max,
                 const std::string& out_path) {
  std::ifstream probe(input_path);
  if (!probe) throw IoError("cannot open " + input_path);
  std::string header;
  std::getline(probe, header);
  probe.close();
  if (!header.empty() && header.back() == '\r') header.pop_back();

  if (header == "alpha,slope,residual") {
    std::vector<double> alphas, slopes;
    load_summary(input_path, alphas, slopes);
    std::optional<std::pair<double, double>> regression;
    if (alphas.size() >= 3) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = static_cast<double>(alphas.size());
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        sx += alphas[i];
        sy += slopes[i];
        sxx += alphas[i] * alphas[i];
        sxy += alphas[i] * slopes[i];
      }
      const double det = n * sxx - sx * sx;
      if (std::abs(det) > 1e-300) {
        const double m = (n * sxy - sx * sy) / det;
        regression = {{m, (sy - m * sx) / n}};
      }
    }
    write_sweep_svg(out_path, alphas, slopes, regression);
  } else {
    const TimeSeries series = load_series(input_path);
    const FitChannel ch = parse_channel(channel);
    const PowerLawFit fit = fit_series(series, ch, t_min, t_max);
    write_series_svg(out_path, series, ch, fit);
  }
  std::cerr << "wrote " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-fractional phase-field solver"};
  app.set_version_flag("--version", std::string("fracpf ") + fracpf::version_string);
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags;
  auto* cmd_run = app.add_subcommand("run", "run one simulation");
  add_common(cmd_run, run_flags);
  auto* cmd_sweep = app.add_subcommand("sweep", "run one simulation per alpha");
  add_common(cmd_sweep, sweep_flags);

  std::string fit_input, fit_channel = "energy", fit_out;
  std::optional<double> fit_tmin, fit_tmax;
  auto* cmd_fit = app.add_subcommand("fit", "fit a power law to a stored series");
  cmd_fit->add_option("series", fit_input, "series CSV file")->required();
  cmd_fit->add_option("--channel", fit_channel, "energy or roughness");
  cmd_fit->add_option("--t-min", fit_tmin, "fit window lower edge");
  cmd_fit->add_option("--t-max", fit_tmax, "fit window upper edge");
  cmd_fit->add_option("--out", fit_out, "also write the report to this file");

  std::string plot_input, plot_channel = "energy", plot_out;
  std::optional<double> plot_tmin, plot_tmax;
  auto* cmd_plot = app.add_subcommand("plot", "render a series or sweep summary as SVG");
  cmd_plot->add_option("input", plot_input, "series or summary CSV file")->required();
  cmd_plot->add_option("--channel", plot_channel, "energy or roughness (series input)");
  cmd_plot->add_option("--t-min", plot_tmin, "fit window lower edge");
  cmd_plot->add_option("--t-max", plot_tmax, "fit window upper edge");
  cmd_plot->add_option("--out", plot_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_run->parsed()) return run_command(run_flags);
    if (cmd_sweep->parsed()) return sweep_command(sweep_flags);
    if (cmd_fit->parsed()) {
      return fit_command(fit_input, fit_channel, fit_tmin, fit_tmax, fit_out);
    }
    return plot_command(plot_input, plot_channel, plot_tmin, plot_tmax, plot_out);
  } catch (const fracpf::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fracpf::SoeBuildError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fracpf::DivergenceError& e) {
    std::cerr << "error: solution diverged at step " << e.step << ", t=" << e.time << ": "
              << e.what() << '\n';
    return 3;
  } catch (const fracpf::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
