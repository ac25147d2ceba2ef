#include "fracpf/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fracpf/errors.hpp"
#include "fracpf/version.hpp"

namespace fracpf {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::string& key, const std::string& why) {
  throw ConfigError("config field '" + key + "' " + why);
}

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad_field(key, "must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad_field(key, "must be an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) bad_field(key, "must be a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad_field(key, "must be a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& key) {
  if (!j.is_array()) bad_field(key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) bad_field(key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

bool is_height_model(ModelKind k) {
  return k == ModelKind::FMBE_SLOPE || k == ModelKind::FMBE_NOSLOPE;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::FCH: return "fch";
    case ModelKind::FMBE_SLOPE: return "fmbe_slope";
    case ModelKind::FMBE_NOSLOPE: return "fmbe_noslope";
    case ModelKind::FAC: return "fac";
  }
  return "?";
}

const char* mobility_kind_name(MobilityKind kind) {
  switch (kind) {
    case MobilityKind::CONSTANT: return "constant";
    case MobilityKind::TWO_SIDED: return "two_sided";
    case MobilityKind::ONE_SIDED: return "one_sided";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "fch") return ModelKind::FCH;
  if (name == "fmbe_slope") return ModelKind::FMBE_SLOPE;
  if (name == "fmbe_noslope") return ModelKind::FMBE_NOSLOPE;
  if (name == "fac") return ModelKind::FAC;
  throw ConfigError("config field 'model' has unknown value '" + name +
                    "' (expected fch, fmbe_slope, fmbe_noslope or fac)");
}

MobilityKind mobility_kind_from_name(const std::string& name) {
  if (name == "constant") return MobilityKind::CONSTANT;
  if (name == "two_sided") return MobilityKind::TWO_SIDED;
  if (name == "one_sided") return MobilityKind::ONE_SIDED;
  throw ConfigError("config field 'mobility' has unknown value '" + name +
                    "' (expected constant, two_sided or one_sided)");
}

RunConfig RunConfig::defaults_for(ModelKind kind) {
  RunConfig cfg;
  cfg.model.kind = kind;
  if (is_height_model(kind)) {
    cfg.model.eps = 0.1;
    cfg.model.t_end = 200.0;
    cfg.lx = cfg.ly = 10.0 * std::numbers::pi;
    cfg.init_mean = 0.0;
    cfg.snapshot_times = {5, 25, 50, 100, 150, 200};
    cfg.fit_channel = FitChannel::ROUGHNESS;
  } else {
    cfg.lx = cfg.ly = 4.0 * std::numbers::pi;
    cfg.snapshot_times = {5, 25, 50, 100, 125, 145};
    cfg.fit_channel = FitChannel::ENERGY;
  }
  cfg.alphas = {cfg.model.alpha};
  return cfg;
}

double RunConfig::fit_window_min() const {
  return fit_t_min ? *fit_t_min : model.t_end / 15.0;
}

double RunConfig::fit_window_max() const { return fit_t_max ? *fit_t_max : model.t_end; }

double RunConfig::effective_init_mean() const { return paper_literal_init ? 0.0 : init_mean; }

Grid RunConfig::grid() const { return Grid(nx, ny, lx, ly); }

void RunConfig::validate() const {
  model.validate();
  if (nx < 4 || nx % 2 != 0) bad_field("nx", "must be an even integer >= 4");
  if (ny < 4 || ny % 2 != 0) bad_field("ny", "must be an even integer >= 4");
  if (!(lx > 0.0) || !std::isfinite(lx)) bad_field("lx", "must be positive");
  if (!(ly > 0.0) || !std::isfinite(ly)) bad_field("ly", "must be positive");
  if (alphas.empty()) bad_field("alphas", "must contain at least one value");
  for (double a : alphas) {
    if (!(a > 0.0) || a > 1.0 || !std::isfinite(a)) {
      bad_field("alphas", "entries must lie in (0, 1]");
    }
  }
  if (!(soe_eps > 0.0) || soe_eps > 1e-2) bad_field("soe_eps", "must lie in (0, 1e-2]");
  if (!(init_amp >= 0.0) || !std::isfinite(init_amp)) {
    bad_field("init_amp", "must be nonnegative");
  }
  if (!std::isfinite(init_mean)) bad_field("init_mean", "must be finite");
  for (double ts : snapshot_times) {
    if (!(ts >= 0.0) || !std::isfinite(ts)) bad_field("snapshot_times", "must be nonnegative");
  }
  if (fit_t_min && (!(*fit_t_min > 0.0) || !std::isfinite(*fit_t_min))) {
    bad_field("fit_t_min", "must be positive");
  }
  if (fit_t_max && fit_t_min && !(*fit_t_max > *fit_t_min)) {
    bad_field("fit_t_max", "must exceed fit_t_min");
  }
  if (record_every < 1) bad_field("record_every", "must be >= 1");
  if (workers < 1) bad_field("workers", "must be >= 1");
}

namespace {

RunConfig parse_config_object(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known = {
      "model",     "alpha",          "alphas",
      "eps",       "lambda0",        "mobility",
      "m_coef",    "s",              "s0",
      "s1",        "dt",             "t_end",
      "dealias",   "nx",             "ny",
      "lx",        "ly",             "seed",
      "soe_eps",   "init_amp",       "init_mean",
      "paper_literal_init",          "snapshot_times",
      "out_dir",   "fit_t_min",      "fit_t_max",
      "fit_channel",                 "record_every",
      "workers",   "emit_svg",
  };
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  }

  ModelKind kind = ModelKind::FCH;
  if (doc.contains("model")) kind = model_kind_from_name(as_string(doc["model"], "model"));
  RunConfig cfg = RunConfig::defaults_for(kind);

  if (doc.contains("alpha") && doc.contains("alphas")) {
    throw ConfigError("config fields 'alpha' and 'alphas' are mutually exclusive");
  }
  if (doc.contains("alpha")) {
    cfg.model.alpha = as_number(doc["alpha"], "alpha");
    cfg.alphas = {cfg.model.alpha};
  }
  if (doc.contains("alphas")) {
    cfg.alphas = as_number_list(doc["alphas"], "alphas");
    if (cfg.alphas.empty()) bad_field("alphas", "must contain at least one value");
    cfg.model.alpha = cfg.alphas.front();
  }
  if (doc.contains("eps")) cfg.model.eps = as_number(doc["eps"], "eps");
  if (doc.contains("lambda0")) cfg.model.lambda0 = as_number(doc["lambda0"], "lambda0");
  if (doc.contains("mobility")) {
    cfg.model.mobility = mobility_kind_from_name(as_string(doc["mobility"], "mobility"));
  }
  if (doc.contains("m_coef")) cfg.model.m_coef = as_number(doc["m_coef"], "m_coef");
  if (doc.contains("s")) cfg.model.s_stab = as_number(doc["s"], "s");
  if (doc.contains("s0")) cfg.model.s0_stab = as_number(doc["s0"], "s0");
  if (doc.contains("s1")) cfg.model.s1_stab = as_number(doc["s1"], "s1");
  if (doc.contains("dt")) cfg.model.dt = as_number(doc["dt"], "dt");
  if (doc.contains("t_end")) cfg.model.t_end = as_number(doc["t_end"], "t_end");
  if (doc.contains("dealias")) cfg.model.dealias = as_bool(doc["dealias"], "dealias");
  if (doc.contains("nx")) cfg.nx = as_int(doc["nx"], "nx");
  if (doc.contains("ny")) cfg.ny = as_int(doc["ny"], "ny");
  if (doc.contains("lx")) cfg.lx = as_number(doc["lx"], "lx");
  if (doc.contains("ly")) cfg.ly = as_number(doc["ly"], "ly");
  if (doc.contains("seed")) {
    const auto& js = doc["seed"];
    if (!js.is_number_unsigned()) bad_field("seed", "must be a nonnegative integer");
    cfg.seed = js.get<std::uint64_t>();
  }
  if (doc.contains("soe_eps")) cfg.soe_eps = as_number(doc["soe_eps"], "soe_eps");
  if (doc.contains("init_amp")) cfg.init_amp = as_number(doc["init_amp"], "init_amp");
  if (doc.contains("init_mean")) cfg.init_mean = as_number(doc["init_mean"], "init_mean");
  if (doc.contains("paper_literal_init")) {
    cfg.paper_literal_init = as_bool(doc["paper_literal_init"], "paper_literal_init");
  }
  if (doc.contains("snapshot_times")) {
    cfg.snapshot_times = as_number_list(doc["snapshot_times"], "snapshot_times");
    for (double ts : cfg.snapshot_times) {
      if (ts > cfg.model.t_end + 1e-12) {
        bad_field("snapshot_times", "entry " + std::to_string(ts) + " is past t_end");
      }
    }
  } else {
    // defaults are trimmed, not rejected, when a shorter run is configured
    std::erase_if(cfg.snapshot_times,
                  [&](double ts) { return ts > cfg.model.t_end + 1e-12; });
  }
  if (doc.contains("out_dir")) cfg.out_dir = as_string(doc["out_dir"], "out_dir");
  if (doc.contains("fit_t_min")) cfg.fit_t_min = as_number(doc["fit_t_min"], "fit_t_min");
  if (doc.contains("fit_t_max")) cfg.fit_t_max = as_number(doc["fit_t_max"], "fit_t_max");
  if (doc.contains("fit_channel")) {
    const std::string ch = as_string(doc["fit_channel"], "fit_channel");
    if (ch == "energy") {
      cfg.fit_channel = FitChannel::ENERGY;
    } else if (ch == "roughness") {
      cfg.fit_channel = FitChannel::ROUGHNESS;
    } else {
      bad_field("fit_channel", "must be 'energy' or 'roughness'");
    }
  }
  if (doc.contains("record_every")) cfg.record_every = as_int(doc["record_every"], "record_every");
  if (doc.contains("workers")) cfg.workers = as_int(doc["workers"], "workers");
  if (doc.contains("emit_svg")) cfg.emit_svg = as_bool(doc["emit_svg"], "emit_svg");

  cfg.validate();
  return cfg;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("manifest_format_version")) {
    if (!doc.contains("config")) {
      throw ConfigError("manifest is missing its 'config' object");
    }
    return parse_config_object(doc["config"]);
  }
  return parse_config_object(doc);
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["model"] = model_kind_name(cfg.model.kind);
  if (cfg.alphas.size() > 1) {
    j["alphas"] = cfg.alphas;
  } else {
    j["alpha"] = cfg.model.alpha;
  }
  j["eps"] = cfg.model.eps;
  j["lambda0"] = cfg.model.lambda0;
  j["mobility"] = mobility_kind_name(cfg.model.mobility);
  j["m_coef"] = cfg.model.m_coef;
  if (cfg.model.s_stab) j["s"] = *cfg.model.s_stab;
  if (cfg.model.s0_stab) j["s0"] = *cfg.model.s0_stab;
  if (cfg.model.s1_stab) j["s1"] = *cfg.model.s1_stab;
  j["dt"] = cfg.model.dt;
  j["t_end"] = cfg.model.t_end;
  j["dealias"] = cfg.model.dealias;
  j["nx"] = cfg.nx;
  j["ny"] = cfg.ny;
  j["lx"] = cfg.lx;
  j["ly"] = cfg.ly;
  j["seed"] = cfg.seed;
  j["soe_eps"] = cfg.soe_eps;
  j["init_amp"] = cfg.init_amp;
  j["init_mean"] = cfg.init_mean;
  j["paper_literal_init"] = cfg.paper_literal_init;
  // echo only the effective times: default times past a shortened t_end never
  // fire, and echoing them would make the manifest un-replayable
  std::vector<double> effective_snaps;
  for (double ts : cfg.snapshot_times) {
    if (ts <= cfg.model.t_end) effective_snaps.push_back(ts);
  }
  j["snapshot_times"] = effective_snaps;
  j["out_dir"] = cfg.out_dir;
  j["fit_t_min"] = cfg.fit_window_min();
  j["fit_t_max"] = cfg.fit_window_max();
  j["fit_channel"] = fit_channel_name(cfg.fit_channel);
  j["record_every"] = cfg.record_every;
  j["workers"] = cfg.workers;
  j["emit_svg"] = cfg.emit_svg;
  return j.dump(2);
}

void write_manifest(const std::filesystem::path& path, const RunConfig& cfg) {
  ordered_json j;
  j["manifest_format_version"] = manifest_format_version;
  j["generator"] = std::string("fracpf ") + version_string;
  j["config"] = ordered_json::parse(config_to_json(cfg));
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << j.dump(2) << '\n';
  if (!f.flush()) throw IoError("write failed for " + path.string());
}

}  // namespace fracpf
