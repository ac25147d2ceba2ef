// Python bindings for the solver core. Strings stand in for the C++ enums
// ("fch", "constant", "energy", ...) so configs read the same here, in JSON,
// and on the CLI. Simulation entry points release the GIL.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracpf/caputo.hpp"
#include "fracpf/config.hpp"
#include "fracpf/errors.hpp"
#include "fracpf/observables.hpp"
#include "fracpf/runner.hpp"
#include "fracpf/snapshot.hpp"
#include "fracpf/soe.hpp"
#include "fracpf/spectral.hpp"
#include "fracpf/version.hpp"

namespace py = pybind11;
using namespace fracpf;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::array_t<double> field_to_array(const Field& f) {
  py::array_t<double> out({static_cast<py::ssize_t>(f.grid.ny),
                           static_cast<py::ssize_t>(f.grid.nx)});
  std::memcpy(out.mutable_data(), f.data.data(), f.data.size() * sizeof(double));
  return out;
}

py::dict series_to_dict(const TimeSeries& s) {
  std::vector<double> t, e, w, m;
  t.reserve(s.records.size());
  for (const auto& r : s.records) {
    t.push_back(r.t);
    e.push_back(r.energy);
    w.push_back(r.roughness);
    m.push_back(r.mass);
  }
  py::dict d;
  d["t"] = to_array(t);
  d["energy"] = to_array(e);
  d["roughness"] = to_array(w);
  d["mass"] = to_array(m);
  return d;
}

FitChannel channel_from_name(const std::string& name) {
  if (name == "energy") return FitChannel::ENERGY;
  if (name == "roughness") return FitChannel::ROUGHNESS;
  throw ConfigError("unknown channel '" + name + "' (expected energy or roughness)");
}

// Caputo derivative estimates along a sampled scalar trajectory, produced by
// the same implicit-coefficient recursion the PDE steppers use. values[0] is
// the initial state; the result holds the derivative at steps 1..n.
using c_array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> caputo_trajectory(c_array values, double dt, double alpha,
                                      double soe_eps) {
  if (values.ndim() != 1 || values.size() < 2) {
    throw std::invalid_argument("values must be a 1-d array with at least 2 samples");
  }
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  const auto v = values.unchecked<1>();
  const py::ssize_t n = values.size() - 1;
  std::vector<double> out(static_cast<std::size_t>(n));
  {
    py::gil_scoped_release release;
    SoeKernel kernel;
    if (alpha < 1.0) {
      kernel = build_soe(1.0 + alpha, dt, static_cast<double>(n) * dt + dt, soe_eps);
    }
    const double p0 = v(0);
    CaputoState st(alpha, kernel, std::span(&p0, 1));
    for (py::ssize_t k = 1; k <= n; ++k) {
      if (st.step_index() >= 1 && alpha < 1.0) st.history_advance(dt);
      double rhs = 0.0;
      const double c = st.caputo_coefficients(dt, std::span(&rhs, 1));
      const double pk = v(k);
      out[static_cast<std::size_t>(k - 1)] = c * pk + rhs;
      st.accept_step(std::span(&pk, 1), dt);
    }
  }
  return to_array(out);
}

PowerLawFit fit_arrays(c_array t, c_array values, double t_min, double t_max,
                       int max_points) {
  if (t.ndim() != 1 || values.ndim() != 1 || t.size() != values.size()) {
    throw std::invalid_argument("t and values must be 1-d arrays of equal length");
  }
  const auto ta = t.unchecked<1>();
  const auto va = values.unchecked<1>();
  TimeSeries s;
  for (py::ssize_t i = 0; i < t.size(); ++i) s.append({ta(i), va(i), va(i), 0.0});
  return fit_power_law(s, FitChannel::ENERGY, t_min, t_max, max_points);
}

}  // namespace

PYBIND11_MODULE(_fracpf, m) {
  m.doc() = "time-fractional phase-field solver core";
  m.attr("__version__") = version_string;

  py::register_exception<ConfigError>(m, "FracpfConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "FracpfIoError", PyExc_OSError);
  py::register_exception<SoeBuildError>(m, "SoeBuildError", PyExc_RuntimeError);
  static py::exception<DivergenceError> divergence_exc(m, "FracpfDivergenceError",
                                                       PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DivergenceError& e) {
      py::set_error(divergence_exc, e.what());
    }
  });

  py::class_<SoeKernel>(m, "SoeKernel")
      .def_readonly("beta", &SoeKernel::beta)
      .def_readonly("delta", &SoeKernel::delta)
      .def_readonly("t_max", &SoeKernel::t_max)
      .def_readonly("eps_target", &SoeKernel::eps_target)
      .def_property_readonly("k_exp", &SoeKernel::k_exp)
      .def_property_readonly("nodes", [](const SoeKernel& k) { return to_array(k.nodes); })
      .def_property_readonly("weights",
                             [](const SoeKernel& k) { return to_array(k.weights); })
      .def("__call__", [](const SoeKernel& k, double t) { return soe_eval(k, t); })
      .def("__repr__", [](const SoeKernel& k) {
        return "SoeKernel(beta=" + std::to_string(k.beta) +
               ", k_exp=" + std::to_string(k.k_exp()) + ")";
      });

  m.def("build_soe", &build_soe, py::arg("beta"), py::arg("delta"), py::arg("t_max"),
        py::arg("eps"),
        py::call_guard<py::gil_scoped_release>(),
        "Certified sum-of-exponentials compression of t^(-beta) on [delta, t_max].");
  m.def("soe_eval", &soe_eval, py::arg("kernel"), py::arg("t"));

  m.def("caputo_trajectory", &caputo_trajectory, py::arg("values"), py::arg("dt"),
        py::arg("alpha"), py::arg("soe_eps") = 1e-9,
        "Fast Caputo derivative along a sampled trajectory (values[0] is phi(0)).");
  m.def(
      "l1_caputo",
      [](c_array values, c_array times, double alpha) {
        if (values.ndim() != 1 || times.ndim() != 1 || values.size() != times.size()) {
          throw std::invalid_argument("values and times must be 1-d arrays of equal length");
        }
        return l1_caputo(std::span(values.data(), static_cast<std::size_t>(values.size())),
                         std::span(times.data(), static_cast<std::size_t>(times.size())),
                         alpha);
      },
      py::arg("values"), py::arg("times"), py::arg("alpha"),
      "Reference L1 Caputo derivative at the final grid point.");
  m.def("caputo_monomial", &caputo_monomial_oracle, py::arg("gamma_exp"), py::arg("alpha"),
        py::arg("t"), "Closed-form Caputo derivative of t^gamma_exp.");

  py::class_<PowerLawFit>(m, "PowerLawFit")
      .def_readonly("slope", &PowerLawFit::slope)
      .def_readonly("decaying", &PowerLawFit::decaying)
      .def_readonly("intercept", &PowerLawFit::intercept)
      .def_readonly("t_min", &PowerLawFit::t_min)
      .def_readonly("t_max", &PowerLawFit::t_max)
      .def_readonly("rms_residual", &PowerLawFit::rms_residual)
      .def_readonly("n_points", &PowerLawFit::n_points)
      .def("__repr__", [](const PowerLawFit& f) {
        return "PowerLawFit(slope=" + std::to_string(f.slope) +
               (f.decaying ? ", decay" : ", growth") +
               ", n_points=" + std::to_string(f.n_points) + ")";
      });

  m.def("fit_power_law", &fit_arrays, py::arg("t"), py::arg("values"), py::arg("t_min"),
        py::arg("t_max"), py::arg("max_points") = 100,
        "Log-log least squares over [t_min, t_max]; slope is a positive magnitude.");

  py::class_<RunConfig>(m, "RunConfig")
      .def_property(
          "model", [](const RunConfig& c) { return std::string(model_kind_name(c.model.kind)); },
          [](RunConfig& c, const std::string& v) { c.model.kind = model_kind_from_name(v); })
      .def_property(
          "mobility",
          [](const RunConfig& c) { return std::string(mobility_kind_name(c.model.mobility)); },
          [](RunConfig& c, const std::string& v) {
            c.model.mobility = mobility_kind_from_name(v);
          })
      .def_property(
          "alpha", [](const RunConfig& c) { return c.model.alpha; },
          [](RunConfig& c, double v) { c.model.alpha = v; })
      .def_property(
          "eps", [](const RunConfig& c) { return c.model.eps; },
          [](RunConfig& c, double v) { c.model.eps = v; })
      .def_property(
          "lambda0", [](const RunConfig& c) { return c.model.lambda0; },
          [](RunConfig& c, double v) { c.model.lambda0 = v; })
      .def_property(
          "m_coef", [](const RunConfig& c) { return c.model.m_coef; },
          [](RunConfig& c, double v) { c.model.m_coef = v; })
      .def_property(
          "dt", [](const RunConfig& c) { return c.model.dt; },
          [](RunConfig& c, double v) { c.model.dt = v; })
      .def_property(
          "t_end", [](const RunConfig& c) { return c.model.t_end; },
          [](RunConfig& c, double v) { c.model.t_end = v; })
      .def_property(
          "dealias", [](const RunConfig& c) { return c.model.dealias; },
          [](RunConfig& c, bool v) { c.model.dealias = v; })
      .def_readwrite("nx", &RunConfig::nx)
      .def_readwrite("ny", &RunConfig::ny)
      .def_readwrite("lx", &RunConfig::lx)
      .def_readwrite("ly", &RunConfig::ly)
      .def_readwrite("alphas", &RunConfig::alphas)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("soe_eps", &RunConfig::soe_eps)
      .def_readwrite("init_amp", &RunConfig::init_amp)
      .def_readwrite("init_mean", &RunConfig::init_mean)
      .def_readwrite("paper_literal_init", &RunConfig::paper_literal_init)
      .def_readwrite("snapshot_times", &RunConfig::snapshot_times)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_property(
          "fit_t_min",
          [](const RunConfig& c) -> std::optional<double> { return c.fit_t_min; },
          [](RunConfig& c, std::optional<double> v) { c.fit_t_min = v; })
      .def_property(
          "fit_t_max",
          [](const RunConfig& c) -> std::optional<double> { return c.fit_t_max; },
          [](RunConfig& c, std::optional<double> v) { c.fit_t_max = v; })
      .def_property(
          "fit_channel",
          [](const RunConfig& c) { return std::string(fit_channel_name(c.fit_channel)); },
          [](RunConfig& c, const std::string& v) { c.fit_channel = channel_from_name(v); })
      .def_readwrite("record_every", &RunConfig::record_every)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("emit_svg", &RunConfig::emit_svg)
      .def("validate", &RunConfig::validate)
      .def("to_json", &config_to_json)
      .def("__repr__", [](const RunConfig& c) {
        return "RunConfig(model=" + std::string(model_kind_name(c.model.kind)) +
               ", alpha=" + std::to_string(c.model.alpha) +
               ", t_end=" + std::to_string(c.model.t_end) + ")";
      });

  m.def(
      "default_config",
      [](const std::string& model) { return RunConfig::defaults_for(model_kind_from_name(model)); },
      py::arg("model") = "fch", "Per-model default configuration.");
  m.def("parse_config", &parse_config_json, py::arg("text"),
        "Strict parse of a JSON config document (or a run manifest).");
  m.def("load_config", &load_config_file, py::arg("path"));

  py::class_<RunArtifacts>(m, "RunArtifacts")
      .def_property_readonly("out_dir",
                             [](const RunArtifacts& a) { return a.out_dir.string(); })
      .def_property_readonly("series",
                             [](const RunArtifacts& a) { return series_to_dict(a.series); })
      .def_readonly("fits", &RunArtifacts::fits)
      .def_readonly("notes", &RunArtifacts::notes)
      .def_readonly("mass_drift", &RunArtifacts::mass_drift)
      .def_readonly("steps", &RunArtifacts::steps)
      .def("__repr__", [](const RunArtifacts& a) {
        return "RunArtifacts(steps=" + std::to_string(a.steps) +
               ", fits=" + std::to_string(a.fits.size()) + ")";
      });

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("alpha", &SweepRow::alpha)
      .def_readonly("fit", &SweepRow::fit);

  py::class_<SweepResult>(m, "SweepResult")
      .def_property_readonly("out_dir",
                             [](const SweepResult& r) { return r.out_dir.string(); })
      .def_readonly("rows", &SweepResult::rows)
      .def_property_readonly("regression",
                             [](const SweepResult& r) -> py::object {
                               if (!r.regression) return py::none();
                               return py::make_tuple(r.regression->first,
                                                     r.regression->second);
                             });

  m.def(
      "run_single",
      [](const RunConfig& cfg, bool force, bool progress) {
        py::gil_scoped_release release;
        return run_single(cfg, force, progress ? &std::cerr : nullptr);
      },
      py::arg("config"), py::arg("force") = false, py::arg("progress") = false,
      "Run one simulation; artifacts land under config.out_dir.");
  m.def(
      "run_sweep",
      [](const RunConfig& cfg, bool force, bool progress) {
        py::gil_scoped_release release;
        return run_sweep(cfg, force, progress ? &std::cerr : nullptr);
      },
      py::arg("config"), py::arg("force") = false, py::arg("progress") = false,
      "One run per alpha plus a summary table and exponent regression.");

  m.def(
      "read_series",
      [](const std::string& path) {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open " + path);
        return series_to_dict(read_series_csv(f));
      },
      py::arg("path"), "Load a series CSV as a dict of numpy arrays.");

  m.def(
      "read_snapshot",
      [](const std::filesystem::path& base) {
        const auto [h, field] = read_snapshot(base);
        py::dict hd;
        hd["nx"] = h.nx;
        hd["ny"] = h.ny;
        hd["lx"] = h.lx;
        hd["ly"] = h.ly;
        hd["time"] = h.time;
        hd["model"] = h.model;
        hd["alpha"] = h.alpha;
        hd["seed"] = h.seed;
        hd["rng_algorithm"] = h.rng_algorithm;
        hd["format_version"] = h.format_version;
        return py::make_tuple(hd, field_to_array(field));
      },
      py::arg("base"),
      "Load a snapshot pair <base>.json/<base>.raw as (header dict, (ny, nx) array).");

  m.def(
      "seeded_field",
      [](int nx, int ny, double lx, double ly, std::uint64_t seed, double mean, double amp) {
        return field_to_array(seeded_field(Grid(nx, ny, lx, ly), seed, mean, amp));
      },
      py::arg("nx"), py::arg("ny"), py::arg("lx"), py::arg("ly"), py::arg("seed"),
      py::arg("mean"), py::arg("amp"),
      "Deterministic uniform-noise initial condition (row-major draw order).");
}
