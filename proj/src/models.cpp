#include "fracpf/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracpf/errors.hpp"

namespace fracpf {

namespace {

// f'(phi) for the double well 1/4 phi^2 (1-phi)^2
inline double well_prime(double p) { return p * (1.0 - p) * (0.5 - p); }

bool is_fmbe(ModelKind k) {
  return k == ModelKind::FMBE_SLOPE || k == ModelKind::FMBE_NOSLOPE;
}

// Shared implicit solve: given the explicit physical-space right-hand side
// (everything except the stabilizer differences) and phibar, solves
//   (c0 - c2 Lap + c4 Lap^2) u = expl + s0 Lap^2 phibar - s1 Lap phibar
// diagonally in spectral space. Conserving models pin the zero mode to the
// stored initial mean, which keeps mass conservation exact instead of
// accurate to the SOE tolerance.
Field solve_implicit(Spectral& sp, const Field& expl, const Field& phibar,
                     double c0, double c2, double c4, double s0, double s1,
                     bool pin_mean, double mean0) {
  const Grid& g = expl.grid;
  const int nxh = g.nx / 2 + 1;
  std::vector<std::complex<double>> rhs_hat(sp.spectra_size());
  std::vector<std::complex<double>> pb_hat(sp.spectra_size());
  sp.forward(expl.data.data(), rhs_hat.data());
  sp.forward(phibar.data.data(), pb_hat.data());

  for (int j = 0; j < g.ny; ++j) {
    const double ky = g.ky(j);
    for (int i = 0; i < nxh; ++i) {
      const double kx = g.kx(i);
      const double k2 = kx * kx + ky * ky;
      const std::size_t idx = static_cast<std::size_t>(j) * nxh + i;
      const std::complex<double> num =
          rhs_hat[idx] + (s0 * k2 * k2 + s1 * k2) * pb_hat[idx];
      rhs_hat[idx] = num / (c0 + c2 * k2 + c4 * k2 * k2);
    }
  }
  if (pin_mean) {
    rhs_hat[0] = mean0 * static_cast<double>(g.size());
  }
  Field out(g);
  sp.inverse(rhs_hat.data(), out.data.data());
  return out;
}

void check_finite_or_throw(const Field& f, long step, double time) {
  for (double v : f.data) {
    if (!std::isfinite(v)) {
      throw DivergenceError(
          step, time,
          "solution diverged at step " + std::to_string(step) + " (t = " +
              std::to_string(time) +
              "); consider larger stabilizers or a smaller dt");
    }
  }
}

// phibar = 2 phi^n - phi^{n-1}; first step degrades to phi^0.
Field extrapolate(const SimState& st, const Grid& g) {
  Field phibar(g);
  const auto p = st.caputo.phi_prev();
  if (st.step == 0) {
    std::copy(p.begin(), p.end(), phibar.data.begin());
    return phibar;
  }
  const auto q = st.caputo.phi_prev2();
  for (std::size_t d = 0; d < p.size(); ++d) {
    phibar.data[d] = 2.0 * p[d] - q[d];
  }
  return phibar;
}

}  // namespace

double ModelSpec::stab_s() const {
  return s_stab ? *s_stab : std::min(2.0 / (eps * eps), 20.0);
}

double ModelSpec::stab_s0() const {
  if (s0_stab) return *s0_stab;
  return mobility == MobilityKind::CONSTANT ? 0.0 : lambda0 * eps * eps;
}

double ModelSpec::stab_s1() const { return s1_stab ? *s1_stab : 2.0 * lambda0; }

void ModelSpec::validate() const {
  if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("alpha: must lie in (0, 1]");
  if (!(eps > 0.0)) throw ConfigError("eps: must be positive");
  if (!(lambda0 > 0.0)) throw ConfigError("lambda0: must be positive");
  if (!(m_coef > 0.0)) throw ConfigError("m_coef: must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt: must be positive");
  if (t_end < 0.0) throw ConfigError("t_end: must be nonnegative");
  if (s_stab && *s_stab < 0.0) throw ConfigError("s_stab: must be nonnegative");
  if (s0_stab && *s0_stab < 0.0) throw ConfigError("s0_stab: must be nonnegative");
  if (s1_stab && *s1_stab < 0.0) throw ConfigError("s1_stab: must be nonnegative");
}

SimState make_sim_state(const ModelSpec& ms, const Field& phi0, const SoeKernel* kernel) {
  ms.validate();
  if (ms.alpha < 1.0 && kernel == nullptr) {
    throw std::invalid_argument("make_sim_state: alpha < 1 requires an SOE kernel");
  }
  SimState st{phi0,
              CaputoState(ms.alpha, ms.alpha < 1.0 ? *kernel : SoeKernel{},
                          std::span<const double>(phi0.data)),
              0.0, 0, mean(phi0)};
  return st;
}

double ch_energy(Spectral& sp, const Field& phi, double eps) {
  auto [gx, gy] = sp.gradient(phi);
  double sum = 0.0;
  for (std::size_t d = 0; d < phi.size(); ++d) {
    const double p = phi.data[d];
    const double w = p * (1.0 - p);
    sum += 0.5 * eps * eps * (gx.data[d] * gx.data[d] + gy.data[d] * gy.data[d]) +
           0.25 * w * w;
  }
  return sum * phi.grid.cell_area();
}

Field ch_chemical_potential(Spectral& sp, const Field& phi, double eps) {
  Field mu = sp.laplacian(phi);
  for (std::size_t d = 0; d < phi.size(); ++d) {
    mu.data[d] = -eps * eps * mu.data[d] + well_prime(phi.data[d]);
  }
  return mu;
}

Field mobility(MobilityKind kind, const Field& phi, double lambda0) {
  Field out(phi.grid);
  switch (kind) {
    case MobilityKind::CONSTANT:
      std::fill(out.data.begin(), out.data.end(), lambda0);
      break;
    case MobilityKind::TWO_SIDED:
      for (std::size_t d = 0; d < phi.size(); ++d) {
        out.data[d] = lambda0 * std::abs(1.0 - phi.data[d] * phi.data[d]);
      }
      break;
    case MobilityKind::ONE_SIDED:
      for (std::size_t d = 0; d < phi.size(); ++d) {
        out.data[d] = 0.5 * lambda0 * std::abs(1.0 + phi.data[d]);
      }
      break;
    default:
      throw std::invalid_argument("mobility: unknown kind");
  }
  return out;
}

double mbe_energy(Spectral& sp, const Field& phi, double eps, MbeVariant variant) {
  auto [gx, gy] = sp.gradient(phi);
  Field lap = sp.laplacian(phi);
  double sum = 0.0;
  for (std::size_t d = 0; d < phi.size(); ++d) {
    const double g2 = gx.data[d] * gx.data[d] + gy.data[d] * gy.data[d];
    const double bulk = (variant == MbeVariant::SLOPE_SELECTION)
                            ? 0.25 * (g2 - 1.0) * (g2 - 1.0)
                            : -0.5 * std::log1p(g2);
    sum += 0.5 * eps * eps * lap.data[d] * lap.data[d] + bulk;
  }
  return sum * phi.grid.cell_area();
}

Field mbe_force(Spectral& sp, const Field& phi, double eps, double m_coef,
                MbeVariant variant) {
  auto [gx, gy] = sp.gradient(phi);
  Field px(phi.grid), py(phi.grid);
  if (variant == MbeVariant::SLOPE_SELECTION) {
    for (std::size_t d = 0; d < phi.size(); ++d) {
      const double g2 = gx.data[d] * gx.data[d] + gy.data[d] * gy.data[d];
      px.data[d] = (g2 - 1.0) * gx.data[d];
      py.data[d] = (g2 - 1.0) * gy.data[d];
    }
  } else {
    for (std::size_t d = 0; d < phi.size(); ++d) {
      const double g2 = gx.data[d] * gx.data[d] + gy.data[d] * gy.data[d];
      px.data[d] = -gx.data[d] / (1.0 + g2);
      py.data[d] = -gy.data[d] / (1.0 + g2);
    }
  }
  Field div = sp.divergence(px, py);
  Field bih = sp.biharmonic(phi);
  Field out(phi.grid);
  for (std::size_t d = 0; d < phi.size(); ++d) {
    out.data[d] = m_coef * (-eps * eps * bih.data[d] + div.data[d]);
  }
  return out;
}

void step_fch(Spectral& sp, SimState& st, const ModelSpec& ms) {
  if (ms.kind != ModelKind::FCH) {
    throw std::invalid_argument("step_fch: model kind is not FCH");
  }
  const Grid& g = st.phi.grid;
  const double dt = ms.dt;
  if (st.step >= 1 && ms.alpha < 1.0) {
    st.caputo.history_advance(dt);
  }
  Field expl(g);
  const double c_impl =
      st.caputo.caputo_coefficients(dt, std::span<double>(expl.data));
  for (double& v : expl.data) v = -v;  // expl starts as -rhs_hist

  Field phibar = extrapolate(st, g);
  if (ms.dealias) sp.dealias(phibar);

  const double s0 = ms.stab_s0();
  const double s1 = ms.stab_s1();
  double c4 = s0;

  if (ms.mobility == MobilityKind::CONSTANT) {
    // flux divergence with the fourth-order term fully implicit:
    // lambda0 Lap f'(phibar) explicit, -lambda0 eps^2 Lap^2 phi^{n+1} implicit
    Field fp(g);
    for (std::size_t d = 0; d < g.size(); ++d) fp.data[d] = well_prime(phibar.data[d]);
    Field lap_fp = sp.laplacian(fp);
    for (std::size_t d = 0; d < g.size(); ++d) {
      expl.data[d] += ms.lambda0 * lap_fp.data[d];
    }
    c4 += ms.lambda0 * ms.eps * ms.eps;
  } else {
    // whole flux at the extrapolated state; implicitness carried by S0, S1
    Field mu = ch_chemical_potential(sp, phibar, ms.eps);
    auto [mx, my] = sp.gradient(mu);
    Field lam = mobility(ms.mobility, phibar, ms.lambda0);
    for (std::size_t d = 0; d < g.size(); ++d) {
      mx.data[d] *= lam.data[d];
      my.data[d] *= lam.data[d];
    }
    Field flux = sp.divergence(mx, my);
    for (std::size_t d = 0; d < g.size(); ++d) {
      expl.data[d] += flux.data[d];
    }
  }

  Field next = solve_implicit(sp, expl, phibar, c_impl, s1, c4, s0, s1,
                              /*pin_mean=*/true, st.mean0);
  check_finite_or_throw(next, st.step, st.time + dt);

  st.caputo.accept_step(std::span<const double>(next.data), dt);
  st.phi = std::move(next);
  st.time = st.caputo.t_now();
  st.step += 1;
}

void step_fmbe(Spectral& sp, SimState& st, const ModelSpec& ms) {
  if (ms.kind == ModelKind::FCH) {
    throw std::invalid_argument("step_fmbe: use step_fch for the FCH model");
  }
  const Grid& g = st.phi.grid;
  const double dt = ms.dt;
  if (st.step >= 1 && ms.alpha < 1.0) {
    st.caputo.history_advance(dt);
  }
  Field expl(g);
  const double c_impl =
      st.caputo.caputo_coefficients(dt, std::span<double>(expl.data));
  for (double& v : expl.data) v = -v;

  Field phibar = extrapolate(st, g);
  if (ms.dealias) sp.dealias(phibar);

  double c2 = 0.0, c4 = 0.0, s1 = 0.0;
  bool pin = false;
  if (is_fmbe(ms.kind)) {
    const double s = ms.stab_s();
    const MbeVariant variant = (ms.kind == ModelKind::FMBE_SLOPE)
                                   ? MbeVariant::SLOPE_SELECTION
                                   : MbeVariant::NO_SLOPE_SELECTION;
    // nonlinear slope force at phibar; the biharmonic part moves to the
    // implicit side, so assemble only the divergence term here
    auto [gx, gy] = sp.gradient(phibar);
    Field px(g), py(g);
    if (variant == MbeVariant::SLOPE_SELECTION) {
      for (std::size_t d = 0; d < g.size(); ++d) {
        const double g2 = gx.data[d] * gx.data[d] + gy.data[d] * gy.data[d];
        px.data[d] = (g2 - 1.0) * gx.data[d];
        py.data[d] = (g2 - 1.0) * gy.data[d];
      }
    } else {
      for (std::size_t d = 0; d < g.size(); ++d) {
        const double g2 = gx.data[d] * gx.data[d] + gy.data[d] * gy.data[d];
        px.data[d] = -gx.data[d] / (1.0 + g2);
        py.data[d] = -gy.data[d] / (1.0 + g2);
      }
    }
    Field div = sp.divergence(px, py);
    for (std::size_t d = 0; d < g.size(); ++d) {
      expl.data[d] += ms.m_coef * div.data[d];
    }
    c2 = ms.m_coef * s;
    c4 = ms.m_coef * ms.eps * ms.eps;
    s1 = ms.m_coef * s;
    pin = true;
  } else {
    // FAC: c phi - lambda0 eps^2 Lap phi^{n+1} implicit, f'(phibar) explicit
    const double s = ms.stab_s();
    for (std::size_t d = 0; d < g.size(); ++d) {
      expl.data[d] -= ms.lambda0 * well_prime(phibar.data[d]);
    }
    c2 = ms.lambda0 * (ms.eps * ms.eps + s);
    c4 = 0.0;
    s1 = ms.lambda0 * s;
    pin = false;
  }

  Field next = solve_implicit(sp, expl, phibar, c_impl, c2, c4, /*s0=*/0.0, s1,
                              pin, st.mean0);
  check_finite_or_throw(next, st.step, st.time + dt);

  st.caputo.accept_step(std::span<const double>(next.data), dt);
  st.phi = std::move(next);
  st.time = st.caputo.t_now();
  st.step += 1;
}

double model_energy(Spectral& sp, const Field& phi, const ModelSpec& ms) {
  switch (ms.kind) {
    case ModelKind::FCH:
    case ModelKind::FAC:
      return ch_energy(sp, phi, ms.eps);
    case ModelKind::FMBE_SLOPE:
      return mbe_energy(sp, phi, ms.eps, MbeVariant::SLOPE_SELECTION);
    case ModelKind::FMBE_NOSLOPE:
      return mbe_energy(sp, phi, ms.eps, MbeVariant::NO_SLOPE_SELECTION);
  }
  throw std::invalid_argument("model_energy: unknown model kind");
}

}  // namespace fracpf
