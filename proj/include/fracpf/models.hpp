// Free energies, chemical potentials, mobilities, and the one-step advance
// procedures for the time-fractional phase-field models. Both steppers are
// stabilized semi-implicit: the stiff constant-coefficient operator is
// implicit, nonlinear terms are evaluated at the second-order extrapolation
// phibar = 2 phi^n - phi^{n-1}, and stabilizer differences S (or S0, S1)
// damp the splitting error. Each step costs one diagonal spectral solve.
#pragma once

#include <optional>

#include "fracpf/caputo.hpp"
#include "fracpf/spectral.hpp"

namespace fracpf {

enum class ModelKind { FCH, FMBE_SLOPE, FMBE_NOSLOPE, FAC };
enum class MobilityKind { CONSTANT, TWO_SIDED, ONE_SIDED };
enum class MbeVariant { SLOPE_SELECTION, NO_SLOPE_SELECTION };

struct ModelSpec {
  ModelKind kind = ModelKind::FCH;
  double alpha = 1.0;
  double eps = 0.05;           // interface / surface-diffusion parameter
  double lambda0 = 0.02;       // mobility scale (FCH, FAC)
  MobilityKind mobility = MobilityKind::CONSTANT;  // FCH only
  double m_coef = 1.0;         // M (FMBE)
  std::optional<double> s_stab;            // S, one-operator scheme
  std::optional<double> s0_stab, s1_stab;  // S0, S1, two-operator scheme
  double dt = 1e-2;
  double t_end = 150.0;
  bool dealias = false;

  // Stabilizer defaults when not set explicitly:
  //   S  = min(2/eps^2, 20)
  //   S0 = 0 for constant mobility (the full fourth-order operator is already
  //        implicit), lambda0*eps^2 for variable mobilities
  //   S1 = 2*lambda0
  [[nodiscard]] double stab_s() const;
  [[nodiscard]] double stab_s0() const;
  [[nodiscard]] double stab_s1() const;

  void validate() const;  // throws ConfigError naming the offending field
};

struct SimState {
  Field phi;
  CaputoState caputo;
  double time = 0.0;
  long step = 0;
  double mean0 = 0.0;  // initial spatial mean, pinned by conserving models
};

// kernel: required (beta = 1 + alpha over [dt, t_end]) when alpha < 1 for any
// model; pass nullptr for alpha = 1.
SimState make_sim_state(const ModelSpec& ms, const Field& phi0, const SoeKernel* kernel);

// F = int [ eps^2/2 |grad phi|^2 + 1/4 phi^2 (1-phi)^2 ]
double ch_energy(Spectral& sp, const Field& phi, double eps);

// mu = -eps^2 Lap phi + phi (1-phi)(1/2-phi)
Field ch_chemical_potential(Spectral& sp, const Field& phi, double eps);

// (i) lambda0, (ii) lambda0 |1-phi^2|, (iii) lambda0/2 |1+phi|
Field mobility(MobilityKind kind, const Field& phi, double lambda0);

// E = int [ eps^2/2 |Lap phi|^2 + f(grad phi) ], f = 1/4 (|grad phi|^2 - 1)^2
// for slope selection, f = -1/2 ln(1 + |grad phi|^2) without.
double mbe_energy(Spectral& sp, const Field& phi, double eps, MbeVariant variant);

// RHS of the height equation: -M (eps^2 Lap^2 phi - div((|grad phi|^2-1) grad phi))
// with slope selection, -M (eps^2 Lap^2 phi + div(grad phi / (1+|grad phi|^2)))
// without. Zero mean by construction.
Field mbe_force(Spectral& sp, const Field& phi, double eps, double m_coef,
                MbeVariant variant);

// One step of the conserved (Cahn-Hilliard type) scheme; requires kind FCH.
void step_fch(Spectral& sp, SimState& state, const ModelSpec& ms);

// One step of the non-divergence scheme; serves FMBE_SLOPE, FMBE_NOSLOPE and
// FAC (with L = -eps^2 Lap). The FMBE variants conserve the mean.
void step_fmbe(Spectral& sp, SimState& state, const ModelSpec& ms);

// Energy channel used by the observables for this model kind.
double model_energy(Spectral& sp, const Field& phi, const ModelSpec& ms);

}  // namespace fracpf
