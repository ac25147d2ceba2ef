// Fast evaluation of the Caputo derivative of order alpha in (0,1] along a
// discrete trajectory. The derivative at t_{n+1} splits into a local part
// over [t_n, t_{n+1}] and a history part over [0, t_n]; after integration by
// parts the history kernel (t-tau)^{-1-alpha} is compressed by a
// sum-of-exponentials, giving per-DOF accumulators U_hist,i that advance in
// O(k_exp) work per step regardless of how many steps were taken:
//
//   D^alpha phi(t_{n+1}) ~= c_impl (phi^{n+1} - phi^n)
//     + 1/Gamma(1-alpha) [ phi^n/dt^alpha - phi^0/t_{n+1}^alpha
//                          - alpha sum_i omega_i U_hist,i ]
//   c_impl = 1/(dt^alpha Gamma(2-alpha))
//
// alpha = 1 degenerates to exact backward differencing with no kernel.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracpf/soe.hpp"

namespace fracpf {

class CaputoState {
 public:
  // phi0 is both the initial condition and the first "previous" value.
  // kernel must be built with beta = 1 + alpha over [dt_min, horizon];
  // for alpha = 1 pass a default-constructed kernel (it is not used).
  CaputoState(double alpha, SoeKernel kernel, std::span<const double> phi0);

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] const SoeKernel& kernel() const { return kernel_; }
  [[nodiscard]] std::size_t n_dof() const { return n_dof_; }
  [[nodiscard]] long step_index() const { return step_; }
  [[nodiscard]] double t_now() const { return t_now_; }
  [[nodiscard]] std::span<const double> phi_prev() const { return phi_prev_; }
  [[nodiscard]] std::span<const double> phi_prev2() const { return phi_prev2_; }
  [[nodiscard]] std::span<const double> phi_zero() const { return phi_zero_; }
  // accumulator storage, exactly k_exp * n_dof reals
  [[nodiscard]] std::size_t history_size() const { return u_hist_.size(); }

  // Moves every accumulator from t_n to t_{n+1} using the linear interpolant
  // of phi over [t_{n-1}, t_n]. Requires step_index >= 1; at step 0 the
  // history integral is empty and the accumulators stay zero.
  void history_advance(double dt_next);

  // Coefficients of the solve c_impl*phi^{n+1} + rhs_hist = RHS(phi^{n+1},...).
  // Writes rhs_hist (one entry per DOF) and returns c_impl.
  double caputo_coefficients(double dt_next, std::span<double> rhs_hist) const;

  // Accepts phi^{n+1} and advances the trajectory bookkeeping.
  void accept_step(std::span<const double> phi_new, double dt);

 private:
  double alpha_;
  SoeKernel kernel_;
  std::size_t n_dof_;
  long step_ = 0;
  double t_now_ = 0.0;
  double dt_prev_ = 0.0;
  std::vector<double> phi_zero_, phi_prev_, phi_prev2_;
  std::vector<double> u_hist_;         // [node][dof], k_exp * n_dof
  std::vector<double> hist_weighted_;  // sum_i omega_i U_hist,i per DOF
};

// Closed-form Caputo derivative of t^gamma: Gamma(gamma+1)/Gamma(gamma+1-alpha)
// * t^{gamma-alpha}; gamma = 0 returns 0. Test oracle.
double caputo_monomial_oracle(double gamma_exp, double alpha, double t);

// Direct piecewise-linear quadrature of the defining integral at the final
// time; O(N^2) reference implementation used as an oracle for the fast path.
double l1_caputo(std::span<const double> values, std::span<const double> times,
                 double alpha);

}  // namespace fracpf
