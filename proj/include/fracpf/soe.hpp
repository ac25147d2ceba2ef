// Sum-of-exponentials compression of the power-law kernel t^{-beta}:
//   t^{-beta} ~= sum_i omega_i exp(-s_i t)  certified on [delta, t_max].
// Built from the integral representation
//   t^{-beta} = 1/Gamma(beta) * int_0^inf s^{beta-1} e^{-s t} ds,
// discretized by Gauss-Jacobi quadrature near s=0 (absorbing the s^{beta-1}
// singularity) and Gauss-Legendre on dyadically doubled panels up to the
// truncation point s_hi ~ log(1/eps)/delta.
#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

namespace fracpf {

struct SoeKernel {
  double beta = 0.0;
  double delta = 0.0;
  double t_max = 0.0;
  double eps_target = 0.0;
  std::vector<double> nodes;    // s_i, ascending
  std::vector<double> weights;  // omega_i

  [[nodiscard]] std::size_t k_exp() const { return nodes.size(); }
};

// Builds a kernel whose sampled residual max_t |t^{-beta} - soe_eval(t)| over
// a dense log-spaced grid in [delta, t_max] is at most eps. The node count is
// increased until certification succeeds; SoeBuildError signals
// quadrature-resolution exhaustion (the combination of beta, delta and eps is
// out of reach, e.g. an absolute target below the round-off of the kernel's
// peak value delta^{-beta}).
SoeKernel build_soe(double beta, double delta, double t_max, double eps);

// Plain evaluation of the exponential sum; compensated summation so that the
// certified residual is meaningful near t = delta where the kernel is large.
double soe_eval(const SoeKernel& kernel, double t);

// CSV dump, columns "s,omega", one row per term, 17 significant digits.
void write_soe_csv(const SoeKernel& kernel, std::ostream& out);

}  // namespace fracpf
