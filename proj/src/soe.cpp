#include "fracpf/soe.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "fracpf/errors.hpp"
#include "fracpf/gamma.hpp"

namespace fracpf {

namespace {

struct FixedWorkspaceDeleter {
  void operator()(gsl_integration_fixed_workspace* w) const {
    gsl_integration_fixed_free(w);
  }
};

using FixedWorkspace =
    std::unique_ptr<gsl_integration_fixed_workspace, FixedWorkspaceDeleter>;

FixedWorkspace make_fixed(const gsl_integration_fixed_type* type, std::size_t n,
                          double a, double b, double alpha, double beta) {
  FixedWorkspace w(gsl_integration_fixed_alloc(type, n, a, b, alpha, beta));
  if (!w) {
    throw SoeBuildError("soe: quadrature workspace allocation failed");
  }
  return w;
}

// One quadrature assembly pass at a given resolution. Node s_i carries weight
// omega_i = w_i s_i^{beta-1} / Gamma(beta); the Jacobi panel near zero already
// includes the s^{beta-1} factor in its weight function.
SoeKernel assemble(double beta, double delta, double t_max, double eps, std::size_t n_per) {
  SoeKernel k;
  k.beta = beta;
  k.delta = delta;
  k.t_max = t_max;
  k.eps_target = eps;

  // Truncation of the Laplace integral: the tail beyond s_hi contributes less
  // than eps/4. The iteration accounts for the s^{beta-1} growth when beta>1.
  const double l0 = std::log(std::max(std::pow(delta, -beta), 1.0) / (0.25 * eps));
  double lam = l0;
  for (int i = 0; i < 3; ++i) {
    lam = l0 + std::max(0.0, beta - 1.0) * std::log(lam / delta);
  }
  const double s_hi = lam / delta;
  const double s_lo = 1.0 / t_max;
  const double inv_gamma_beta = 1.0 / gamma_fn(beta);

  // 2-arg Jacobi weight (b-x)^a (x-a)^b on [0, s_lo]: choose exponents so the
  // weight is s^{beta-1}.
  FixedWorkspace jac = make_fixed(gsl_integration_fixed_jacobi, n_per, 0.0, s_lo,
                                  /*alpha=*/0.0, /*beta=*/beta - 1.0);
  {
    const double* xs = gsl_integration_fixed_nodes(jac.get());
    const double* ws = gsl_integration_fixed_weights(jac.get());
    for (std::size_t i = 0; i < n_per; ++i) {
      k.nodes.push_back(xs[i]);
      k.weights.push_back(ws[i] * inv_gamma_beta);
    }
  }

  const int panels = static_cast<int>(std::ceil(std::log2(s_hi / s_lo)));
  double a = s_lo;
  for (int j = 0; j < panels; ++j) {
    const double b = (j == panels - 1) ? s_hi : 2.0 * a;
    FixedWorkspace leg =
        make_fixed(gsl_integration_fixed_legendre, n_per, a, b, 0.0, 0.0);
    const double* xs = gsl_integration_fixed_nodes(leg.get());
    const double* ws = gsl_integration_fixed_weights(leg.get());
    for (std::size_t i = 0; i < n_per; ++i) {
      k.nodes.push_back(xs[i]);
      k.weights.push_back(ws[i] * std::pow(xs[i], beta - 1.0) * inv_gamma_beta);
    }
    a = 2.0 * a;
  }

  // Drop terms whose largest possible contribution on [delta, t_max] is
  // negligible against the certification budget.
  const double cut = 0.25 * eps / static_cast<double>(k.nodes.size());
  std::vector<double> s_kept, w_kept;
  for (std::size_t i = 0; i < k.nodes.size(); ++i) {
    if (k.weights[i] * std::exp(-k.nodes[i] * delta) >= cut) {
      s_kept.push_back(k.nodes[i]);
      w_kept.push_back(k.weights[i]);
    }
  }
  k.nodes = std::move(s_kept);
  k.weights = std::move(w_kept);
  return k;
}

double max_residual(const SoeKernel& k, std::size_t samples) {
  const double lr = std::log(k.t_max / k.delta);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t =
        k.delta * std::exp(lr * static_cast<double>(i) / static_cast<double>(samples - 1));
    const double r = std::abs(std::pow(t, -k.beta) - soe_eval(k, t));
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

SoeKernel build_soe(double beta, double delta, double t_max, double eps) {
  if (!(beta > 0.0) || !(beta < 2.0)) {
    throw std::invalid_argument("build_soe: beta must lie in (0, 2)");
  }
  if (!(delta > 0.0) || !(delta < t_max)) {
    throw std::invalid_argument("build_soe: need 0 < delta < t_max");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("build_soe: eps must be positive");
  }

  // Start near the resolution that experience says certifies eps, then grow.
  const std::size_t n0 =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(1.2 * std::log10(1.0 / eps))),
                              8, 24);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n_per = n0; n_per <= 40; n_per += 4) {
    SoeKernel k = assemble(beta, delta, t_max, eps, n_per);
    const double r = max_residual(k, 20000);
    best = std::min(best, r);
    if (r <= 0.8 * eps) {
      return k;
    }
  }
  throw SoeBuildError(
      "build_soe: quadrature resolution exhausted for beta=" + std::to_string(beta) +
      ", delta=" + std::to_string(delta) + ", eps=" + std::to_string(eps) +
      " (best sampled residual " + std::to_string(best) + ")");
}

double soe_eval(const SoeKernel& kernel, double t) {
  // Kahan summation: near t = delta the terms reach delta^{-beta} while the
  // certified residual can be ~1e-9, so naive roundoff would show up.
  double sum = 0.0;
  double carry = 0.0;
  const std::size_t n = kernel.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double term = kernel.weights[i] * std::exp(-kernel.nodes[i] * t);
    const double y = term - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
  }
  return sum;
}

void write_soe_csv(const SoeKernel& kernel, std::ostream& out) {
  out << "s,omega\n";
  out.precision(17);
  for (std::size_t i = 0; i < kernel.nodes.size(); ++i) {
    out << kernel.nodes[i] << ',' << kernel.weights[i] << '\n';
  }
}

}  // namespace fracpf
