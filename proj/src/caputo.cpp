#include "fracpf/caputo.hpp"

#include <cmath>
#include <stdexcept>

#include "fracpf/gamma.hpp"

namespace fracpf {

namespace {

// Coefficients of the closed-form integral of the linear interpolant against
// e^{-s r}:  A = dt (e^{-x} - 1 + x)/x^2,  B = dt (1 - e^{-x} - x e^{-x})/x^2
// with x = s dt. Both lose digits to cancellation for small x, where a short
// alternating series in x is exact to round-off.
void interp_coeffs(double s, double dt, double& a, double& b) {
  const double x = s * dt;
  if (x < 0.5) {
    // A/dt = sum_m (-x)^m / (m+2)!,  B/dt = sum_m (m+1)(-x)^m / (m+2)!
    double sa = 0.5, sb = 0.5;  // m = 0 term, 1/2!
    double p = 1.0;
    double fact = 2.0;  // (m+2)!
    for (int m = 1; m <= 14; ++m) {
      p *= -x;
      fact *= m + 2;
      const double term = p / fact;
      sa += term;
      sb += term * (m + 1);
    }
    a = dt * sa;
    b = dt * sb;
    return;
  }
  const double em = std::expm1(-x);  // e^{-x} - 1
  a = dt * (em + x) / (x * x);
  b = dt * (-em - x * std::exp(-x)) / (x * x);
}

}  // namespace

CaputoState::CaputoState(double alpha, SoeKernel kernel, std::span<const double> phi0)
    : alpha_(alpha), kernel_(std::move(kernel)), n_dof_(phi0.size()) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::invalid_argument("CaputoState: alpha must lie in (0, 1]");
  }
  if (n_dof_ == 0) {
    throw std::invalid_argument("CaputoState: empty initial state");
  }
  if (alpha_ < 1.0) {
    if (kernel_.k_exp() == 0) {
      throw std::invalid_argument("CaputoState: alpha < 1 requires an SOE kernel");
    }
    if (std::abs(kernel_.beta - (1.0 + alpha_)) > 1e-12) {
      throw std::invalid_argument(
          "CaputoState: history kernel must be built with beta = 1 + alpha");
    }
    u_hist_.assign(kernel_.k_exp() * n_dof_, 0.0);
    hist_weighted_.assign(n_dof_, 0.0);
  }
  phi_zero_.assign(phi0.begin(), phi0.end());
  phi_prev_ = phi_zero_;
  phi_prev2_ = phi_zero_;
}

void CaputoState::history_advance(double dt_next) {
  if (alpha_ == 1.0) {
    throw std::logic_error("history_advance: no history for alpha = 1");
  }
  if (step_ < 1) {
    throw std::logic_error("history_advance: needs two accepted steps");
  }
  if (!(dt_next > 0.0)) {
    throw std::invalid_argument("history_advance: dt_next must be positive");
  }

  const std::size_t k = kernel_.k_exp();
  const std::size_t n = n_dof_;
  const double* p = phi_prev_.data();
  const double* q = phi_prev2_.data();
  double* hw = hist_weighted_.data();

  for (std::size_t d = 0; d < n; ++d) hw[d] = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double s = kernel_.nodes[i];
    double ca, cb;
    interp_coeffs(s, dt_prev_, ca, cb);
    const double e = std::exp(-s * dt_next);
    const double w = kernel_.weights[i];
    double* u = u_hist_.data() + i * n;
    for (std::size_t d = 0; d < n; ++d) {
      const double v = e * (u[d] + ca * p[d] + cb * q[d]);
      u[d] = v;
      hw[d] += w * v;
    }
  }
}

double CaputoState::caputo_coefficients(double dt_next, std::span<double> rhs_hist) const {
  if (rhs_hist.size() != n_dof_) {
    throw std::invalid_argument("caputo_coefficients: rhs size mismatch");
  }
  if (!(dt_next > 0.0)) {
    throw std::invalid_argument("caputo_coefficients: dt_next must be positive");
  }
  const double* pn = phi_prev_.data();
  if (alpha_ == 1.0) {
    const double c = 1.0 / dt_next;
    for (std::size_t d = 0; d < n_dof_; ++d) rhs_hist[d] = -c * pn[d];
    return c;
  }

  if (dt_next < kernel_.delta * (1.0 - 1e-9)) {
    throw std::invalid_argument(
        "caputo_coefficients: dt_next below the kernel cutoff delta");
  }
  const double t_next = t_now_ + dt_next;
  if (t_next > kernel_.t_max * (1.0 + 1e-9) + kernel_.delta) {
    throw std::invalid_argument("caputo_coefficients: kernel horizon exceeded");
  }

  const double g1 = gamma_fn(1.0 - alpha_);
  const double g2 = gamma_fn(2.0 - alpha_);
  const double dt_pow = std::pow(dt_next, alpha_);
  const double c = 1.0 / (dt_pow * g2);
  const double a = 1.0 / (dt_pow * g1);
  const double b = 1.0 / (std::pow(t_next, alpha_) * g1);
  const double f = alpha_ / g1;

  const double* p0 = phi_zero_.data();
  const double* hw = hist_weighted_.data();
  for (std::size_t d = 0; d < n_dof_; ++d) {
    rhs_hist[d] = (a - c) * pn[d] - b * p0[d] - f * hw[d];
  }
  return c;
}

void CaputoState::accept_step(std::span<const double> phi_new, double dt) {
  if (phi_new.size() != n_dof_) {
    throw std::invalid_argument("accept_step: field size mismatch");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("accept_step: dt must be positive");
  }
  phi_prev2_.swap(phi_prev_);
  phi_prev_.assign(phi_new.begin(), phi_new.end());
  dt_prev_ = dt;
  t_now_ += dt;
  ++step_;
}

double caputo_monomial_oracle(double gamma_exp, double alpha, double t) {
  if (gamma_exp < 0.0) {
    throw std::invalid_argument("caputo_monomial_oracle: gamma must be >= 0");
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::invalid_argument("caputo_monomial_oracle: alpha must lie in (0, 1]");
  }
  if (!(t > 0.0)) {
    throw std::invalid_argument("caputo_monomial_oracle: t must be positive");
  }
  if (gamma_exp == 0.0) {
    return 0.0;
  }
  return gamma_fn(gamma_exp + 1.0) / gamma_fn(gamma_exp + 1.0 - alpha) *
         std::pow(t, gamma_exp - alpha);
}

double l1_caputo(std::span<const double> values, std::span<const double> times,
                 double alpha) {
  if (values.size() != times.size() || values.size() < 2) {
    throw std::invalid_argument("l1_caputo: need matching series of length >= 2");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("l1_caputo: alpha must lie in (0, 1)");
  }
  if (times[0] != 0.0) {
    throw std::invalid_argument("l1_caputo: time grid must start at 0");
  }
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1])) {
      throw std::invalid_argument("l1_caputo: time grid must be strictly increasing");
    }
  }
  const double t_end = times[times.size() - 1];
  const double pref = 1.0 / gamma_fn(2.0 - alpha);
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double dtj = times[j + 1] - times[j];
    const double slope = (values[j + 1] - values[j]) / dtj;
    const double r0 = std::pow(t_end - times[j], 1.0 - alpha);
    const double r1 = (j + 2 == times.size()) ? 0.0 : std::pow(t_end - times[j + 1], 1.0 - alpha);
    sum += slope * (r0 - r1);
  }
  return pref * sum;
}

}  // namespace fracpf
