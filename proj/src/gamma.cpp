#include "fracpf/gamma.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracpf {

namespace {

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double gamma_positive(double x) {
  // requires x >= 0.5
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) {
    a += kLanczos[i] / (z + i);
  }
  const double t = z + 7.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace

double gamma_fn(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("gamma_fn: non-finite argument");
  }
  if (x >= 0.5) {
    return gamma_positive(x);
  }
  if (x == std::floor(x)) {
    throw std::invalid_argument("gamma_fn: pole at non-positive integer");
  }
  // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
  const double pi = std::numbers::pi;
  return pi / (std::sin(pi * x) * gamma_positive(1.0 - x));
}

}  // namespace fracpf
