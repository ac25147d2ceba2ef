#include "fracpf/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fracpf {

namespace {

// FFTW's planner mutates global state; transforms execute concurrently but
// plan creation/destruction must be serialized.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Grid::Grid(int nx, int ny, double lx, double ly) : nx(nx), ny(ny), lx(lx), ly(ly) {
  if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0) {
    throw std::invalid_argument("Grid: nx, ny must be even and >= 4");
  }
  if (!(lx > 0.0) || !(ly > 0.0)) {
    throw std::invalid_argument("Grid: lx, ly must be positive");
  }
}

double Grid::kx(int i) const { return 2.0 * std::numbers::pi * i / lx; }

double Grid::ky(int j) const {
  const int s = (j <= ny / 2) ? j : j - ny;
  return 2.0 * std::numbers::pi * s / ly;
}

double integrate(const Field& f) { return mean(f) * f.grid.area(); }

double mean(const Field& f) {
  double sum = 0.0;
  for (double v : f.data) sum += v;
  return sum / static_cast<double>(f.grid.size());
}

Spectral::Spectral(const Grid& grid)
    : grid_(grid),
      spec_size_(static_cast<std::size_t>(grid.ny) * (grid.nx / 2 + 1)),
      spec_(spec_size_),
      spec2_(spec_size_),
      spec3_(spec_size_),
      real_(grid.size()),
      real2_(grid.size()) {
  if (grid_.nx == 0) {
    throw std::invalid_argument("Spectral: default-constructed grid");
  }
  // ESTIMATE keeps planning deterministic (no timing-based choices);
  // UNALIGNED lets the plans run on any caller array via new-array execute.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_2d(
      grid_.ny, grid_.nx, real_.data(),
      reinterpret_cast<fftw_complex*>(spec_.data()), flags);
  plan_inv_ = fftw_plan_dft_c2r_2d(
      grid_.ny, grid_.nx, reinterpret_cast<fftw_complex*>(spec_.data()),
      real_.data(), flags);
  if (!plan_fwd_ || !plan_inv_) {
    throw std::runtime_error("Spectral: FFTW plan creation failed");
  }
}

Spectral::~Spectral() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Spectral::check_grid(const Field& f) const {
  if (!(f.grid == grid_)) {
    throw std::invalid_argument("Spectral: field grid does not match engine grid");
  }
}

void Spectral::forward(const double* in, std::complex<double>* out) {
  // new-array execute keeps the engine buffers free for callers
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Spectral::inverse(const std::complex<double>* in, double* out) {
  // c2r destroys its input; copy through scratch so callers keep theirs
  spec3_.assign(in, in + spec_size_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inv_),
                       reinterpret_cast<fftw_complex*>(spec3_.data()), out);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] *= scale;
}

Field Spectral::laplacian(const Field& f) {
  check_grid(f);
  forward(f.data.data(), spec_.data());
  const int nxh = grid_.nx / 2 + 1;
  for (int j = 0; j < grid_.ny; ++j) {
    const double ky = grid_.ky(j);
    for (int i = 0; i < nxh; ++i) {
      const double kx = grid_.kx(i);
      spec_[static_cast<std::size_t>(j) * nxh + i] *= -(kx * kx + ky * ky);
    }
  }
  Field out(grid_);
  inverse(spec_.data(), out.data.data());
  return out;
}

Field Spectral::biharmonic(const Field& f) {
  check_grid(f);
  forward(f.data.data(), spec_.data());
  const int nxh = grid_.nx / 2 + 1;
  for (int j = 0; j < grid_.ny; ++j) {
    const double ky = grid_.ky(j);
    for (int i = 0; i < nxh; ++i) {
      const double kx = grid_.kx(i);
      const double k2 = kx * kx + ky * ky;
      spec_[static_cast<std::size_t>(j) * nxh + i] *= k2 * k2;
    }
  }
  Field out(grid_);
  inverse(spec_.data(), out.data.data());
  return out;
}

std::pair<Field, Field> Spectral::gradient(const Field& f) {
  check_grid(f);
  forward(f.data.data(), spec_.data());
  const int nxh = grid_.nx / 2 + 1;
  const std::complex<double> im(0.0, 1.0);
  for (int j = 0; j < grid_.ny; ++j) {
    // Nyquist modes of odd derivatives are zeroed (their sign is ambiguous
    // for a real signal and they would otherwise leak imaginary parts).
    const double ky = (j == grid_.ny / 2) ? 0.0 : grid_.ky(j);
    for (int i = 0; i < nxh; ++i) {
      const double kx = (i == grid_.nx / 2) ? 0.0 : grid_.kx(i);
      const std::size_t idx = static_cast<std::size_t>(j) * nxh + i;
      spec2_[idx] = im * kx * spec_[idx];
      spec_[idx] *= im * ky;
    }
  }
  Field gx(grid_), gy(grid_);
  inverse(spec2_.data(), gx.data.data());
  inverse(spec_.data(), gy.data.data());
  return {std::move(gx), std::move(gy)};
}

Field Spectral::divergence(const Field& fx, const Field& fy) {
  check_grid(fx);
  check_grid(fy);
  forward(fx.data.data(), spec_.data());
  forward(fy.data.data(), spec2_.data());
  const int nxh = grid_.nx / 2 + 1;
  const std::complex<double> im(0.0, 1.0);
  for (int j = 0; j < grid_.ny; ++j) {
    const double ky = (j == grid_.ny / 2) ? 0.0 : grid_.ky(j);
    for (int i = 0; i < nxh; ++i) {
      const double kx = (i == grid_.nx / 2) ? 0.0 : grid_.kx(i);
      const std::size_t idx = static_cast<std::size_t>(j) * nxh + i;
      spec_[idx] = im * (kx * spec_[idx] + ky * spec2_[idx]);
    }
  }
  Field out(grid_);
  inverse(spec_.data(), out.data.data());
  return out;
}

Field Spectral::invert_symbol(const Field& rhs, double c0, double c2, double c4) {
  check_grid(rhs);
  forward(rhs.data.data(), spec_.data());
  const int nxh = grid_.nx / 2 + 1;
  for (int j = 0; j < grid_.ny; ++j) {
    const double ky = grid_.ky(j);
    for (int i = 0; i < nxh; ++i) {
      if (i == 0 && j == 0) continue;
      const double kx = grid_.kx(i);
      const double k2 = kx * kx + ky * ky;
      const double sym = c0 + c2 * k2 + c4 * k2 * k2;
      if (sym == 0.0) {
        throw std::invalid_argument("invert_symbol: singular symbol at a nonzero mode");
      }
      spec_[static_cast<std::size_t>(j) * nxh + i] /= sym;
    }
  }
  // zero mode: divide by c0, or pin (pass the mean through) when c0 = 0
  if (c0 != 0.0) {
    spec_[0] /= c0;
  }
  Field out(grid_);
  inverse(spec_.data(), out.data.data());
  return out;
}

void Spectral::dealias(Field& f) {
  check_grid(f);
  forward(f.data.data(), spec_.data());
  const int nxh = grid_.nx / 2 + 1;
  const int cut_x = grid_.nx / 3;
  const int cut_y = grid_.ny / 3;
  for (int j = 0; j < grid_.ny; ++j) {
    const int js = (j <= grid_.ny / 2) ? j : grid_.ny - j;
    for (int i = 0; i < nxh; ++i) {
      if (i > cut_x || js > cut_y) {
        spec_[static_cast<std::size_t>(j) * nxh + i] = 0.0;
      }
    }
  }
  inverse(spec_.data(), f.data.data());
}

}  // namespace fracpf
