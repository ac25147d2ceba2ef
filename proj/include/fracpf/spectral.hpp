// Periodic uniform-grid fields with FFT-based differential operators and
// diagonal implicit solves. Wavenumbers follow the standard FFT layout,
// kx[j] = 2*pi*j/lx for j <= nx/2 (real-to-complex half spectrum), ky signed.
// Odd derivatives zero the Nyquist mode; even derivatives keep it.
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace fracpf {

struct Grid {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;

  Grid() = default;
  Grid(int nx, int ny, double lx, double ly);

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  [[nodiscard]] double cell_area() const { return (lx / nx) * (ly / ny); }
  [[nodiscard]] double area() const { return lx * ly; }
  [[nodiscard]] double kx(int i) const;  // i in [0, nx/2]
  [[nodiscard]] double ky(int j) const;  // j in [0, ny), signed

  friend bool operator==(const Grid&, const Grid&) = default;
};

// Row-major, x fastest: data[j*nx + i] is the value at (x_i, y_j).
struct Field {
  Grid grid;
  std::vector<double> data;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), data(g.size(), fill) {}

  [[nodiscard]] std::size_t size() const { return data.size(); }
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(j) * grid.nx + i]; }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(j) * grid.nx + i];
  }
};

double integrate(const Field& f);
double mean(const Field& f);

// FFT engine bound to one grid. Owns FFTW plans and scratch buffers, so it is
// not safe for concurrent use by multiple threads; each simulation owns one.
// Plan creation itself is serialized internally (FFTW's planner is not
// thread-safe even when the transforms are independent).
class Spectral {
 public:
  explicit Spectral(const Grid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  [[nodiscard]] const Grid& grid() const { return grid_; }

  [[nodiscard]] Field laplacian(const Field& f);
  [[nodiscard]] Field biharmonic(const Field& f);
  [[nodiscard]] std::pair<Field, Field> gradient(const Field& f);
  [[nodiscard]] Field divergence(const Field& fx, const Field& fy);

  // Solves (c0 - c2*Lap + c4*Lap^2) u = rhs, i.e. divides by the symbol
  // c0 + c2|k|^2 + c4|k|^4. A singular symbol at a nonzero mode is a hard
  // error; c0 = 0 pins the zero mode so the input mean passes through.
  [[nodiscard]] Field invert_symbol(const Field& rhs, double c0, double c2, double c4);

  // Zeroes the top third of modes in each direction (2/3 rule).
  void dealias(Field& f);

  // Low-level access for steppers: unnormalized forward transform and
  // normalized inverse transform over the engine's half-spectrum layout,
  // flattened as idx = j*(nx/2+1) + i.
  void forward(const double* in, std::complex<double>* out);
  void inverse(const std::complex<double>* in, double* out);
  [[nodiscard]] std::size_t spectra_size() const { return spec_size_; }

 private:
  void check_grid(const Field& f) const;

  Grid grid_;
  std::size_t spec_size_;
  std::vector<std::complex<double>> spec_, spec2_, spec3_;
  std::vector<double> real_, real2_;
  void* plan_fwd_ = nullptr;  // fftw_plan, kept void* to keep fftw3.h out of the header
  void* plan_inv_ = nullptr;
};

}  // namespace fracpf
