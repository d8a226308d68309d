#pragma once

#include <complex>
#include <span>
#include <vector>

#include "displab/errors.hpp"

namespace displab {

/// Uniform periodic grid on x in [-L, L).  Nodes x_j = -L + 2L*j/N and
/// wavenumbers k_m = (pi/L)*m for m in {-N/2, ..., N/2-1}.
struct PeriodicGrid {
  PeriodicGrid(double half_width, int size);

  double half_width;  // L
  int size;           // N, even, >= 16

  double node(int j) const { return -half_width + 2.0 * half_width * j / size; }
  double spacing() const { return 2.0 * half_width / size; }
  /// Wavenumber of mode m, m in [-N/2, N/2).
  double wavenumber(int m) const;
  /// Signed mode index of storage slot j (FFT layout), in [-N/2, N/2).
  int mode_of_slot(int j) const { return j < size / 2 ? j : j - size; }
  std::vector<double> nodes() const;

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;
};

/// Real samples of a periodic function on the grid nodes.
class RealField {
 public:
  RealField(PeriodicGrid grid, std::vector<double> values);
  /// Zero field.
  explicit RealField(PeriodicGrid grid);

  const PeriodicGrid& grid() const { return grid_; }
  int size() const { return grid_.size; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](int j) const { return values_[j]; }
  double& operator[](int j) { return values_[j]; }

  bool finite() const;
  double max_abs() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

/// Discrete Fourier coefficients of a RealField, stored in FFT layout
/// (slot j holds mode j for j < N/2 and mode j - N for j >= N/2).  The
/// forward transform is unnormalized; the inverse carries the 1/N factor,
/// so Parseval reads sum_j u_j^2 * (2L/N) = sum_m |c_m|^2 * (2L/N^2).
class SpectralCoeffs {
 public:
  SpectralCoeffs(PeriodicGrid grid, std::vector<std::complex<double>> coeffs);
  explicit SpectralCoeffs(PeriodicGrid grid);

  const PeriodicGrid& grid() const { return grid_; }
  int size() const { return grid_.size; }
  std::span<const std::complex<double>> coeffs() const { return coeffs_; }
  std::span<std::complex<double>> coeffs() { return coeffs_; }

  /// Coefficient of signed mode m in [-N/2, N/2).
  std::complex<double> mode(int m) const;

  double max_abs() const;

 private:
  PeriodicGrid grid_;
  std::vector<std::complex<double>> coeffs_;
};

SpectralCoeffs to_spectral(const RealField& f);
RealField to_physical(const SpectralCoeffs& c);

/// Spectral m-th derivative (m <= 6).  The Nyquist mode is zeroed for odd
/// orders so the result stays real.
RealField derivative(const RealField& f, int order);
void derivative_inplace(SpectralCoeffs& c, int order);

struct ResolutionReport {
  bool ok;
  double tail_max;  // relative to the overall maximum modulus (0 if all zero)
};

/// True iff the top `tail_fraction` of |k| carries coefficients below
/// `threshold` relative to the overall maximum.  All-zero fields pass.
ResolutionReport resolution_ok(const SpectralCoeffs& c,
                               double tail_fraction = 0.1,
                               double threshold = 1e-8);

/// Periodic trapezoid quadrature (2L/N) * sum(values); spectrally exact.
double integrate(const RealField& f);

/// Apply a 2/3-rule dealiasing filter in place (off by default everywhere;
/// available for stress cases).
void dealias_two_thirds(SpectralCoeffs& c);

}  // namespace displab
