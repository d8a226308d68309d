#pragma once

#include <span>
#include <vector>

#include "displab/grid.hpp"

namespace displab {

/// Ordinary least-squares fit with the correlation coefficient and the
/// standard deviation of the slope; no bare slopes in reports.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;      // correlation coefficient
  double sigma = 0.0;  // standard deviation of the slope
  int n = 0;
};

/// OLS of log10(err) against log10(eps).  All values must be positive.
FitResult loglog_fit(std::span<const double> eps,
                     std::span<const double> err);

/// Plain linear OLS of y against x.
FitResult linear_fit(std::span<const double> x, std::span<const double> y);

/// max |f - g| over grid nodes with x in [x_lo, x_hi].
double windowed_sup_diff(const RealField& f, const RealField& g, double x_lo,
                         double x_hi);

/// Same on explicit point sets.
double windowed_sup_diff(std::span<const double> x, std::span<const double> f,
                         std::span<const double> g, double x_lo, double x_hi);

struct FourierDecayFit {
  double mu = 0.0;     // algebraic singularity exponent
  double delta = 0.0;  // width of the analyticity strip; -> 0 near blowup
  double log_amplitude = 0.0;
  double rms_residual = 0.0;      // in log10 units
  bool multi_singularity = false;  // oscillatory residuals
  int n = 0;
};

/// Fit log|v_k| ~ log C - (mu+1) log k - delta * k * log10(e) on positive
/// wavenumbers in [k_lo, k_hi].  The lowest 8 modes and coefficients below
/// 1e-13 are excluded from the fit.
FourierDecayFit fourier_decay_fit(const SpectralCoeffs& c, double k_lo,
                                  double k_hi);

/// True if the series is strictly increasing over its trailing `window`
/// entries (at least 2 points needed).
bool monotone_tail_growth(std::span<const double> values, int window);

}  // namespace displab
