#include "displab/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "displab/errors.hpp"

namespace displab {

FitResult linear_fit(std::span<const double> x, std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  if (n < 3 || y.size() != x.size())
    throw Error("linear_fit: need at least 3 matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw Error("linear_fit: degenerate abscissae");
  FitResult f;
  f.n = n;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += d * d;
  }
  const double varx = sxx - sx * sx / n;
  const double vary = syy - sy * sy / n;
  f.r = (varx > 0 && vary > 0)
            ? (sxy - sx * sy / n) / std::sqrt(varx * vary)
            : 0.0;
  f.sigma = (n > 2 && varx > 0) ? std::sqrt(ss_res / (n - 2) / varx) : 0.0;
  return f;
}

FitResult loglog_fit(std::span<const double> eps,
                     std::span<const double> err) {
  if (eps.size() != err.size())
    throw Error("loglog_fit: size mismatch");
  std::vector<double> lx(eps.size()), ly(err.size());
  for (size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0))
      throw Error("loglog_fit: nonpositive value at point " +
                  std::to_string(i));
    lx[i] = std::log10(eps[i]);
    ly[i] = std::log10(err[i]);
  }
  return linear_fit(lx, ly);
}

double windowed_sup_diff(const RealField& f, const RealField& g, double x_lo,
                         double x_hi) {
  if (!(f.grid() == g.grid()))
    throw Error("windowed_sup_diff: fields live on different grids");
  if (!(x_lo < x_hi)) throw Error("windowed_sup_diff: empty window");
  double m = -1.0;
  for (int j = 0; j < f.size(); ++j) {
    double x = f.grid().node(j);
    if (x < x_lo || x > x_hi) continue;
    m = std::max(m, std::abs(f[j] - g[j]));
  }
  if (m < 0.0) throw Error("windowed_sup_diff: window contains no node");
  return m;
}

double windowed_sup_diff(std::span<const double> x, std::span<const double> f,
                         std::span<const double> g, double x_lo, double x_hi) {
  if (x.size() != f.size() || x.size() != g.size())
    throw Error("windowed_sup_diff: size mismatch");
  if (!(x_lo < x_hi)) throw Error("windowed_sup_diff: empty window");
  double m = -1.0;
  for (size_t j = 0; j < x.size(); ++j) {
    if (x[j] < x_lo || x[j] > x_hi) continue;
    m = std::max(m, std::abs(f[j] - g[j]));
  }
  if (m < 0.0) throw Error("windowed_sup_diff: window contains no point");
  return m;
}

FourierDecayFit fourier_decay_fit(const SpectralCoeffs& c, double k_lo,
                                  double k_hi) {
  // Design matrix columns: 1, -log10(k), -k; unknowns logC, mu+1, delta'.
  // delta' absorbs log10(e) so that |v_k| ~ C k^-(mu+1) exp(-delta k).
  std::vector<double> ks, logmag;
  const int n = c.size();
  for (int j = 0; j < n; ++j) {
    int m = c.grid().mode_of_slot(j);
    if (m < 8) continue;  // skip the non-asymptotic lowest modes
    double k = c.grid().wavenumber(m);
    if (k < k_lo || k > k_hi) continue;
    double mag = std::abs(c.coeffs()[j]);
    if (mag <= 1e-13) continue;
    ks.push_back(k);
    logmag.push_back(std::log10(mag));
  }
  if (ks.size() < 8)
    throw Error("fourier_decay_fit: too few usable modes in range");

  // Normal equations for the 3-parameter least squares.
  std::array<std::array<double, 3>, 3> A{};
  std::array<double, 3> b{};
  auto row = [](double k) {
    return std::array<double, 3>{1.0, -std::log10(k), -k};
  };
  for (size_t i = 0; i < ks.size(); ++i) {
    auto ri = row(ks[i]);
    for (int a = 0; a < 3; ++a) {
      b[a] += ri[a] * logmag[i];
      for (int bb = 0; bb < 3; ++bb) A[a][bb] += ri[a] * ri[bb];
    }
  }
  // Gaussian elimination with partial pivoting on the 3x3 system.
  std::array<std::array<double, 4>, 3> M{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) M[i][j] = A[i][j];
    M[i][3] = b[i];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r2 = col + 1; r2 < 3; ++r2)
      if (std::abs(M[r2][col]) > std::abs(M[piv][col])) piv = r2;
    std::swap(M[col], M[piv]);
    if (M[col][col] == 0.0)
      throw Error("fourier_decay_fit: singular normal equations");
    for (int r2 = 0; r2 < 3; ++r2) {
      if (r2 == col) continue;
      double f = M[r2][col] / M[col][col];
      for (int j = col; j < 4; ++j) M[r2][j] -= f * M[col][j];
    }
  }
  const double logC = M[0][3] / M[0][0];
  const double mu_plus_1 = M[1][3] / M[1][1];
  const double delta_log10 = M[2][3] / M[2][2];

  FourierDecayFit out;
  out.n = static_cast<int>(ks.size());
  out.log_amplitude = logC;
  out.mu = mu_plus_1 - 1.0;
  out.delta = delta_log10 * std::numbers::ln10;

  // Residual scan: oscillatory residuals signal several complex
  // singularities at comparable distance.
  double ss = 0.0;
  int sign_changes = 0;
  double prev = 0.0;
  for (size_t i = 0; i < ks.size(); ++i) {
    double fit = logC - mu_plus_1 * std::log10(ks[i]) - delta_log10 * ks[i];
    double res = logmag[i] - fit;
    ss += res * res;
    if (i > 0 && res * prev < 0.0) ++sign_changes;
    prev = res;
  }
  out.rms_residual = std::sqrt(ss / ks.size());
  out.multi_singularity =
      out.rms_residual > 0.25 && sign_changes > static_cast<int>(ks.size()) / 8;
  return out;
}

bool monotone_tail_growth(std::span<const double> values, int window) {
  const int n = static_cast<int>(values.size());
  if (window < 2 || n < window) return false;
  for (int i = n - window + 1; i < n; ++i)
    if (!(values[i] > values[i - 1])) return false;
  return true;
}

}  // namespace displab
