#include "displab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace displab {

namespace {

// FFTW plan creation is not thread safe; execution on distinct buffers is.
// Each thread keeps its own plans and work buffers per grid size, so
// concurrent workers never share mutable transform state.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftWorkspace {
 public:
  explicit FftWorkspace(int n) : n_(n) {
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~FftWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }

  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;

  void forward(std::span<const double> x, std::span<std::complex<double>> c) {
    for (int j = 0; j < n_; ++j) {
      in_[j][0] = x[j];
      in_[j][1] = 0.0;
    }
    fftw_execute(fwd_);
    for (int j = 0; j < n_; ++j) c[j] = {out_[j][0], out_[j][1]};
  }

  // Inverse carries the 1/N normalization and drops the imaginary part.
  void backward(std::span<const std::complex<double>> c,
                std::span<double> x) {
    for (int j = 0; j < n_; ++j) {
      in_[j][0] = c[j].real();
      in_[j][1] = c[j].imag();
    }
    fftw_execute(bwd_);
    const double scale = 1.0 / n_;
    for (int j = 0; j < n_; ++j) x[j] = out_[j][0] * scale;
  }

 private:
  int n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

FftWorkspace& workspace_for(int n) {
  thread_local std::map<int, std::unique_ptr<FftWorkspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftWorkspace>(n);
  return *slot;
}

}  // namespace

PeriodicGrid::PeriodicGrid(double half_width_, int size_)
    : half_width(half_width_), size(size_) {
  if (!(half_width > 0.0))
    throw ConstructionError("PeriodicGrid: half_width must be positive");
  if (size < 16 || size % 2 != 0)
    throw ConstructionError("PeriodicGrid: size must be even and >= 16");
}

double PeriodicGrid::wavenumber(int m) const {
  return std::numbers::pi / half_width * m;
}

std::vector<double> PeriodicGrid::nodes() const {
  std::vector<double> x(size);
  for (int j = 0; j < size; ++j) x[j] = node(j);
  return x;
}

RealField::RealField(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size)
    throw InvalidFieldError("RealField: length mismatch with grid");
}

RealField::RealField(PeriodicGrid grid)
    : grid_(grid), values_(grid.size, 0.0) {}

bool RealField::finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

double RealField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SpectralCoeffs::SpectralCoeffs(PeriodicGrid grid,
                               std::vector<std::complex<double>> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (static_cast<int>(coeffs_.size()) != grid_.size)
    throw InvalidFieldError("SpectralCoeffs: length mismatch with grid");
}

SpectralCoeffs::SpectralCoeffs(PeriodicGrid grid)
    : grid_(grid), coeffs_(grid.size, std::complex<double>{0.0, 0.0}) {}

std::complex<double> SpectralCoeffs::mode(int m) const {
  int n = grid_.size;
  int j = m >= 0 ? m : m + n;
  return coeffs_[j];
}

double SpectralCoeffs::max_abs() const {
  double m = 0.0;
  for (auto c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SpectralCoeffs to_spectral(const RealField& f) {
  if (!f.finite())
    throw InvalidFieldError("to_spectral: field has non-finite values");
  SpectralCoeffs c(f.grid());
  workspace_for(f.size()).forward(f.values(), c.coeffs());
  return c;
}

RealField to_physical(const SpectralCoeffs& c) {
  RealField f(c.grid());
  workspace_for(c.size()).backward(c.coeffs(), f.values());
  return f;
}

void derivative_inplace(SpectralCoeffs& c, int order) {
  if (order < 0 || order > 6)
    throw Error("derivative: order must be in [0, 6]");
  if (order == 0) return;
  const auto& g = c.grid();
  const int n = g.size;
  auto coeffs = c.coeffs();
  for (int j = 0; j < n; ++j) {
    int m = g.mode_of_slot(j);
    if (m == -n / 2 && order % 2 == 1) {
      coeffs[j] = 0.0;  // keep odd derivatives real
      continue;
    }
    std::complex<double> ik{0.0, g.wavenumber(m)};
    std::complex<double> mult{1.0, 0.0};
    for (int p = 0; p < order; ++p) mult *= ik;
    coeffs[j] *= mult;
  }
}

RealField derivative(const RealField& f, int order) {
  SpectralCoeffs c = to_spectral(f);
  derivative_inplace(c, order);
  return to_physical(c);
}

ResolutionReport resolution_ok(const SpectralCoeffs& c, double tail_fraction,
                               double threshold) {
  if (!(threshold > 0.0))
    throw Error("resolution_ok: threshold must be positive");
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw Error("resolution_ok: tail_fraction must be in (0,1)");
  const int n = c.size();
  const int half = n / 2;
  const int tail_start = static_cast<int>(std::ceil((1.0 - tail_fraction) * half));
  double overall = 0.0, tail = 0.0;
  for (int j = 0; j < n; ++j) {
    int m = c.grid().mode_of_slot(j);
    double mag = std::abs(c.coeffs()[j]);
    overall = std::max(overall, mag);
    if (std::abs(m) >= tail_start) tail = std::max(tail, mag);
  }
  if (overall == 0.0) return {true, 0.0};
  double rel = tail / overall;
  return {rel <= threshold, rel};
}

double integrate(const RealField& f) {
  // Fixed sequential reduction order with compensation, for reproducibility
  // and quadrature accuracy near round-off.
  double sum = 0.0, comp = 0.0;
  for (double v : f.values()) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum * f.grid().spacing();
}

void dealias_two_thirds(SpectralCoeffs& c) {
  const int n = c.size();
  auto coeffs = c.coeffs();
  for (int j = 0; j < n; ++j) {
    int m = c.grid().mode_of_slot(j);
    if (std::abs(m) > n / 3) coeffs[j] = 0.0;
  }
}

}  // namespace displab
