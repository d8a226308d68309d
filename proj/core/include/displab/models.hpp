#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "displab/grid.hpp"
#include "displab/hamiltonian.hpp"
#include "displab/smooth_fn.hpp"

namespace displab {

enum class ModelKind { GenKdV, Kawahara, NonlinearDispersion, KdV2Family };

/// One dispersive PDE instance u_t + d_x{flux} = 0: transport speed a(u),
/// invariants c(u) and p(u), the constant-coefficient stiff symbol for
/// exponential integrators, and the Hamiltonian density that generates the
/// right-hand side.
struct ModelSpec {
  ModelKind kind;
  std::string name;  // also the propagator cache key

  SmoothFn a;               // transport speed
  SmoothFn flux_antideriv;  // A with A' = a
  SmoothFn c, p;            // canonical invariants
  SmoothFn b1;              // c * a', coefficient of eps^2 u_xx inside d_x

  /// Growth rate of the eps-scaled constant-coefficient stiff part, as a
  /// function of wavenumber k: u_hat' = linear_symbol(k, eps) u_hat + N.
  std::function<std::complex<double>(double k, double eps)> linear_symbol;
  bool has_linear_part = false;

  /// Density h with u_t + d_x dH/du = 0 for this model's actual flux.
  HamiltonianDensity density;
  /// The monitored energy is energy_sign * int h dx (the generalized KdV
  /// literature reports the opposite sign).
  double energy_sign = 1.0;

  // Kind-specific parameters, kept for reporting.
  int gen_kdv_n = 0;
  double kaw_alpha = 0.0, kaw_beta = 0.0;
  double kdv2_alpha = 0.0;
};

ModelSpec make_gen_kdv(int n);
ModelSpec make_kawahara(double alpha, double beta);
/// u_t + u u_x + dispersive terms generated by the invariants c(u), p(u);
/// the stiff part is fully nonlinear (zero symbol).  First and second
/// derivatives of c and first/second of p are taken from the SmoothFns.
ModelSpec make_nonlinear_dispersion(SmoothFn c, SmoothFn p,
                                    const std::string& label);
ModelSpec make_kdv2(double alpha);

struct RhsOptions {
  bool check_resolution = true;
  double warn_threshold = 1e-8;
};

struct RhsResult {
  RealField dudt;
  bool resolution_warning = false;
  double tail_max = 0.0;
};

/// du/dt = -d_x{flux} with spectral spatial derivatives (monolithic
/// assembly; the linear + nonlinear split below must agree to round-off).
RhsResult rhs(const ModelSpec& m, const RealField& u, double eps,
              const RhsOptions& opt = {});

/// Nonlinear remainder: rhs minus the constant-coefficient stiff part,
/// assembled directly from the non-stiff flux terms.
RealField rhs_nonlinear(const ModelSpec& m, const RealField& u, double eps);
void rhs_nonlinear_spectral(const ModelSpec& m, const SpectralCoeffs& u_hat,
                            double eps, SpectralCoeffs& out);

struct InvariantSample {
  double u, c, p;
};

/// Tabulate (u, c(u), p(u)); raises SingularInvariantError where a'(u) = 0.
std::vector<InvariantSample> invariants_cp(const ModelSpec& m,
                                           std::span<const double> u_samples);

}  // namespace displab
