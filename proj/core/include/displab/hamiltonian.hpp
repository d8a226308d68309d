#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "displab/diagnostics.hpp"
#include "displab/grid.hpp"
#include "displab/smooth_fn.hpp"

namespace displab {

/// One monomial of a Hamiltonian density:
///   eps^eps_pow * w(u) * u_x^px * u_xx^pxx * u_xxx^pxxx.
struct DensityTerm {
  SmoothFn w;
  int eps_pow = 0;
  int px = 0;
  int pxx = 0;
  int pxxx = 0;
};

/// Density h(u, u_x, u_xx, u_xxx; eps) of a local functional H = int h dx,
/// with analytic partial derivatives assembled from the term list.
class HamiltonianDensity {
 public:
  HamiltonianDensity() = default;
  HamiltonianDensity(std::vector<DensityTerm> terms, std::string tag);

  double eval(double u, double ux, double uxx, double uxxx,
              double eps) const;
  double d_u(double u, double ux, double uxx, double uxxx, double eps) const;
  double d_ux(double u, double ux, double uxx, double uxxx, double eps) const;
  double d_uxx(double u, double ux, double uxx, double uxxx,
               double eps) const;
  double d_uxxx(double u, double ux, double uxx, double uxxx,
                double eps) const;

  const std::vector<DensityTerm>& terms() const { return terms_; }
  const std::string& tag() const { return tag_; }
  /// Highest jet variable actually referenced (2 or 3).
  int max_jet() const { return max_jet_; }

 private:
  std::vector<DensityTerm> terms_;
  std::string tag_;
  int max_jet_ = 2;
};

/// Variational derivative dH/du(x) = h_u - d_x h_{u_x} + d_x^2 h_{u_xx}
///                                   - d_x^3 h_{u_xxx},
/// with all x-derivatives spectral.
RealField euler_lagrange(const HamiltonianDensity& h, const RealField& u,
                         double eps);

/// H[u] = int h dx by periodic trapezoid quadrature.
double functional_value(const HamiltonianDensity& h, const RealField& u,
                        double eps);

/// {H, F} = int (dH/du) d_x (dF/du) dx on the periodic grid.
double poisson_bracket(const HamiltonianDensity& h_H,
                       const HamiltonianDensity& h_F, const RealField& u,
                       double eps);

// ---------------------------------------------------------------------------
// Hamiltonian-form constraints on the conservation-law coefficients
// ---------------------------------------------------------------------------

struct CoefficientRelation {
  std::string name;
  double max_violation = 0.0;
};

struct CoefficientReport {
  std::vector<CoefficientRelation> relations;
  bool all_pass(double tol = 1e-10) const;
  double worst() const;
};

/// Check the seven constraints (b0 = 0, b2 = b1'/2, b3 = 0, b5 = b4'/3,
/// b7 = 2 b6', b8 = (3/2) b6', b10 = b9'/4) pointwise on the samples.
/// b[i] may be invalid() to mean identically zero.
CoefficientReport check_coefficients(const std::array<SmoothFn, 11>& b,
                                     std::span<const double> u_samples);

// ---------------------------------------------------------------------------
// Commuting family and its order-6 extension
// ---------------------------------------------------------------------------

/// The order-eps^4 commuting density generated by f for invariants (c, p):
///   f - (eps^2/2) c f''' u_x^2
///     + eps^4 [ (p f''' + (3/10) c^2 f'''') u_xx^2
///               - (1/6)((3 c c'' f'''' + 3 c c' f^(5) + c^2 f^(6))/4
///                        + p' f'''' + p f^(5)) u_x^4 ].
HamiltonianDensity hf_density(const SmoothFn& f, const SmoothFn& c,
                              const SmoothFn& p,
                              const std::string& tag = "h_f");

struct ScalingFit {
  FitResult fit;
  std::vector<double> eps;
  std::vector<double> bracket_abs;
  bool indistinguishable_from_zero = false;
};

/// |{H_f, H_g}| across eps_list with a log-log fit of the decay exponent.
/// Brackets below 1e-14 at the largest eps yield the zero report instead.
ScalingFit bracket_scaling(const HamiltonianDensity& h_f,
                           const HamiltonianDensity& h_g,
                           std::span<const double> eps_list,
                           const RealField& u_test);

/// Order-6 extension data: alpha(u) is forced by (c, p), beta(u) is free.
class Order6Extension {
 public:
  Order6Extension(SmoothFn c, SmoothFn p, SmoothFn beta);

  const SmoothFn& alpha() const { return alpha_; }

  /// Density of the extended Hamiltonian for generator f: the order-4 part
  /// plus -eps^6 [alpha_f u_xxx^2 + beta_f u_xx^3 + gamma_f u_xx^2 u_x^2
  ///              + delta_f u_x^6].
  HamiltonianDensity commuting_density(const SmoothFn& f,
                                       const std::string& tag = "h_f6") const;

 private:
  SmoothFn c_, p_, beta_, alpha_;
};

/// Builds the extension after verifying c does not vanish on [u_lo, u_hi];
/// throws ObstructionError otherwise (the c = 0 family stops at order 7).
Order6Extension order6_extension(const SmoothFn& c, const SmoothFn& p,
                                 const SmoothFn& beta_choice, double u_lo,
                                 double u_hi);

}  // namespace displab
