#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "displab/grid.hpp"
#include "displab/smooth_fn.hpp"

namespace displab {

/// One monotone branch of the inverse initial data: u -> Phi(u) with x in
/// [x_lo, x_hi] and u in [u_lo, u_hi].
struct InverseBranch {
  SmoothFn Phi;
  double u_lo, u_hi;
  double x_lo, x_hi;
  bool decreasing;  // phi decreasing on this x-interval
};

/// Initial profile phi(x) together with its inverse branches.
struct InitialData {
  SmoothFn phi;
  std::vector<InverseBranch> branches;
  int breakup_branch = 0;  // branch carrying the steepening inflection
};

/// The paper-standard profile phi(x) = sech^2 x on its two branches,
/// Phi(u) = ln((1 +- sqrt(1-u))/sqrt(u)).
InitialData sech2_data();

struct HopfOptions {
  double tol = 1e-14;
  int max_iter = 200;
  /// Half-width of the xi-scan used for bracketing and multivalued
  /// detection.
  double xi_scan_halfwidth = 30.0;
  /// Guard on |t a' + Phi'| in derivative evaluations.
  double caustic_floor = 1e-13;
  /// Run the fold scan before accepting a fast fixed-point answer (the
  /// slow path always runs it).
  bool check_multivalued = false;
};

/// Solve u = phi(x - t a(u)) for scalar (x, t); pre-breakup the solution is
/// unique.  Fixed-point iteration with Newton fallback.  Past breakup,
/// inside the fold of the characteristic map, a MultivaluedRegionError
/// carries the xi-interval spanned by the crossed characteristics (the
/// fast path can still return one branch unless check_multivalued is set).
double hopf_solve(const SmoothFn& a, const InitialData& data, double x,
                  double t, const HopfOptions& opt = {});

/// Vectorized solve over grid nodes (warm-started along the grid).
RealField hopf_solve_grid(const SmoothFn& a, const InitialData& data,
                          const PeriodicGrid& grid, double t,
                          const HopfOptions& opt = {});

std::vector<double> hopf_solve_points(const SmoothFn& a,
                                      const InitialData& data,
                                      std::span<const double> xs, double t,
                                      const HopfOptions& opt = {});

/// u and d^m u/dx^m for m = 1..max_order (<= 6), from the closed-form
/// implicit differentiation of x = t a(u) + Phi(u) on the solution branch.
/// Index 0 of the result is u itself.
std::vector<double> hopf_derivatives_n(const SmoothFn& a,
                                       const InitialData& data, double x,
                                       double t, int max_order,
                                       const HopfOptions& opt = {});

struct HopfDerivs {
  double u, ux, uxx, uxxx;
};

HopfDerivs hopf_derivatives(const SmoothFn& a, const InitialData& data,
                            double x, double t, const HopfOptions& opt = {});

/// Point of gradient catastrophe of the dispersionless solution.
struct CriticalPoint {
  double x;  // x_c
  double t;  // t_c
  double u;  // u_c
  double k;  // breakup strength
};

/// Solve a'(u)t + Phi'(u) = 0, a''(u)t + Phi''(u) = 0 by a scan+Newton on
/// the breakup branch and back-substitute x_c; k = -(a''' t + Phi''')/6.
CriticalPoint critical_point(const SmoothFn& a, const InitialData& data);

/// Closed-form critical values for a(u) = 6 u^n with sech^2 data.
CriticalPoint gen_kdv_critical_closed_form(int n);

}  // namespace displab
