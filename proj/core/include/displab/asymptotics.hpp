#pragma once

#include <span>
#include <vector>

#include "displab/grid.hpp"
#include "displab/hopf.hpp"
#include "displab/models.hpp"
#include "displab/pi2.hpp"

namespace displab {

/// Scaling constants of the local description near the gradient
/// catastrophe: alpha^7 = 12 b1 / (a0' k^2), beta^7 = 12^3 k b1^3 / a0'^3,
/// gamma^7 = 12^2 k^3 b1^2 / a0'^9 (real positive roots).
struct MultiscaleConstants {
  double alpha, beta, gamma;
  double a0;    // a(u_c)
  double a0p;   // a'(u_c)
  double b10;   // b1(u_c)
  double k;
};

MultiscaleConstants multiscale_constants(const ModelSpec& m,
                                         const CriticalPoint& cp);

struct MultiscaleWindow {
  /// Largest scaled |X| that is trusted (the tabulated+asymptotic range).
  double x_arg_max = 50.0;
  /// Largest scaled |T| that is trusted.
  double t_arg_max = 2.0;
};

/// u_c + alpha eps^{2/7} U((x - x_c - a0 (t-t_c)) / (beta eps^{6/7});
///                         (t - t_c) / (gamma eps^{4/7})).
double multiscale_eval(double x, double t, double eps,
                       const MultiscaleConstants& mc, const CriticalPoint& cp,
                       const PI2Interpolator& tab,
                       const MultiscaleWindow& win = {});

/// Half-width of the trusted physical x-window around x_c + a0 (t - t_c).
double multiscale_window_halfwidth(double eps, const MultiscaleConstants& mc,
                                   const MultiscaleWindow& win = {});

// ---------------------------------------------------------------------------
// Quasitriviality
// ---------------------------------------------------------------------------

/// v -> v + eps^2 [ (c/2)(v_xxx/v_x - v_xx^2/v_x^2) + c' v_xx
///                  + (1/2) c'' v_x^2 ]  (spectral derivatives of v).
/// Throws NearCausticError when |v_x| dips below vx_floor on the grid.
RealField quasitriv_transform(const RealField& v, const SmoothFn& c,
                              double eps, double vx_floor = 1e-6);

/// Same pointwise formula from precomputed derivatives (v_x, v_xx, v_xxx).
double quasitriv_bracket(const SmoothFn& c, double v, double vx, double vxx,
                         double vxxx);

/// Order-eps^2 correction w of the transport solution with eps-corrected
/// initial data: w = -B(v) / (Phi'(v) + t a'(v)) where B collects the
/// Phi-derivative bracket of the data correction.  (The t = 0 limit
/// reproduces the corrected data exactly; see the tests.)
double quasitriv_w(const SmoothFn& a, const InitialData& data,
                   const SmoothFn& c, double x, double t, double v);

struct QuasitrivPoint {
  double v;        // transport background
  double w;        // order-eps^2 data correction
  double bracket;  // transform bracket at v
  double u;        // v + eps^2 w + eps^2 bracket
};

/// Full order-eps^4 accurate approximation on a set of points, built from
/// characteristic (closed-form) derivatives of the transport background.
std::vector<QuasitrivPoint> quasitriv_solution(
    const SmoothFn& a, const InitialData& data, const SmoothFn& c,
    std::span<const double> xs, double t, double eps, double vx_floor = 1e-6);

/// Corrected transport value v + eps^2 w at one point.
double corrected_hopf(const SmoothFn& a, const InitialData& data,
                      const SmoothFn& c, double x, double t, double eps);

/// Leading coefficient of the eps^4 defect of the transformed solution:
/// the degree-6 differential polynomial in v with coefficients built from
/// c, ..., c^(5), evaluated from the derivatives v_x..v_xxxxxx.
double discrepancy_leading_at(const SmoothFn& c, double v,
                              std::span<const double> v_derivs);

/// Same over a point set with characteristic derivatives of the transport
/// background.
std::vector<double> discrepancy_leading(const SmoothFn& a,
                                        const InitialData& data,
                                        const SmoothFn& c,
                                        std::span<const double> xs, double t,
                                        double vx_floor = 1e-6);

}  // namespace displab
