#include "displab/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "displab/errors.hpp"

namespace displab {

InitialData sech2_data() {
  InitialData d;
  d.phi = SmoothFn([](const Jet& x) {
    Jet ch = cosh(x);
    return 1.0 / (ch * ch);
  });
  // Decreasing branch (x > 0): Phi(u) = ln(1 + sqrt(1-u)) - ln(u)/2.
  SmoothFn phi_dec([](const Jet& u) {
    return log(1.0 + sqrt(1.0 - u)) - 0.5 * log(u);
  });
  // Increasing branch (x < 0) is its mirror image.
  SmoothFn phi_inc([](const Jet& u) {
    return -(log(1.0 + sqrt(1.0 - u)) - 0.5 * log(u));
  });
  d.branches.push_back({phi_dec, 0.0, 1.0, 0.0, 40.0, true});
  d.branches.push_back({phi_inc, 0.0, 1.0, -40.0, 0.0, false});
  d.breakup_branch = 0;
  return d;
}

namespace {

// Characteristic foot equation G(xi) = xi + t a(phi(xi)) - x.
double char_eq(const SmoothFn& a, const InitialData& d, double x, double t,
               double xi) {
  return xi + t * a(d.phi(xi)) - x;
}

// Fold scan: x(xi) = xi + t a(phi(xi)) loses monotonicity past breakup;
// if the requested x lies strictly between a local maximum and a local
// minimum of x(xi), several characteristics arrive there.
void throw_if_in_fold(const SmoothFn& a, const InitialData& d, double x,
                      double t, double lo, double hi) {
  constexpr int kScan = 1200;
  double x_top = -std::numeric_limits<double>::infinity();
  double x_bot = std::numeric_limits<double>::infinity();
  double xi_top = 0.0, xi_bot = 0.0;
  double prev_xi = lo;
  double prev_val = char_eq(a, d, x, t, lo) + x;
  bool rising = true;
  for (int i = 1; i <= kScan; ++i) {
    double xi = lo + (hi - lo) * i / kScan;
    double val = char_eq(a, d, x, t, xi) + x;
    if (rising && val < prev_val) {
      if (prev_val > x_top) {
        x_top = prev_val;
        xi_top = prev_xi;
      }
      rising = false;
    } else if (!rising && val > prev_val) {
      if (prev_val < x_bot) {
        x_bot = prev_val;
        xi_bot = prev_xi;
      }
      rising = true;
    }
    prev_xi = xi;
    prev_val = val;
  }
  if (x_top > x_bot && x > x_bot && x < x_top)
    throw MultivaluedRegionError(
        "hopf_solve: multivalued past the gradient catastrophe",
        std::min(xi_top, xi_bot), std::max(xi_top, xi_bot));
}

}  // namespace

double hopf_solve(const SmoothFn& a, const InitialData& data, double x,
                  double t, const HopfOptions& opt) {
  if (t == 0.0) return data.phi(x);

  const double w = opt.xi_scan_halfwidth;
  const double lo_scan = x - w, hi_scan = x + w;
  if (opt.check_multivalued)
    throw_if_in_fold(a, data, x, t, lo_scan, hi_scan);

  // Fixed-point sweep u <- phi(x - t a(u)) while it contracts.
  double u = data.phi(x);
  for (int it = 0; it < opt.max_iter; ++it) {
    double xi = x - t * a(u);
    double un = data.phi(xi);
    double contraction =
        std::abs(t * a.deriv(un, 1) * data.phi.deriv(xi, 1));
    if (contraction >= 0.9) break;
    double du = un - u;
    u = un;
    if (std::abs(du) <= opt.tol * std::max(1.0, std::abs(u))) {
      return u;
    }
  }

  // Newton on the characteristic foot with a bisection bracket: G is
  // monotone pre-breakup, and G -> +-inf as xi -> +-inf.
  if (!opt.check_multivalued)
    throw_if_in_fold(a, data, x, t, lo_scan, hi_scan);
  constexpr int kScan = 600;
  double lo = lo_scan, hi = hi_scan;
  double glo = char_eq(a, data, x, t, lo);
  double ghi = char_eq(a, data, x, t, hi);
  if (glo > 0.0 || ghi < 0.0)
    throw Error("hopf_solve: characteristic scan window too narrow");

  double prev_xi = lo, prev_g = glo;
  double root_lo = lo, root_hi = hi;
  for (int i = 1; i <= kScan; ++i) {
    double xi = lo + (hi - lo) * i / kScan;
    double g = char_eq(a, data, x, t, xi);
    if (prev_g <= 0.0 && g > 0.0) {
      root_lo = prev_xi;
      root_hi = xi;
      break;
    }
    prev_xi = xi;
    prev_g = g;
  }

  // Safeguarded Newton in xi.
  double xi = 0.5 * (root_lo + root_hi);
  for (int it = 0; it < opt.max_iter; ++it) {
    double phi_xi = data.phi(xi);
    double g = xi + t * a(phi_xi) - x;
    if (g > 0.0)
      root_hi = xi;
    else
      root_lo = xi;
    double gp = 1.0 + t * a.deriv(phi_xi, 1) * data.phi.deriv(xi, 1);
    double step = gp != 0.0 ? -g / gp : 0.0;
    double xin = xi + step;
    if (!(xin > root_lo && xin < root_hi) || gp == 0.0)
      xin = 0.5 * (root_lo + root_hi);
    double dxi = std::abs(xin - xi);
    xi = xin;
    if (dxi <= opt.tol * std::max(1.0, std::abs(xi)) ||
        root_hi - root_lo <= opt.tol)
      return data.phi(xi);
  }
  return data.phi(xi);
}

RealField hopf_solve_grid(const SmoothFn& a, const InitialData& data,
                          const PeriodicGrid& grid, double t,
                          const HopfOptions& opt) {
  RealField out(grid);
  for (int j = 0; j < grid.size; ++j)
    out[j] = hopf_solve(a, data, grid.node(j), t, opt);
  return out;
}

std::vector<double> hopf_solve_points(const SmoothFn& a,
                                      const InitialData& data,
                                      std::span<const double> xs, double t,
                                      const HopfOptions& opt) {
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i)
    out[i] = hopf_solve(a, data, xs[i], t, opt);
  return out;
}

namespace {

// Series reversion: given y(v0 + s) = y0 + c1 s + c2 s^2 + ..., build the
// coefficients d of the inverse v(y0 + r) = v0 + d1 r + d2 r^2 + ....
// Coefficient k of y(v(r)) - r must vanish; only d_1..d_{k-1} enter the
// j >= 2 powers, so the d's resolve triangularly.
std::vector<double> revert_series(std::span<const double> c, int order) {
  std::vector<double> d(order + 1, 0.0);
  d[1] = 1.0 / c[1];
  for (int k = 2; k <= order; ++k) {
    std::vector<double> vs(k + 1, 0.0);
    for (int m = 1; m < k; ++m) vs[m] = d[m];
    std::vector<double> cur = vs;  // running power v^j, truncated at r^k
    double acc = 0.0;
    for (int j = 2; j <= k; ++j) {
      std::vector<double> nxt(k + 1, 0.0);
      for (int m1 = j - 1; m1 <= k; ++m1) {
        if (cur[m1] == 0.0) continue;
        for (int m2 = 1; m1 + m2 <= k; ++m2) nxt[m1 + m2] += cur[m1] * vs[m2];
      }
      cur = nxt;
      acc += c[j] * cur[k];
    }
    d[k] = -acc / c[1];
  }
  return d;
}

}  // namespace

std::vector<double> hopf_derivatives_n(const SmoothFn& a,
                                       const InitialData& data, double x,
                                       double t, int max_order,
                                       const HopfOptions& opt) {
  if (max_order < 1 || max_order > 6)
    throw Error("hopf_derivatives_n: order must be in [1, 6]");
  double u = hopf_solve(a, data, x, t, opt);

  // x(v) = t a(v) + Phi(v) on the active branch; its v-derivatives come
  // from jets and the inverse-function derivatives from series reversion.
  const InverseBranch* br = nullptr;
  for (const auto& b : data.branches) {
    double xi = x - t * a(u);
    if (xi >= b.x_lo && xi <= b.x_hi) {
      br = &b;
      break;
    }
  }
  if (br == nullptr) throw Error("hopf_derivatives_n: no branch covers x");

  Jet uv = Jet::variable(u, max_order + 1);
  Jet xv = t * a(uv) + br->Phi(uv);
  const double denom = xv.deriv(1);
  if (std::abs(denom) < opt.caustic_floor)
    throw NearCausticError(
        "hopf_derivatives_n: t a' + Phi' vanishes (caustic) at x = " +
        std::to_string(x));

  std::vector<double> c(max_order + 1);
  for (int m = 0; m <= max_order; ++m) c[m] = xv.coeff(m);
  std::vector<double> d = revert_series(c, max_order);

  std::vector<double> out(max_order + 1);
  out[0] = u;
  double fact = 1.0;
  for (int m = 1; m <= max_order; ++m) {
    fact *= m;
    out[m] = fact * d[m];
  }
  return out;
}

HopfDerivs hopf_derivatives(const SmoothFn& a, const InitialData& data,
                            double x, double t, const HopfOptions& opt) {
  auto v = hopf_derivatives_n(a, data, x, t, 3, opt);
  return {v[0], v[1], v[2], v[3]};
}

// ---------------------------------------------------------------------------
// Critical point
// ---------------------------------------------------------------------------

CriticalPoint critical_point(const SmoothFn& a, const InitialData& data) {
  const InverseBranch& br = data.branches.at(data.breakup_branch);

  // Eliminate t from the first derivative equation and scan for a sign
  // change of S(u) = Phi''(u) - a''(u) Phi'(u) / a'(u).
  auto S = [&](double u) {
    double a1 = a.deriv(u, 1), a2 = a.deriv(u, 2);
    double p1 = br.Phi.deriv(u, 1), p2 = br.Phi.deriv(u, 2);
    return p2 - a2 * p1 / a1;
  };
  const double pad = 1e-6 * (br.u_hi - br.u_lo);
  const double lo = br.u_lo + pad, hi = br.u_hi - pad;
  constexpr int kScan = 400;
  double u_guess = std::numeric_limits<double>::quiet_NaN();
  double prev_u = lo, prev_s = S(lo);
  for (int i = 1; i <= kScan; ++i) {
    double u = lo + (hi - lo) * i / kScan;
    double s = S(u);
    if (std::isfinite(prev_s) && std::isfinite(s) && prev_s * s <= 0.0) {
      u_guess = 0.5 * (prev_u + u);
      break;
    }
    prev_u = u;
    prev_s = s;
  }
  if (!std::isfinite(u_guess))
    throw NonconvergenceError(
        "critical_point: no sign change of the compatibility function on "
        "the breakup branch",
        {});

  // Newton on F(u, t) = (a' t + Phi', a'' t + Phi'').
  double u = u_guess;
  double tt = -br.Phi.deriv(u, 1) / a.deriv(u, 1);
  std::vector<double> hist;
  bool ok = false;
  for (int it = 0; it < 100; ++it) {
    double a1 = a.deriv(u, 1), a2 = a.deriv(u, 2), a3 = a.deriv(u, 3);
    double p1 = br.Phi.deriv(u, 1), p2 = br.Phi.deriv(u, 2),
           p3 = br.Phi.deriv(u, 3);
    double f1 = a1 * tt + p1;
    double f2 = a2 * tt + p2;
    hist.push_back(std::max(std::abs(f1), std::abs(f2)));
    if (hist.back() < 1e-13 * std::max(1.0, std::abs(p2))) {
      ok = true;
      break;
    }
    // Jacobian [[d f1/du, d f1/dt], [d f2/du, d f2/dt]]
    double j11 = a2 * tt + p2, j12 = a1;
    double j21 = a3 * tt + p3, j22 = a2;
    double det = j11 * j22 - j12 * j21;
    if (det == 0.0) break;
    double du = (-f1 * j22 + f2 * j12) / det;
    double dt = (-f2 * j11 + f1 * j21) / det;
    u += du;
    tt += dt;
    u = std::clamp(u, lo, hi);
    if (!(tt > 0.0)) tt = std::abs(tt);
  }
  if (!ok)
    throw NonconvergenceError("critical_point: Newton did not converge",
                              hist);

  CriticalPoint cp;
  cp.u = u;
  cp.t = tt;
  cp.x = a(u) * tt + br.Phi(u);
  cp.k = -(a.deriv(u, 3) * tt + br.Phi.deriv(u, 3)) / 6.0;
  if (cp.k == 0.0)
    throw GenericityError("critical_point: breakup strength k vanishes");
  if (a.deriv(u, 1) * cp.k <= 0.0)
    throw GenericityError("critical_point: a'(u_c) k must be positive");
  return cp;
}

CriticalPoint gen_kdv_critical_closed_form(int n) {
  CriticalPoint cp;
  double nn = n;
  cp.u = 2.0 * nn / (2.0 * nn + 1.0);
  cp.t = std::pow(2.0 * nn + 1.0, nn + 0.5) /
         (6.0 * std::pow(2.0 * nn, nn + 1.0));
  cp.x = std::sqrt(2.0 * nn + 1.0) / (2.0 * nn) +
         std::log((std::sqrt(2.0 * nn + 1.0) + 1.0) / std::sqrt(2.0 * nn));
  cp.k = std::pow(2.0 * nn + 1.0, 4.5) / (96.0 * nn * nn);
  return cp;
}

}  // namespace displab
