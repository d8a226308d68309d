#include "displab/asymptotics.hpp"

#include <cmath>

#include "displab/errors.hpp"

namespace displab {

MultiscaleConstants multiscale_constants(const ModelSpec& m,
                                         const CriticalPoint& cp) {
  MultiscaleConstants mc{};
  mc.a0 = m.a(cp.u);
  mc.a0p = m.a.deriv(cp.u, 1);
  mc.b10 = m.b1(cp.u);
  mc.k = cp.k;
  if (mc.b10 == 0.0)
    throw DegenerateDispersionError(
        "multiscale_constants: b1(u_c) = 0, no leading dispersive scale");
  if (!(mc.a0p * mc.k > 0.0))
    throw GenericityError("multiscale_constants: a'(u_c) k must be positive");

  const double k2 = mc.k * mc.k;
  mc.alpha = std::pow(12.0 * mc.b10 / (mc.a0p * k2), 1.0 / 7.0);
  mc.beta = std::pow(1728.0 * mc.k * mc.b10 * mc.b10 * mc.b10 /
                         (mc.a0p * mc.a0p * mc.a0p),
                     1.0 / 7.0);
  mc.gamma = std::pow(
      144.0 * mc.k * k2 * mc.b10 * mc.b10 / std::pow(mc.a0p, 9.0),
      1.0 / 7.0);
  return mc;
}

double multiscale_window_halfwidth(double eps, const MultiscaleConstants& mc,
                                   const MultiscaleWindow& win) {
  return win.x_arg_max * mc.beta * std::pow(eps, 6.0 / 7.0);
}

double multiscale_eval(double x, double t, double eps,
                       const MultiscaleConstants& mc, const CriticalPoint& cp,
                       const PI2Interpolator& tab,
                       const MultiscaleWindow& win) {
  const double e27 = std::pow(eps, 2.0 / 7.0);
  const double e47 = e27 * e27;
  const double e67 = e47 * e27;
  const double X = (x - cp.x - mc.a0 * (t - cp.t)) / (mc.beta * e67);
  const double T = (t - cp.t) / (mc.gamma * e47);
  if (std::abs(X) > win.x_arg_max)
    throw OutOfWindowError("multiscale_eval: scaled X argument " +
                           std::to_string(X) + " outside trust window");
  if (std::abs(T) > win.t_arg_max)
    throw OutOfWindowError("multiscale_eval: scaled T argument " +
                           std::to_string(T) + " outside trust window");
  return cp.u + mc.alpha * e27 * tab.eval(X, T);
}

// ---------------------------------------------------------------------------
// Quasitriviality
// ---------------------------------------------------------------------------

double quasitriv_bracket(const SmoothFn& c, double v, double vx, double vxx,
                         double vxxx) {
  Jet cj = c(Jet::variable(v, 2));
  const double c0 = cj.deriv(0), c1 = cj.deriv(1), c2 = cj.deriv(2);
  return 0.5 * c0 * (vxxx / vx - vxx * vxx / (vx * vx)) + c1 * vxx +
         0.5 * c2 * vx * vx;
}

RealField quasitriv_transform(const RealField& v, const SmoothFn& c,
                              double eps, double vx_floor) {
  RealField vx = derivative(v, 1);
  RealField vxx = derivative(v, 2);
  RealField vxxx = derivative(v, 3);
  for (int j = 0; j < v.size(); ++j)
    if (std::abs(vx[j]) < vx_floor)
      throw NearCausticError(
          "quasitriv_transform: |v_x| below floor at node x = " +
          std::to_string(v.grid().node(j)));
  RealField out(v.grid());
  const double e2 = eps * eps;
  for (int j = 0; j < v.size(); ++j)
    out[j] = v[j] + e2 * quasitriv_bracket(c, v[j], vx[j], vxx[j], vxxx[j]);
  return out;
}

namespace {

// Phi-derivative bracket of the data correction, evaluated at u on the
// branch containing the characteristic foot:
//   psi(u) = (c/2)(2 Phi''^2 - Phi' Phi''')/Phi'^3 - c' Phi''/Phi'^2
//            + c''/(2 Phi').
double psi_of(const SmoothFn& c, const InverseBranch& br, double u) {
  Jet cj = c(Jet::variable(u, 2));
  Jet pj = br.Phi(Jet::variable(u, 3));
  const double c0 = cj.deriv(0), c1 = cj.deriv(1), c2 = cj.deriv(2);
  const double p1 = pj.deriv(1), p2 = pj.deriv(2), p3 = pj.deriv(3);
  return 0.5 * c0 * (2.0 * p2 * p2 - p1 * p3) / (p1 * p1 * p1) -
         c1 * p2 / (p1 * p1) + 0.5 * c2 / p1;
}

const InverseBranch& branch_for(const SmoothFn& a, const InitialData& data,
                                double x, double t, double u) {
  const double xi = x - t * a(u);
  for (const auto& b : data.branches)
    if (xi >= b.x_lo && xi <= b.x_hi) return b;
  throw Error("quasitriviality: no inverse branch covers the foot point");
}

}  // namespace

double quasitriv_w(const SmoothFn& a, const InitialData& data,
                   const SmoothFn& c, double x, double t, double v) {
  const InverseBranch& br = branch_for(a, data, x, t, v);
  const double denom = br.Phi.deriv(v, 1) + t * a.deriv(v, 1);
  if (std::abs(denom) < 1e-10)
    throw NearCausticError("quasitriv_w: Phi' + t a' vanishes at x = " +
                           std::to_string(x));
  return -psi_of(c, br, v) / denom;
}

double corrected_hopf(const SmoothFn& a, const InitialData& data,
                      const SmoothFn& c, double x, double t, double eps) {
  const double v = hopf_solve(a, data, x, t);
  return v + eps * eps * quasitriv_w(a, data, c, x, t, v);
}

std::vector<QuasitrivPoint> quasitriv_solution(
    const SmoothFn& a, const InitialData& data, const SmoothFn& c,
    std::span<const double> xs, double t, double eps, double vx_floor) {
  std::vector<QuasitrivPoint> out(xs.size());
  const double e2 = eps * eps;
  for (size_t i = 0; i < xs.size(); ++i) {
    auto d = hopf_derivatives_n(a, data, xs[i], t, 3);
    if (std::abs(d[1]) < vx_floor)
      throw NearCausticError(
          "quasitriv_solution: |v_x| below floor at x = " +
          std::to_string(xs[i]));
    QuasitrivPoint p;
    p.v = d[0];
    p.w = quasitriv_w(a, data, c, xs[i], t, d[0]);
    p.bracket = quasitriv_bracket(c, d[0], d[1], d[2], d[3]);
    p.u = p.v + e2 * (p.w + p.bracket);
    out[i] = p;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Leading defect polynomial
// ---------------------------------------------------------------------------

double discrepancy_leading_at(const SmoothFn& c, double v,
                              std::span<const double> vd) {
  if (vd.size() < 6)
    throw Error("discrepancy_leading_at: need derivatives up to order 6");
  const double v1 = vd[0], v2 = vd[1], v3 = vd[2], v4 = vd[3], v5 = vd[4],
               v6 = vd[5];
  Jet cj = c(Jet::variable(v, 5));
  const double c0 = cj.deriv(0), c1 = cj.deriv(1), c2 = cj.deriv(2),
               c3 = cj.deriv(3), c4 = cj.deriv(4), c5 = cj.deriv(5);

  const double v1_2 = v1 * v1, v1_3 = v1_2 * v1, v1_4 = v1_3 * v1,
               v1_5 = v1_4 * v1;
  const double v2_2 = v2 * v2, v2_3 = v2_2 * v2, v2_4 = v2_3 * v2,
               v2_5 = v2_4 * v2;

  double acc = 0.0;
  acc += c0 * c0 *
         (11.5 * v2_5 / v1_5 - 28.75 * v2_3 * v3 / v1_4 +
          9.75 * v2_2 * v4 / v1_3 + 14.25 * v2 * v3 * v3 / v1_3 -
          2.5 * v2 * v5 / v1_2 - 4.75 * v3 * v4 / v1_2 + 0.5 * v6 / v1);
  acc += c0 * c1 *
         (-8.75 * v2_4 / v1_3 + 19.0 * v2_2 * v3 / v1_2 - 7.0 * v2 * v4 / v1 -
          5.75 * v3 * v3 / v1 + 3.5 * v5);
  acc += c0 * c2 * (1.5 * v2_3 / v1 + 6.5 * v1 * v4 + 3.0 * v2 * v3);
  acc += c0 * c3 * (7.5 * v1_2 * v3 + 8.0 * v1 * v2_2);
  acc += 5.5 * c0 * c4 * v1_3 * v2;
  acc += 0.5 * c0 * c5 * v1_5;
  acc += c1 * c1 * (1.5 * v2_3 / v1 + 4.0 * v1 * v4 + 0.5 * v2 * v3);
  acc += c1 * c2 * (10.5 * v1_2 * v3 + 10.0 * v1 * v2_2);
  acc += 9.0 * c1 * c3 * v1_3 * v2;
  acc += c1 * c4 * v1_5;
  acc += 5.0 * c2 * c2 * v1_3 * v2;
  acc += 1.25 * c2 * c3 * v1_5;
  return acc;
}

std::vector<double> discrepancy_leading(const SmoothFn& a,
                                        const InitialData& data,
                                        const SmoothFn& c,
                                        std::span<const double> xs, double t,
                                        double vx_floor) {
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    auto d = hopf_derivatives_n(a, data, xs[i], t, 6);
    if (std::abs(d[1]) < vx_floor)
      throw NearCausticError("discrepancy_leading: |v_x| below floor");
    out[i] = discrepancy_leading_at(
        c, d[0], std::span<const double>(d).subspan(1));
  }
  return out;
}

}  // namespace displab
