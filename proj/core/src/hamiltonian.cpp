#include "displab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "displab/errors.hpp"

namespace displab {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

HamiltonianDensity::HamiltonianDensity(std::vector<DensityTerm> terms,
                                       std::string tag)
    : terms_(std::move(terms)), tag_(std::move(tag)) {
  for (const auto& t : terms_)
    if (t.pxxx > 0) max_jet_ = 3;
}

double HamiltonianDensity::eval(double u, double ux, double uxx, double uxxx,
                                double eps) const {
  double s = 0.0;
  for (const auto& t : terms_)
    s += ipow(eps, t.eps_pow) * t.w(u) * ipow(ux, t.px) * ipow(uxx, t.pxx) *
         ipow(uxxx, t.pxxx);
  return s;
}

double HamiltonianDensity::d_u(double u, double ux, double uxx, double uxxx,
                               double eps) const {
  double s = 0.0;
  for (const auto& t : terms_)
    s += ipow(eps, t.eps_pow) * t.w.deriv(u, 1) * ipow(ux, t.px) *
         ipow(uxx, t.pxx) * ipow(uxxx, t.pxxx);
  return s;
}

double HamiltonianDensity::d_ux(double u, double ux, double uxx, double uxxx,
                                double eps) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.px == 0) continue;
    s += ipow(eps, t.eps_pow) * t.w(u) * t.px * ipow(ux, t.px - 1) *
         ipow(uxx, t.pxx) * ipow(uxxx, t.pxxx);
  }
  return s;
}

double HamiltonianDensity::d_uxx(double u, double ux, double uxx, double uxxx,
                                 double eps) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.pxx == 0) continue;
    s += ipow(eps, t.eps_pow) * t.w(u) * ipow(ux, t.px) * t.pxx *
         ipow(uxx, t.pxx - 1) * ipow(uxxx, t.pxxx);
  }
  return s;
}

double HamiltonianDensity::d_uxxx(double u, double ux, double uxx,
                                  double uxxx, double eps) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.pxxx == 0) continue;
    s += ipow(eps, t.eps_pow) * t.w(u) * ipow(ux, t.px) * ipow(uxx, t.pxx) *
         t.pxxx * ipow(uxxx, t.pxxx - 1);
  }
  return s;
}

RealField euler_lagrange(const HamiltonianDensity& h, const RealField& u,
                         double eps) {
  if (!u.finite()) throw InvalidFieldError("euler_lagrange: non-finite field");
  const int n = u.size();
  RealField ux = derivative(u, 1);
  RealField uxx = derivative(u, 2);
  RealField uxxx = derivative(u, 3);

  RealField a(u.grid()), b(u.grid()), c(u.grid()), d(u.grid());
  for (int j = 0; j < n; ++j) {
    a[j] = h.d_u(u[j], ux[j], uxx[j], uxxx[j], eps);
    b[j] = h.d_ux(u[j], ux[j], uxx[j], uxxx[j], eps);
    c[j] = h.d_uxx(u[j], ux[j], uxx[j], uxxx[j], eps);
    if (h.max_jet() >= 3) d[j] = h.d_uxxx(u[j], ux[j], uxx[j], uxxx[j], eps);
  }

  RealField db = derivative(b, 1);
  RealField d2c = derivative(c, 2);
  RealField out(u.grid());
  for (int j = 0; j < n; ++j) out[j] = a[j] - db[j] + d2c[j];
  if (h.max_jet() >= 3) {
    RealField d3d = derivative(d, 3);
    for (int j = 0; j < n; ++j) out[j] -= d3d[j];
  }
  return out;
}

double functional_value(const HamiltonianDensity& h, const RealField& u,
                        double eps) {
  const int n = u.size();
  RealField ux = derivative(u, 1);
  RealField uxx = derivative(u, 2);
  RealField uxxx =
      h.max_jet() >= 3 ? derivative(u, 3) : RealField(u.grid());
  RealField dens(u.grid());
  for (int j = 0; j < n; ++j)
    dens[j] = h.eval(u[j], ux[j], uxx[j], uxxx[j], eps);
  return integrate(dens);
}

double poisson_bracket(const HamiltonianDensity& h_H,
                       const HamiltonianDensity& h_F, const RealField& u,
                       double eps) {
  RealField dh = euler_lagrange(h_H, u, eps);
  RealField df = euler_lagrange(h_F, u, eps);
  RealField dfx = derivative(df, 1);
  RealField integrand(u.grid());
  for (int j = 0; j < u.size(); ++j) integrand[j] = dh[j] * dfx[j];
  return integrate(integrand);
}

// ---------------------------------------------------------------------------

bool CoefficientReport::all_pass(double tol) const {
  return std::all_of(relations.begin(), relations.end(),
                     [tol](const auto& r) { return r.max_violation <= tol; });
}

double CoefficientReport::worst() const {
  double w = 0.0;
  for (const auto& r : relations) w = std::max(w, r.max_violation);
  return w;
}

CoefficientReport check_coefficients(const std::array<SmoothFn, 11>& b,
                                     std::span<const double> u_samples) {
  auto val = [&](int i, double u) { return b[i].valid() ? b[i](u) : 0.0; };
  auto der = [&](int i, double u) {
    return b[i].valid() ? b[i].deriv(u, 1) : 0.0;
  };

  CoefficientReport rep;
  rep.relations = {
      {"b0 = 0", 0.0},          {"b2 = b1'/2", 0.0}, {"b3 = 0", 0.0},
      {"b5 = b4'/3", 0.0},      {"b7 = 2 b6'", 0.0}, {"b8 = (3/2) b6'", 0.0},
      {"b10 = b9'/4", 0.0},
  };
  for (double u : u_samples) {
    auto upd = [&](int idx, double v) {
      rep.relations[idx].max_violation =
          std::max(rep.relations[idx].max_violation, std::abs(v));
    };
    upd(0, val(0, u));
    upd(1, val(2, u) - 0.5 * der(1, u));
    upd(2, val(3, u));
    upd(3, val(5, u) - der(4, u) / 3.0);
    upd(4, val(7, u) - 2.0 * der(6, u));
    upd(5, val(8, u) - 1.5 * der(6, u));
    upd(6, val(10, u) - 0.25 * der(9, u));
  }
  return rep;
}

// ---------------------------------------------------------------------------

HamiltonianDensity hf_density(const SmoothFn& f, const SmoothFn& c,
                              const SmoothFn& p, const std::string& tag) {
  SmoothFn w_x2([f, c](const Jet& u) {
    auto fd = f.derivative_jets(u, 3);
    return -0.5 * (c(u) * fd[3]);
  });
  SmoothFn w_xx2([f, c, p](const Jet& u) {
    auto fd = f.derivative_jets(u, 4);
    return p(u) * fd[3] + 0.3 * (c(u) * c(u)) * fd[4];
  });
  SmoothFn w_x4([f, c, p](const Jet& u) {
    auto fd = f.derivative_jets(u, 6);
    auto cd = c.derivative_jets(u, 2);
    auto pd = p.derivative_jets(u, 1);
    Jet inner = (3.0 * cd[0] * cd[2] * fd[4] + 3.0 * cd[0] * cd[1] * fd[5] +
                 cd[0] * cd[0] * fd[6]) /
                    4.0 +
                pd[1] * fd[4] + pd[0] * fd[5];
    return (-1.0 / 6.0) * inner;
  });

  std::vector<DensityTerm> terms;
  terms.push_back({f, 0, 0, 0, 0});
  terms.push_back({w_x2, 2, 2, 0, 0});
  terms.push_back({w_xx2, 4, 0, 2, 0});
  terms.push_back({w_x4, 4, 4, 0, 0});
  return HamiltonianDensity(std::move(terms), tag);
}

ScalingFit bracket_scaling(const HamiltonianDensity& h_f,
                           const HamiltonianDensity& h_g,
                           std::span<const double> eps_list,
                           const RealField& u_test) {
  if (eps_list.size() < 5)
    throw Error("bracket_scaling: need at least 5 eps values");
  ScalingFit out;
  out.eps.assign(eps_list.begin(), eps_list.end());
  double largest = 0.0;
  double value_at_largest = 0.0;
  for (double e : eps_list) {
    double v = std::abs(poisson_bracket(h_f, h_g, u_test, e));
    out.bracket_abs.push_back(v);
    if (e > largest) {
      largest = e;
      value_at_largest = v;
    }
  }
  if (value_at_largest < 1e-14 ||
      std::any_of(out.bracket_abs.begin(), out.bracket_abs.end(),
                  [](double v) { return v < 1e-16; })) {
    out.indistinguishable_from_zero = true;
    return out;
  }
  out.fit = loglog_fit(out.eps, out.bracket_abs);
  return out;
}

// ---------------------------------------------------------------------------
// Order-6 extension
// ---------------------------------------------------------------------------

namespace {

SmoothFn make_alpha(const SmoothFn& c, const SmoothFn& p) {
  return SmoothFn([c, p](const Jet& u) {
    auto cd = c.derivative_jets(u, 2);
    auto pd = p.derivative_jets(u, 1);
    Jet e = 80.0 * (pd[0] * pd[0]) / cd[0] - 67.0 * pd[0] * cd[1] +
            33.0 * cd[0] * pd[1] + 12.0 * cd[0] * (cd[1] * cd[1]) -
            9.0 * (cd[0] * cd[0]) * cd[2];
    return e / 28.0;
  });
}

}  // namespace

Order6Extension::Order6Extension(SmoothFn c, SmoothFn p, SmoothFn beta)
    : c_(std::move(c)),
      p_(std::move(p)),
      beta_(std::move(beta)),
      alpha_(make_alpha(c_, p_)) {}

HamiltonianDensity Order6Extension::commuting_density(
    const SmoothFn& f, const std::string& tag) const {
  const SmoothFn c = c_, p = p_, beta = beta_, alpha = alpha_;

  SmoothFn alpha_f([f, c, p, alpha](const Jet& u) {
    auto fd = f.derivative_jets(u, 5);
    auto cd = c.derivative_jets(u, 1);
    Jet c2 = cd[0] * cd[0];
    return alpha(u) * fd[3] +
           ((8.0 / 7.0) * c(u) * p(u) + (3.0 / 70.0) * c2 * cd[1]) * fd[4] +
           (9.0 / 70.0) * (c2 * cd[0]) * fd[5];
  });

  SmoothFn beta_f([f, c, p, alpha, beta](const Jet& u) {
    auto fd = f.derivative_jets(u, 6);
    auto cd = c.derivative_jets(u, 2);
    auto pd = p.derivative_jets(u, 1);
    Jet c2 = cd[0] * cd[0];
    Jet t4 = 1.5 * alpha(u) +
             (253.0 * pd[0] * cd[1] + 169.0 * cd[0] * pd[1]) / 168.0 +
             cd[0] * (cd[1] * cd[1]) / 35.0 + (5.0 / 56.0) * c2 * cd[2];
    Jet t5 = (29.0 / 21.0) * cd[0] * pd[0] + (31.0 / 70.0) * c2 * cd[1];
    return beta(u) * fd[3] - t4 * fd[4] - t5 * fd[5] - (c2 * cd[0]) * fd[6] / 7.0;
  });

  SmoothFn alpha1 = alpha_.derivative_fn(1);
  SmoothFn alpha2 = alpha_.derivative_fn(2);

  SmoothFn gamma_f([f, c, p, alpha, alpha1, beta](const Jet& u) {
    auto fd = f.derivative_jets(u, 7);
    auto cd = c.derivative_jets(u, 3);
    auto pd = p.derivative_jets(u, 2);
    Jet c2 = cd[0] * cd[0];
    Jet t4 = (3.0 / 7.0) * beta(u) - (6.0 / 7.0) * alpha1(u) +
             (3.0 / 35.0) * (cd[1] * cd[1] * cd[1] - c2 * cd[3] -
                             3.0 * cd[0] * cd[1] * cd[2]) +
             cd[1] * pd[1] - (47.0 / 14.0) * pd[0] * cd[2] - cd[0] * pd[2];
    Jet t5 = 2.0 * alpha(u) + (37.0 / 14.0) * pd[0] * cd[1] +
             (3.0 / 35.0) * (cd[0] * (cd[1] * cd[1]) + 11.0 * c2 * cd[2]) +
             (8.0 / 7.0) * cd[0] * pd[1];
    Jet t6 = (23.0 * cd[0] * pd[0] + 9.0 * c2 * cd[1]) / 14.0;
    return t4 * fd[4] - t5 * fd[5] - t6 * fd[6] -
           (3.0 / 20.0) * (c2 * cd[0]) * fd[7];
  });

  SmoothFn delta_f([f, c, p, alpha, alpha1, alpha2](const Jet& u) {
    auto fd = f.derivative_jets(u, 9);
    auto cd = c.derivative_jets(u, 5);
    auto pd = p.derivative_jets(u, 4);
    Jet c2 = cd[0] * cd[0];
    Jet t4 = 0.1 * pd[1] * cd[3] +
             (10.0 * cd[0] * cd[2] * cd[3] + 7.0 * cd[0] * cd[1] * cd[4] +
              c2 * cd[5]) /
                 40.0 +
             (2.0 / 15.0) * pd[0] * cd[4] + (1.0 / 60.0) * cd[0] * pd[4];
    Jet t5 = (1.0 / 15.0) * alpha2(u) + 0.2 * pd[1] * cd[2] +
             (3.0 / 40.0) * cd[0] * (cd[2] * cd[2]) + 0.3 * pd[0] * cd[3] +
             cd[0] * cd[1] * cd[3] / 10.0 + (1.0 / 15.0) * cd[0] * pd[3] +
             c2 * cd[4] / 15.0;
    Jet t6 = (2.0 / 15.0) * alpha1(u) + (2.0 / 15.0) * cd[1] * pd[1] +
             pd[0] * cd[2] / 3.0 +
             (7.0 * cd[0] * cd[1] * cd[2] + 3.0 * c2 * cd[3]) / 40.0 +
             0.1 * cd[0] * pd[2];
    Jet t7 = (1.0 / 15.0) * alpha(u) + pd[0] * cd[1] / 6.0 +
             cd[0] * (cd[1] * cd[1]) / 16.0 + 0.1 * cd[0] * pd[1] +
             (3.0 / 40.0) * c2 * cd[2];
    Jet t8 = 0.05 * cd[0] * pd[0] + (3.0 / 80.0) * c2 * cd[1];
    return t4 * fd[4] + t5 * fd[5] + t6 * fd[6] + t7 * fd[7] + t8 * fd[8] +
           (c2 * cd[0]) * fd[9] / 240.0;
  });

  HamiltonianDensity base = hf_density(f, c_, p_, tag);
  std::vector<DensityTerm> terms = base.terms();
  terms.push_back({-1.0 * alpha_f, 6, 0, 0, 2});
  terms.push_back({-1.0 * beta_f, 6, 0, 3, 0});
  terms.push_back({-1.0 * gamma_f, 6, 2, 2, 0});
  terms.push_back({-1.0 * delta_f, 6, 6, 0, 0});
  return HamiltonianDensity(std::move(terms), tag);
}

Order6Extension order6_extension(const SmoothFn& c, const SmoothFn& p,
                                 const SmoothFn& beta_choice, double u_lo,
                                 double u_hi) {
  constexpr int kSamples = 101;
  double cmax = 0.0, cmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    double u = u_lo + (u_hi - u_lo) * i / (kSamples - 1);
    double cv = std::abs(c(u));
    cmax = std::max(cmax, cv);
    cmin = std::min(cmin, cv);
  }
  if (cmin <= 1e-12 * std::max(1.0, cmax))
    throw ObstructionError(
        "order6_extension: c(u) vanishes on the working range; the family "
        "admits no order-9 commuting extension");
  return Order6Extension(c, p, beta_choice);
}

}  // namespace displab
