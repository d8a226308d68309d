#include <doctest.h>

#include <cmath>
#include <numbers>

#include "displab/models.hpp"

using namespace displab;
constexpr double kPi = std::numbers::pi;

namespace {

RealField sech2_field(const PeriodicGrid& g, double shift = 0.0,
                      double lift = 0.0) {
  RealField f(g);
  for (int j = 0; j < g.size; ++j) {
    double c = std::cosh(g.node(j) - shift);
    f[j] = 1.0 / (c * c) + lift;
  }
  return f;
}

double sup_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j)
    m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("classical KdV instance") {
  ModelSpec m = make_gen_kdv(1);
  CHECK(m.a(0.5) == doctest::Approx(3.0));
  CHECK(m.c(0.7) == doctest::Approx(1.0 / 6.0));
  CHECK(m.p(0.7) == doctest::Approx(0.0));
  CHECK(m.b1(0.3) == doctest::Approx(1.0));
  auto L = m.linear_symbol(2.0, 0.1);
  CHECK(L.real() == doctest::Approx(0.0));
  CHECK(L.imag() == doctest::Approx(0.01 * 8.0));
}

TEST_CASE("Kawahara invariants are the advertised constants") {
  ModelSpec m = make_kawahara(1.0, -1.0);
  CHECK(m.c(0.2) == doctest::Approx(1.0 / 6.0));
  CHECK(m.p(0.9) == doctest::Approx(-1.0 / 12.0));
  CHECK(m.b1(0.4) == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_kawahara(1.0, 0.0), ConstructionError);
}

TEST_CASE("KdV hierarchy family invariants") {
  ModelSpec m1 = make_kdv2(1.0);
  CHECK(m1.p(0.5) == doctest::Approx(0.0));  // 1 - alpha^2 = 0
  ModelSpec mh = make_kdv2(0.5);
  CHECK(mh.p(1.0) == doctest::Approx(0.00625));
  CHECK(mh.c(1.0) == doctest::Approx(0.5 / 6.0));
  // b1 = c a' = (alpha/6)(60u)
  CHECK(mh.b1(0.3) == doctest::Approx(10.0 * 0.5 * 0.3));
}

TEST_CASE("invariant tabulation and the a' = 0 guard") {
  ModelSpec m = make_kdv2(0.5);
  std::vector<double> us = {0.2, 0.6, 1.0};
  auto tab = invariants_cp(m, us);
  CHECK(tab.size() == 3);
  CHECK(tab[2].p == doctest::Approx(0.00625));
  std::vector<double> bad = {0.0};
  CHECK_THROWS_AS(invariants_cp(m, bad), SingularInvariantError);
}

TEST_CASE("constants are fixed points of every model") {
  PeriodicGrid g(8.0 * kPi, 256);
  RealField c(g);
  for (int j = 0; j < g.size; ++j) c[j] = 0.37;
  for (const ModelSpec& m :
       {make_gen_kdv(1), make_kawahara(1.0, 1.0), make_kdv2(0.8),
        make_nonlinear_dispersion(SmoothFn::monomial(1.0, 2),
                                  SmoothFn::zero(), "u2")}) {
    auto r = rhs(m, c, 0.1);
    CHECK(r.dudt.max_abs() < 1e-12);
  }
}

TEST_CASE("linear dispersion relation of the Kawahara symbol") {
  // For a single cosine mode the constant-coefficient part must rotate the
  // phase at rate alpha eps^2 k^3 - beta eps^4 k^5.
  ModelSpec m = make_kawahara(1.0, 1.0);
  PeriodicGrid g(8.0 * kPi, 256);
  const double k = g.wavenumber(8);
  const double eps = 0.4;  // exaggerate the eps^4 term
  RealField u(g);
  for (int j = 0; j < g.size; ++j) u[j] = std::cos(k * g.node(j));

  RealField full = rhs(m, u, eps).dudt;
  RealField nl = rhs_nonlinear(m, u, eps);
  const double e2 = eps * eps, e4 = e2 * e2;
  const double omega = e2 * k * k * k - e4 * k * k * k * k * k;
  double err = 0.0;
  for (int j = 0; j < g.size; ++j) {
    double lin = full[j] - nl[j];
    double want = -omega * std::sin(k * g.node(j));
    err = std::max(err, std::abs(lin - want));
  }
  CHECK(err < 1e-10);

  auto L = m.linear_symbol(k, eps);
  CHECK(L.imag() == doctest::Approx(omega).epsilon(1e-14));
}

TEST_CASE("nonlinear-dispersion rhs matches an independent assembly") {
  // c(u) = u^2, p = 0: assemble -d_x{u^2/2 + eps^2 (c u_xx + c' u_x^2 / 2)}
  // from raw spectral derivatives with hand-written c, c'.
  ModelSpec m = make_nonlinear_dispersion(SmoothFn::monomial(1.0, 2),
                                          SmoothFn::zero(), "u2");
  PeriodicGrid g(8.0 * kPi, 1024);
  RealField u = sech2_field(g);
  const double eps = 0.1, e2 = eps * eps;

  RealField ux = derivative(u, 1);
  RealField uxx = derivative(u, 2);
  RealField flux(g);
  for (int j = 0; j < g.size; ++j)
    flux[j] = 0.5 * u[j] * u[j] +
              e2 * (u[j] * u[j] * uxx[j] + u[j] * ux[j] * ux[j]);
  RealField want = derivative(flux, 1);
  for (int j = 0; j < g.size; ++j) want[j] = -want[j];

  auto got = rhs(m, u, eps);
  CHECK(sup_diff(got.dudt, want) < 1e-9);
}

TEST_CASE("nonlinear dispersion with p: full fourth-order bracket") {
  // c = u^2, p = u^2: check against a term-by-term independent assembly.
  ModelSpec m = make_nonlinear_dispersion(SmoothFn::monomial(1.0, 2),
                                          SmoothFn::monomial(1.0, 2), "u2u2");
  PeriodicGrid g(8.0 * kPi, 1024);
  RealField u = sech2_field(g, 0.0, 0.2);
  const double eps = 0.2, e2 = eps * eps, e4 = e2 * e2;

  RealField ux = derivative(u, 1);
  RealField uxx = derivative(u, 2);
  RealField uxxx = derivative(u, 3);
  RealField uxxxx = derivative(u, 4);
  RealField flux(g);
  for (int j = 0; j < g.size; ++j) {
    double uu = u[j];
    // 2 p u_xxxx + 4 p' u_x u_xxx + 3 p' u_xx^2 + 2 p'' u_x^2 u_xx with
    // p = u^2, p' = 2u, p'' = 2
    flux[j] = 0.5 * uu * uu + e2 * (uu * uu * uxx[j] + uu * ux[j] * ux[j]) +
              e4 * (2.0 * uu * uu * uxxxx[j] +
                    8.0 * uu * ux[j] * uxxx[j] +
                    6.0 * uu * uxx[j] * uxx[j] +
                    4.0 * ux[j] * ux[j] * uxx[j]);
  }
  RealField want = derivative(flux, 1);
  for (int j = 0; j < g.size; ++j) want[j] = -want[j];
  CHECK(sup_diff(rhs(m, u, eps).dudt, want) < 1e-9);
}

TEST_CASE("mass conservation: the rhs integrates to zero") {
  PeriodicGrid g(8.0 * kPi, 2048);
  RealField u = sech2_field(g, 0.3, 0.1);
  for (const ModelSpec& m :
       {make_gen_kdv(3), make_kawahara(1.0, -1.0), make_kdv2(0.6),
        make_nonlinear_dispersion(SmoothFn::monomial(1.0, 2),
                                  SmoothFn::monomial(-1.0, 2), "u2")}) {
    auto r = rhs(m, u, 0.05);
    double scale = 2.0 * g.half_width * r.dudt.max_abs();
    CHECK(std::abs(integrate(r.dudt)) < 1e-12 * scale);
  }
}

TEST_CASE("split rhs equals the monolithic assembly") {
  PeriodicGrid g(8.0 * kPi, 1024);
  RealField u = sech2_field(g);
  for (const ModelSpec& m :
       {make_gen_kdv(1), make_gen_kdv(4), make_kawahara(1.0, 1.0),
        make_kdv2(0.7)}) {
    const double eps = 0.1;
    SpectralCoeffs uh = to_spectral(u);
    SpectralCoeffs nl(g);
    rhs_nonlinear_spectral(m, uh, eps, nl);
    for (int j = 0; j < g.size; ++j) {
      double k = g.wavenumber(g.mode_of_slot(j));
      nl.coeffs()[j] += m.linear_symbol(k, eps) * uh.coeffs()[j];
    }
    RealField split = to_physical(nl);
    CHECK(sup_diff(split, rhs(m, u, eps).dudt) < 1e-10);
  }
}

TEST_CASE("rhs is minus d_x of the variational derivative of the density") {
  PeriodicGrid g(8.0 * kPi, 1024);
  RealField u = sech2_field(g, -0.4, 0.15);
  const double eps = 0.15;
  for (const ModelSpec& m :
       {make_gen_kdv(1), make_gen_kdv(4), make_kawahara(1.0, -1.0),
        make_kdv2(0.5),
        make_nonlinear_dispersion(SmoothFn::monomial(1.0, 2),
                                  SmoothFn::monomial(1.0, 2), "u2")}) {
    RealField el = euler_lagrange(m.density, u, eps);
    RealField del = derivative(el, 1);
    RealField want(g);
    for (int j = 0; j < g.size; ++j) want[j] = -del[j];
    CHECK(sup_diff(rhs(m, u, eps).dudt, want) < 1e-8);
  }
}

TEST_CASE("resolution warning propagates") {
  PeriodicGrid g(8.0 * kPi, 64);
  RealField rough(g);
  for (int j = 0; j < g.size; ++j) rough[j] = (j % 2) ? 0.9 : -1.1;
  auto r = rhs(make_gen_kdv(1), rough, 0.1);
  CHECK(r.resolution_warning);
  CHECK(r.tail_max > 1e-8);
}

TEST_CASE("construction errors name the violated constraint") {
  CHECK_THROWS_AS(make_gen_kdv(0), ConstructionError);
  CHECK_THROWS_WITH_AS(make_kawahara(2.0, 0.0), doctest::Contains("beta"),
                       ConstructionError);
}
