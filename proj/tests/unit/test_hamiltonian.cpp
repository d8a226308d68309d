#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "displab/hamiltonian.hpp"

using namespace displab;
constexpr double kPi = std::numbers::pi;

namespace {

PeriodicGrid test_grid() { return PeriodicGrid(8.0 * kPi, 256); }

RealField smooth_field(const PeriodicGrid& g, double a1 = 0.3,
                       double ph = 0.0) {
  RealField f(g);
  for (int j = 0; j < g.size; ++j) {
    double s = kPi * g.node(j) / g.half_width;
    f[j] = 0.5 + a1 * std::sin(s + ph);
  }
  return f;
}

// Bracket integrands built from these densities are odd about any
// reflection center of u, so decay measurements need a field without one.
RealField asymmetric_field(const PeriodicGrid& g) {
  RealField f(g);
  for (int j = 0; j < g.size; ++j) {
    double s = kPi * g.node(j) / g.half_width;
    f[j] = 0.5 + 0.3 * std::sin(s + 0.7) + 0.12 * std::sin(2.0 * s + 1.1);
  }
  return f;
}

}  // namespace

TEST_CASE("density partials agree with finite differences of the evaluator") {
  HamiltonianDensity h(
      {{SmoothFn::polynomial({0.1, 0.4, -0.3, 0.2}), 0, 0, 0, 0},
       {SmoothFn::polynomial({0.3, -0.1}), 2, 2, 1, 0},
       {SmoothFn::polynomial({-0.2, 0.5}), 6, 1, 0, 2}},
      "random");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-0.8, 0.8);
  const double eps = 0.7, step = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    double u = d(rng), ux = d(rng), uxx = d(rng), uxxx = d(rng);
    auto fd = [&](auto get, auto set) {
      double vars[4] = {u, ux, uxx, uxxx};
      (void)get;
      set(vars, step);
      double hi = h.eval(vars[0], vars[1], vars[2], vars[3], eps);
      set(vars, -2 * step);
      double lo = h.eval(vars[0], vars[1], vars[2], vars[3], eps);
      return (hi - lo) / (2 * step);
    };
    double scale = std::abs(h.eval(u, ux, uxx, uxxx, eps)) + 1.0;
    CHECK(h.d_u(u, ux, uxx, uxxx, eps) ==
          doctest::Approx(fd(0, [](double* v, double s) { v[0] += s; }))
              .epsilon(1e-6 * scale));
    CHECK(h.d_ux(u, ux, uxx, uxxx, eps) ==
          doctest::Approx(fd(0, [](double* v, double s) { v[1] += s; }))
              .epsilon(1e-6 * scale));
    CHECK(h.d_uxx(u, ux, uxx, uxxx, eps) ==
          doctest::Approx(fd(0, [](double* v, double s) { v[2] += s; }))
              .epsilon(1e-6 * scale));
    CHECK(h.d_uxxx(u, ux, uxx, uxxx, eps) ==
          doctest::Approx(fd(0, [](double* v, double s) { v[3] += s; }))
              .epsilon(1e-6 * scale));
  }
}

TEST_CASE("variational derivative of u^3/6 is u^2/2") {
  HamiltonianDensity h({{SmoothFn::monomial(1.0 / 6.0, 3), 0, 0, 0, 0}},
                       "cubic");
  PeriodicGrid g = test_grid();
  RealField u = smooth_field(g);
  RealField el = euler_lagrange(h, u, 0.1);
  double err = 0.0;
  for (int j = 0; j < g.size; ++j)
    err = std::max(err, std::abs(el[j] - 0.5 * u[j] * u[j]));
  CHECK(err < 1e-12);
}

TEST_CASE("variational derivative of the gradient density") {
  // h = -(eps^2/2) c u_x^2 with constant c = 1/6 gives (eps^2/6) u_xx.
  HamiltonianDensity h({{SmoothFn::constant(-1.0 / 12.0), 2, 2, 0, 0}},
                       "grad");
  PeriodicGrid g = test_grid();
  RealField u = smooth_field(g);
  RealField el = euler_lagrange(h, u, 0.3);
  RealField uxx = derivative(u, 2);
  double err = 0.0;
  for (int j = 0; j < g.size; ++j)
    err = std::max(err, std::abs(el[j] - 0.09 / 6.0 * uxx[j]));
  CHECK(err < 1e-10);
}

TEST_CASE("total x-derivatives are annihilated") {
  PeriodicGrid g = test_grid();
  RealField u = smooth_field(g, 0.35, 0.4);

  // d_x(u u_x) = u_x^2 + u u_xx
  HamiltonianDensity h1({{SmoothFn::constant(1.0), 0, 2, 0, 0},
                         {SmoothFn::identity(), 0, 0, 1, 0}},
                        "total-derivative");
  CHECK(euler_lagrange(h1, u, 1.0).max_abs() < 1e-10);

  // randomized: d_x(w(u) u_x^p) = w' u_x^{p+1} + p w u_x^{p-1} u_xx
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> wc = {d(rng), d(rng), d(rng), d(rng)};
    SmoothFn w = SmoothFn::polynomial(wc);
    int p = 1 + trial % 3;
    HamiltonianDensity h2({{w.derivative_fn(1), 0, p + 1, 0, 0},
                           {static_cast<double>(p) * w, 0, p - 1, 1, 0}},
                          "random-total-derivative");
    CHECK(euler_lagrange(h2, u, 1.0).max_abs() < 1e-10);
  }
}

TEST_CASE("bracket antisymmetry, bilinearity and the mass Casimir") {
  PeriodicGrid g = test_grid();
  RealField u = asymmetric_field(g);
  HamiltonianDensity hA(
      {{SmoothFn::polynomial({0.0, 0.3, 0.5, 0.1}), 0, 0, 0, 0},
       {SmoothFn::polynomial({0.2, -0.4}), 2, 2, 0, 0}},
      "A");
  HamiltonianDensity hB(
      {{SmoothFn::polynomial({0.1, -0.2, 0.4, 0.0, 0.05}), 0, 0, 0, 0},
       {SmoothFn::polynomial({-0.1, 0.3}), 2, 0, 2, 0}},
      "B");
  const double eps = 0.25;
  double ab = poisson_bracket(hA, hB, u, eps);
  double ba = poisson_bracket(hB, hA, u, eps);
  CHECK(std::abs(ab) > 1e-8);  // generic pair does not commute
  CHECK(std::abs(ab + ba) < 1e-10 * std::max(1.0, std::abs(ab)));

  // diagonal vanishes: the integrand is a total derivative
  CHECK(std::abs(poisson_bracket(hA, hA, u, eps)) < 1e-11);

  // int u dx is a Casimir of d_x
  HamiltonianDensity mass({{SmoothFn::identity(), 0, 0, 0, 0}}, "mass");
  CHECK(std::abs(poisson_bracket(mass, hB, u, eps)) < 1e-11);
  CHECK(std::abs(poisson_bracket(hB, mass, u, eps)) < 1e-11);
}

TEST_CASE("conservation-law coefficient constraints") {
  std::vector<double> us;
  for (int i = 0; i <= 10; ++i) us.push_back(0.05 + 0.1 * i);

  // classical KdV written as a conservation law: b1 = 1, rest zero
  std::array<SmoothFn, 11> b{};
  b[1] = SmoothFn::constant(1.0);
  auto rep = check_coefficients(b, us);
  CHECK(rep.all_pass(1e-12));

  // Kawahara: b1 = alpha, b6 = beta constants
  std::array<SmoothFn, 11> bk{};
  bk[1] = SmoothFn::constant(0.7);
  bk[6] = SmoothFn::constant(-1.0);
  CHECK(check_coefficients(bk, us).all_pass(1e-12));

  // b1 = u with b2 = 0 violates b2 = b1'/2 by exactly 1/2
  std::array<SmoothFn, 11> bad{};
  bad[1] = SmoothFn::identity();
  auto rep2 = check_coefficients(bad, us);
  CHECK_FALSE(rep2.all_pass(1e-12));
  CHECK(rep2.relations[1].max_violation == doctest::Approx(0.5));
}

TEST_CASE("commuting density reduces to the cubic Hamiltonian form") {
  // f = u^3/6: f''' = 1, higher derivatives vanish, so the density is
  // f - (eps^2/2) c u_x^2 + eps^4 p u_xx^2.
  SmoothFn f = SmoothFn::monomial(1.0 / 6.0, 3);
  SmoothFn c = SmoothFn::polynomial({0.2, 0.1});
  SmoothFn p = SmoothFn::polynomial({-0.05, 0.3});
  HamiltonianDensity h = hf_density(f, c, p);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.9, 0.9);
  for (int trial = 0; trial < 10; ++trial) {
    double u = d(rng), ux = d(rng), uxx = d(rng);
    double eps = 0.4;
    double want = u * u * u / 6.0 -
                  eps * eps / 2.0 * c(u) * ux * ux +
                  std::pow(eps, 4) * p(u) * uxx * uxx;
    CHECK(h.eval(u, ux, uxx, 0.0, eps) ==
          doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("linear and quadratic generators carry no corrections") {
  SmoothFn c = SmoothFn::constant(1.0 / 6.0);
  SmoothFn p = SmoothFn::zero();
  HamiltonianDensity hu = hf_density(SmoothFn::identity(), c, p);
  HamiltonianDensity hu2 = hf_density(SmoothFn::monomial(0.5, 2), c, p);
  CHECK(hu.eval(0.3, 0.7, -0.2, 0.0, 0.5) == doctest::Approx(0.3));
  CHECK(hu2.eval(0.3, 0.7, -0.2, 0.0, 0.5) == doctest::Approx(0.045));

  // the mass generator is a Casimir: bracket with anything vanishes
  PeriodicGrid g = test_grid();
  RealField u = smooth_field(g);
  HamiltonianDensity hg =
      hf_density(SmoothFn::monomial(1.0 / 24.0, 4), c, p);
  CHECK(std::abs(poisson_bracket(hu, hg, u, 0.1)) < 1e-11);
}

TEST_CASE("bracket decay of the commuting family") {
  SmoothFn c = SmoothFn::polynomial({1.0 / 6.0, 0.1});
  SmoothFn p = SmoothFn::polynomial({0.0, 0.05});
  HamiltonianDensity hf = hf_density(SmoothFn::monomial(1.0 / 6.0, 3), c, p);
  HamiltonianDensity hg = hf_density(SmoothFn::monomial(1.0 / 24.0, 4), c, p);
  PeriodicGrid g = test_grid();
  RealField u = asymmetric_field(g);

  // chosen so the smallest bracket stays above the zero-report guard
  std::vector<double> eps_list;
  for (int i = 0; i < 5; ++i)
    eps_list.push_back(std::pow(10.0, -0.375 - 0.175 * i));
  auto sc = bracket_scaling(hf, hg, eps_list, u);
  REQUIRE_FALSE(sc.indistinguishable_from_zero);
  CHECK(sc.fit.slope >= 5.7);
  CHECK(sc.fit.r > 0.99);

  // translations commute with everything in the family
  HamiltonianDensity htrans = hf_density(SmoothFn::monomial(0.5, 2), c, p);
  auto sc2 = bracket_scaling(hf, htrans, eps_list, u);
  CHECK(sc2.indistinguishable_from_zero);

  // at constant c and vanishing p the truncation commutes to round-off,
  // which the zero-report path must flag rather than fit
  SmoothFn c0 = SmoothFn::constant(1.0 / 6.0);
  HamiltonianDensity kf = hf_density(SmoothFn::monomial(1.0 / 6.0, 3), c0,
                                     SmoothFn::zero());
  HamiltonianDensity kg = hf_density(SmoothFn::monomial(1.0 / 24.0, 4), c0,
                                     SmoothFn::zero());
  auto sc3 = bracket_scaling(kf, kg, eps_list, u);
  CHECK(sc3.indistinguishable_from_zero);
}

TEST_CASE("forced coefficient of the order-6 extension") {
  // c = 1, p = 0: every term carries p or a derivative of c
  Order6Extension e1(SmoothFn::constant(1.0), SmoothFn::zero(),
                     SmoothFn::zero());
  CHECK(e1.alpha()(0.4) == doctest::Approx(0.0));
  // c = 1, p = 1: only the 80 p^2 / c term survives
  Order6Extension e2(SmoothFn::constant(1.0), SmoothFn::constant(1.0),
                     SmoothFn::zero());
  CHECK(e2.alpha()(0.4) == doctest::Approx(80.0 / 28.0));

  CHECK_THROWS_AS(order6_extension(SmoothFn::zero(), SmoothFn::constant(1.0),
                                   SmoothFn::zero(), 0.05, 1.05),
                  ObstructionError);
}

TEST_CASE("order-6 extension pushes the bracket decay to the next order") {
  SmoothFn c = SmoothFn::polynomial({1.0 / 6.0, 0.1});
  SmoothFn p = SmoothFn::polynomial({0.0, 0.05});
  SmoothFn beta = SmoothFn::constant(1.0 / 30.0);
  Order6Extension ext = order6_extension(c, p, beta, 0.05, 1.05);

  HamiltonianDensity hf =
      ext.commuting_density(SmoothFn::monomial(1.0 / 6.0, 3));
  HamiltonianDensity hg = ext.commuting_density(
      SmoothFn::polynomial({0.0, 0.0, 0.0, 0.2, 1.0 / 24.0}));
  PeriodicGrid g = test_grid();
  RealField u = asymmetric_field(g);

  // brackets fall through ~eps^8, so the sweep stays above the quadrature
  // round-off floor (~1e-17)
  std::vector<double> eps_list;
  for (int i = 1; i <= 5; ++i)
    eps_list.push_back(std::pow(10.0, -0.125 * i));
  auto sc = bracket_scaling(hf, hg, eps_list, u);
  REQUIRE_FALSE(sc.indistinguishable_from_zero);
  CHECK(sc.fit.slope >= 7.7);

  // the same generators without the extension stay near the lower rate
  HamiltonianDensity bf = hf_density(SmoothFn::monomial(1.0 / 6.0, 3), c, p);
  HamiltonianDensity bg = hf_density(
      SmoothFn::polynomial({0.0, 0.0, 0.0, 0.2, 1.0 / 24.0}), c, p);
  auto sc4 = bracket_scaling(bf, bg, eps_list, u);
  REQUIRE_FALSE(sc4.indistinguishable_from_zero);
  CHECK(sc4.fit.slope < sc.fit.slope);
}
