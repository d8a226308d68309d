#include <doctest.h>

#include <cmath>

#include "displab/jet.hpp"
#include "displab/smooth_fn.hpp"

using namespace displab;

namespace {

// Central finite difference of order m on a callable (step tuned per order).
double fd_deriv(const std::function<double(double)>& f, double x, int m) {
  const double h = std::pow(1e-10, 1.0 / (m + 2));
  if (m == 0) return f(x);
  if (m == 1) return (f(x + h) - f(x - h)) / (2 * h);
  if (m == 2) return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
  if (m == 3)
    return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) /
           (2 * h * h * h);
  return 0.0;
}

}  // namespace

TEST_CASE("jet arithmetic reproduces elementary derivatives") {
  auto f = [](const Jet& u) {
    return exp(0.3 * u) * sin(u) + 1.0 / (1.0 + u * u);
  };
  for (double x : {-1.2, 0.0, 0.7, 2.5}) {
    Jet j = f(Jet::variable(x, 2));
    const double e3 = std::exp(0.3 * x), q = 1.0 + x * x;
    CHECK(j.deriv(0) ==
          doctest::Approx(e3 * std::sin(x) + 1.0 / q).epsilon(1e-13));
    CHECK(j.deriv(1) ==
          doctest::Approx(e3 * (0.3 * std::sin(x) + std::cos(x)) -
                          2.0 * x / (q * q))
              .epsilon(1e-13));
    CHECK(j.deriv(2) ==
          doctest::Approx(e3 * (-0.91 * std::sin(x) + 0.6 * std::cos(x)) +
                          (6.0 * x * x - 2.0) / (q * q * q))
              .epsilon(1e-13));
  }
}

TEST_CASE("jet log/sqrt/pow identities") {
  for (double x : {0.3, 1.0, 4.2}) {
    Jet u = Jet::variable(x, 6);
    Jet lhs = log(sqrt(u));
    Jet rhs = 0.5 * log(u);
    for (int m = 0; m <= 6; ++m)
      CHECK(lhs.deriv(m) == doctest::Approx(rhs.deriv(m)).epsilon(1e-12));
    Jet p = pow(u, 3.0);
    Jet q = u * u * u;
    for (int m = 0; m <= 6; ++m)
      CHECK(p.deriv(m) == doctest::Approx(q.deriv(m)).epsilon(1e-12));
  }
}

TEST_CASE("jet sinh/cosh derivative chain") {
  Jet u = Jet::variable(0.8, 8);
  Jet s = sinh(u);
  Jet c = cosh(u);
  const double sh = std::sinh(0.8), ch = std::cosh(0.8);
  for (int m = 0; m <= 8; ++m) {
    CHECK(s.deriv(m) == doctest::Approx(m % 2 ? ch : sh).epsilon(1e-13));
    CHECK(c.deriv(m) == doctest::Approx(m % 2 ? sh : ch).epsilon(1e-13));
  }
}

TEST_CASE("compose handles nested arguments") {
  // h(u) = sin(u^2): evaluate sin at the jet of u^2 via compose-free jet
  // arithmetic and compare with SmoothFn composition of derivative_fn.
  SmoothFn sq([](const Jet& u) { return u * u; });
  SmoothFn sn([](const Jet& u) { return sin(u); });
  SmoothFn d1 = sn.derivative_fn(1);  // cos
  double x = 0.9;
  Jet inner = sq(Jet::variable(x, 4));
  Jet outer = d1(inner);  // cos(u^2) with chain-rule derivatives in u
  auto ref = [&](double t) { return std::cos(t * t); };
  CHECK(outer.deriv(0) == doctest::Approx(ref(x)).epsilon(1e-13));
  CHECK(outer.deriv(1) == doctest::Approx(fd_deriv(ref, x, 1)).epsilon(1e-6));
  CHECK(outer.deriv(2) == doctest::Approx(fd_deriv(ref, x, 2)).epsilon(1e-4));
}

TEST_CASE("SmoothFn polynomial and monomial derivatives are exact") {
  SmoothFn poly = SmoothFn::polynomial({1.0, -2.0, 0.5, 3.0});  // 1-2u+u^2/2+3u^3
  CHECK(poly(2.0) == doctest::Approx(1 - 4 + 2 + 24));
  CHECK(poly.deriv(2.0, 1) == doctest::Approx(-2 + 2 * 0.5 * 2 + 9 * 4));
  CHECK(poly.deriv(2.0, 2) == doctest::Approx(1.0 + 18 * 2));
  CHECK(poly.deriv(2.0, 3) == doctest::Approx(18.0));
  CHECK(poly.deriv(2.0, 4) == doctest::Approx(0.0));

  SmoothFn mono = SmoothFn::monomial(2.0, -1.5);  // 2 u^{-3/2}
  double u = 0.7;
  CHECK(mono(u) == doctest::Approx(2 * std::pow(u, -1.5)).epsilon(1e-13));
  CHECK(mono.deriv(u, 1) ==
        doctest::Approx(-3.0 * std::pow(u, -2.5)).epsilon(1e-13));
  CHECK(mono.deriv(u, 2) ==
        doctest::Approx(7.5 * std::pow(u, -3.5)).epsilon(1e-13));
}

TEST_CASE("derivative_fn matches direct differentiation to high order") {
  SmoothFn f([](const Jet& u) { return exp(-u) * (u * u * u); });
  SmoothFn f2 = f.derivative_fn(2);
  // d2/du2 [u^3 e^-u] = (u^3 - 6u^2 + 6u) e^-u
  for (double u : {0.4, 1.3}) {
    double want = (u * u * u - 6 * u * u + 6 * u) * std::exp(-u);
    CHECK(f2(u) == doctest::Approx(want).epsilon(1e-12));
    // and one more derivative through derivative_fn
    double want3 = -(u * u * u - 9 * u * u + 18 * u - 6) * std::exp(-u);
    CHECK(f2.deriv(u, 1) == doctest::Approx(want3).epsilon(1e-12));
  }
}
