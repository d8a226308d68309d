#include <doctest.h>

#include <cmath>
#include <vector>

#include "displab/pi2.hpp"

using namespace displab;

TEST_CASE("leading cubic root: closed values and tails") {
  CHECK(cubic_leading(6.0, 0.0) ==
        doctest::Approx(-std::cbrt(36.0)).epsilon(1e-13));
  // X -> +inf at T = 0 is exactly the cube-root tail
  for (double X : {10.0, 1e3, 1e6})
    CHECK(cubic_leading(X, 0.0) ==
          doctest::Approx(-std::cbrt(6.0 * X)).epsilon(1e-12));
  // odd root continuation through the fold window
  CHECK(cubic_leading(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-13));
  // decreasing across the bridged window
  double prev = cubic_leading(-2.0, 1.0);
  for (double X = -1.9; X <= 2.0; X += 0.1) {
    double v = cubic_leading(X, 1.0);
    CHECK(v < prev + 1e-12);
    prev = v;
  }
  // continuity at the fold edges
  const double xstar = 2.0 * std::sqrt(2.0) / 3.0;
  for (double s : {-1.0, 1.0}) {
    double in = cubic_leading(s * (xstar - 1e-9), 1.0);
    double out = cubic_leading(s * (xstar + 1e-9), 1.0);
    CHECK(in == doctest::Approx(out).epsilon(1e-4));
  }
}

TEST_CASE("residual of the zero function is X itself") {
  std::vector<double> X = {-2.0, -1.0, 0.0, 1.5, 3.0};
  std::vector<double> Z(X.size(), 0.0);
  auto r = pi2_residual(X, Z, Z, Z, Z, 0.0);
  for (size_t i = 0; i < X.size(); ++i)
    CHECK(r[i] == doctest::Approx(X[i]));
}

TEST_CASE("cubic root satisfies the full equation up to the tail order") {
  // With U0 = -(6X)^{1/3} the only leftovers are the derivative terms,
  // which decay like X^{-4/3}.
  auto d = [](double X, int m) {
    // m-th derivative of -(6X)^{1/3}
    double c = -std::cbrt(6.0);
    double e = 1.0 / 3.0;
    double f = c;
    for (int i = 0; i < m; ++i) {
      f *= e - i;
    }
    return f * std::pow(X, e - m);
  };
  for (double X : {1e3, 1e4}) {
    std::vector<double> xs = {X};
    std::vector<double> U = {d(X, 0)}, Ux = {d(X, 1)}, Uxx = {d(X, 2)},
                        Uxxxx = {d(X, 4)};
    auto r = pi2_residual(xs, U, Ux, Uxx, Uxxxx, 0.0);
    CHECK(std::abs(r[0]) < 1.0 / X);
  }
  // and the decay is at least first order in 1/X
  auto residual_at = [&](double X) {
    std::vector<double> xs = {X}, U = {d(X, 0)}, Ux = {d(X, 1)},
                        Uxx = {d(X, 2)}, Uxxxx = {d(X, 4)};
    return pi2_residual(xs, U, Ux, Uxx, Uxxxx, 0.0)[0];
  };
  CHECK(std::abs(residual_at(1e3)) / std::abs(residual_at(1e4)) > 10.0);
}

TEST_CASE("solve at T = 0: residual, tails, anchor") {
  PI2SolveOptions opt;  // X_max = 400, 4096 nodes
  PI2Solution s = pi2_solve(0.0, opt);
  CHECK(s.residual_norm < 1e-8);

  // recompute the residual through the public FD path
  auto r = pi2_residual_fd(s.X, s.U, 0.0);
  double sup = 0.0;
  for (int i = 2; i <= s.n_nodes - 3; ++i)
    sup = std::max(sup, std::abs(r[i]));
  CHECK(sup < 1e-8);

  // boundary agreement with the tail expansion (imposed, so exact) and the
  // printed remainder scale
  CHECK(std::abs(s.U.back() + std::cbrt(6.0 * opt.X_max)) <
        5.0 * std::pow(opt.X_max, -5.0 / 3.0));

  // no poles: the smooth branch stays under the far-field envelope
  double umax = 0.0;
  for (double v : s.U) umax = std::max(umax, std::abs(v));
  CHECK(umax <= std::cbrt(6.0 * opt.X_max) + 1.0);

  // monotone decrease outside the central zone
  for (int i = 1; i < s.n_nodes; ++i) {
    if (std::abs(s.X[i]) < 10.0 || std::abs(s.X[i - 1]) < 10.0) continue;
    CHECK(s.U[i] < s.U[i - 1] + 1e-9);
  }

  // regression anchor from the first verified solve of this equation
  // (mesh-converged to ~1e-9 by the doubling test below)
  double u00 = 1e9;
  for (int i = 0; i < s.n_nodes; ++i)
    if (std::abs(s.X[i]) < 0.5 * (s.X[1] - s.X[0])) u00 = s.U[i];
  CHECK(u00 == doctest::Approx(-0.4151721).epsilon(1e-5));
}

TEST_CASE("solves on both sides of T = 0 meet the residual contract") {
  PI2SolveOptions opt;
  opt.n_nodes = 2048;
  for (double T : {0.5, -0.5}) {
    PI2Solution s = pi2_solve(T, opt);
    CHECK(s.residual_norm < 1e-8);
  }
}

TEST_CASE("mesh independence at T = 0") {
  PI2SolveOptions coarse;  // defaults: 16385 nodes
  PI2SolveOptions fine;
  fine.n_nodes = 32769;  // coarse nodes nest into the fine grid
  fine.tol = 1e-8;  // the h^-4 stencil round-off floor sits above 1e-10
  PI2Solution a = pi2_solve(0.0, coarse);
  PI2Solution b = pi2_solve(0.0, fine);
  double err = 0.0;
  for (int i = 0; i < a.n_nodes; ++i)
    err = std::max(err, std::abs(b.U[2 * i] - a.U[i]));
  CHECK(err < 1e-7);
}

TEST_CASE("domain independence at T = 0") {
  PI2SolveOptions base;  // X_max 400, 16385 nodes
  PI2SolveOptions wide;
  wide.X_max = 800.0;
  wide.n_nodes = 32769;  // same spacing; nodes coincide on |X| <= 400
  wide.tol = 1e-8;
  PI2Solution a = pi2_solve(0.0, base);
  PI2Solution b = pi2_solve(0.0, wide);
  const int off = (b.n_nodes - a.n_nodes) / 2;
  double err = 0.0;
  for (int i = 0; i < a.n_nodes; ++i) {
    if (std::abs(a.X[i]) > 200.0) continue;
    CHECK(b.X[off + i] == doctest::Approx(a.X[i]).epsilon(1e-12));
    err = std::max(err, std::abs(b.U[off + i] - a.U[i]));
  }
  CHECK(err < 1e-7);
}

TEST_CASE("tabulation: held-out T and the far-field splice") {
  PI2SolveOptions opt;
  opt.n_nodes = 2048;
  std::vector<double> Ts = {-1.0, -0.5, 0.0, 0.5, 1.0};
  auto rep = pi2_tabulate(Ts, opt, /*validate=*/true);
  REQUIRE(rep.validated);
  CHECK(rep.holdout_error < 1e-6);

  // single-T tabulation reduces to one solve
  auto rep1 = pi2_tabulate(std::vector<double>{0.0}, opt);
  CHECK(rep1.interpolator.solutions().size() == 1);
  CHECK_THROWS_AS(rep1.interpolator.eval(0.0, 0.3), OutOfWindowError);

  // continuity of the asymptotic fallback at the domain edge
  for (double T : {0.0, 0.5}) {
    double inside = rep.interpolator.eval(opt.X_max - 1e-9, T);
    double outside = rep.interpolator.eval(opt.X_max + 1e-9, T);
    CHECK(std::abs(inside - outside) < 1e-6);
  }
}

TEST_CASE("precondition guards") {
  PI2SolveOptions opt;
  opt.X_max = 50.0;
  CHECK_THROWS_AS(pi2_solve(0.0, opt), Error);
}
