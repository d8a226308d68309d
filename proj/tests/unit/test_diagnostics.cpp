#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "displab/diagnostics.hpp"

using namespace displab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("loglog_fit on exact power laws") {
  std::vector<double> eps, err2, err27;
  for (int i = 0; i < 7; ++i) {
    double e = std::pow(10.0, -1.0 - 0.25 * i);
    eps.push_back(e);
    err2.push_back(3.7 * e * e);
    err27.push_back(0.9 * std::pow(e, 2.0 / 7.0));
  }
  FitResult f2 = loglog_fit(eps, err2);
  CHECK(f2.slope == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f2.r == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f2.sigma < 1e-10);
  FitResult f27 = loglog_fit(eps, err27);
  CHECK(f27.slope == doctest::Approx(2.0 / 7.0).epsilon(1e-10));

  err2[3] = -1.0;
  CHECK_THROWS_AS(loglog_fit(eps, err2), Error);
}

TEST_CASE("windowed_sup_diff picks the bump inside the window") {
  PeriodicGrid g(8.0, 64);
  RealField f(g), h(g);
  for (int j = 0; j < g.size; ++j) {
    double x = g.node(j);
    h[j] = 0.25 * std::exp(-(x - 1.0) * (x - 1.0));
    f[j] = 0.0;
  }
  CHECK(windowed_sup_diff(f, f, -2.0, 2.0) == 0.0);
  double m = windowed_sup_diff(f, h, 0.0, 2.0);
  CHECK(m == doctest::Approx(0.25).epsilon(1e-3));
  CHECK_THROWS_AS(windowed_sup_diff(f, h, 2.0, 1.0), Error);
}

TEST_CASE("fourier_decay_fit recovers a planted model") {
  PeriodicGrid g(8.0 * kPi, 1024);
  SpectralCoeffs c(g);
  const double mu = 1.0, delta = 0.5, C = 2.0;
  for (int j = 0; j < g.size; ++j) {
    int m = g.mode_of_slot(j);
    if (m == 0) continue;
    double k = std::abs(g.wavenumber(m));
    double mag = C * std::pow(k, -(mu + 1.0)) * std::exp(-delta * k);
    c.coeffs()[j] = mag;
  }
  auto fit = fourier_decay_fit(c, 1.0, 40.0);
  CHECK(fit.mu == doctest::Approx(mu).epsilon(0.02));
  CHECK(fit.delta == doctest::Approx(delta).epsilon(0.01));
  CHECK_FALSE(fit.multi_singularity);

  // 1% multiplicative noise: still within 2%
  std::mt19937_64 rng(7);
  std::normal_distribution<double> pert(0.0, 0.01);
  for (auto& z : c.coeffs()) z *= (1.0 + pert(rng));
  auto fit2 = fourier_decay_fit(c, 1.0, 40.0);
  CHECK(fit2.mu == doctest::Approx(mu).epsilon(0.02));
  CHECK(fit2.delta == doctest::Approx(delta).epsilon(0.02));
}

TEST_CASE("sech^2 spectrum decays with the pole strip half-width") {
  PeriodicGrid g(8.0 * kPi, 1024);
  RealField f(g);
  for (int j = 0; j < g.size; ++j) {
    double ch = std::cosh(g.node(j));
    f[j] = 1.0 / (ch * ch);
  }
  SpectralCoeffs c = to_spectral(f);
  auto fit = fourier_decay_fit(c, 1.2, 20.0);
  CHECK(fit.delta == doctest::Approx(kPi / 2.0).epsilon(0.05));
}

TEST_CASE("monotone growth detector") {
  std::vector<double> up = {1, 2, 3, 4, 5};
  std::vector<double> wig = {1, 2, 1.5, 4, 5};
  CHECK(monotone_tail_growth(up, 4));
  CHECK_FALSE(monotone_tail_growth(wig, 4));
  CHECK(monotone_tail_growth(wig, 2));
}
