#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace displab {

/// Truncated Taylor series of a scalar function of one variable, used to
/// propagate analytic derivatives through model coefficient functions.
///
/// A Jet of order n carries coefficients c[0..n] of f(u0 + s) = sum c_k s^k,
/// so deriv(m) = m! * c[m].  Orders up to kMaxOrder are supported, which is
/// enough for the ninth derivative of the commuting-density generators plus
/// one more for Euler-Lagrange coefficient derivatives.
class Jet {
 public:
  static constexpr int kMaxOrder = 11;

  Jet() : n_(0) { c_[0] = 0.0; }

  static Jet constant(double v, int order) {
    Jet j(order);
    j.c_[0] = v;
    return j;
  }

  /// The identity function u evaluated at u0, carried to `order`.
  static Jet variable(double u0, int order) {
    Jet j(order);
    j.c_[0] = u0;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return n_; }
  double value() const { return c_[0]; }
  double coeff(int k) const { return k <= n_ ? c_[k] : 0.0; }

  double deriv(int m) const {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f * coeff(m);
  }

  /// Series of the derivative function f'(u0 + s), one order lower.
  Jet derivative_series() const {
    Jet r(n_ > 0 ? n_ - 1 : 0);
    for (int k = 0; k <= r.n_; ++k) r.c_[k] = (k + 1) * coeff(k + 1);
    if (n_ == 0) r.c_[0] = 0.0;
    return r;
  }

  /// Truncate (or zero-extend) to the given order.
  Jet to_order(int order) const {
    Jet r(order);
    for (int k = 0; k <= order; ++k) r.c_[k] = coeff(k);
    return r;
  }

  Jet operator-() const {
    Jet r(n_);
    for (int k = 0; k <= n_; ++k) r.c_[k] = -c_[k];
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r(std::max(a.n_, b.n_));
    for (int k = 0; k <= r.n_; ++k) r.c_[k] = a.coeff(k) + b.coeff(k);
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

  friend Jet operator*(const Jet& a, double s) {
    Jet r = a;
    for (int k = 0; k <= r.n_; ++k) r.c_[k] *= s;
    return r;
  }
  friend Jet operator*(double s, const Jet& a) { return a * s; }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(std::max(a.n_, b.n_));
    for (int k = 0; k <= r.n_; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a.coeff(j) * b.coeff(k - j);
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    assert(b.c_[0] != 0.0);
    Jet r(std::max(a.n_, b.n_));
    for (int k = 0; k <= r.n_; ++k) {
      double s = a.coeff(k);
      for (int j = 0; j < k; ++j) s -= r.c_[j] * b.coeff(k - j);
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }

  friend Jet operator/(double s, const Jet& b) {
    return Jet::constant(s, b.n_) / b;
  }

 private:
  explicit Jet(int order) : n_(order) {
    assert(order >= 0 && order <= kMaxOrder);
    c_.fill(0.0);
  }

  int n_;
  std::array<double, kMaxOrder + 1> c_;

  friend Jet exp(const Jet&);
  friend Jet log(const Jet&);
  friend Jet pow(const Jet&, double);
  friend Jet sin(const Jet&);
  friend Jet cos(const Jet&);
  friend Jet sinh(const Jet&);
  friend Jet cosh(const Jet&);
};

inline Jet exp(const Jet& g) {
  Jet f(g.n_);
  f.c_[0] = std::exp(g.c_[0]);
  for (int k = 1; k <= g.n_; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * g.coeff(j) * f.c_[k - j];
    f.c_[k] = s / k;
  }
  return f;
}

inline Jet log(const Jet& g) {
  assert(g.c_[0] > 0.0);
  Jet f(g.n_);
  f.c_[0] = std::log(g.c_[0]);
  for (int k = 1; k <= g.n_; ++k) {
    double s = k * g.coeff(k);
    for (int j = 1; j < k; ++j) s -= j * f.c_[j] * g.coeff(k - j);
    f.c_[k] = s / (k * g.c_[0]);
  }
  return f;
}

/// g(u)^a for real exponent a; requires g(u0) > 0 unless a is a small
/// nonnegative integer (handled by repeated multiplication).
inline Jet pow(const Jet& g, double a) {
  if (a == 0.0) return Jet::constant(1.0, g.n_);
  double ip;
  if (std::modf(a, &ip) == 0.0 && ip >= 1.0 && ip <= 16.0) {
    Jet r = g;
    for (int i = 1; i < static_cast<int>(ip); ++i) r = r * g;
    return r;
  }
  assert(g.c_[0] > 0.0);
  Jet f(g.n_);
  f.c_[0] = std::pow(g.c_[0], a);
  for (int k = 1; k <= g.n_; ++k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j)
      s += (a * (k - j) - j) * g.coeff(k - j) * f.c_[j];
    f.c_[k] = s / (k * g.c_[0]);
  }
  return f;
}

inline Jet sqrt(const Jet& g) { return pow(g, 0.5); }

/// Composition outer(inner): `outer` is a Taylor series around inner.value(),
/// composed with the fluctuation part of `inner` by Horner evaluation.
inline Jet compose(const Jet& outer, const Jet& inner) {
  const int n = inner.order();
  Jet dx = inner - inner.value();
  Jet r = Jet::constant(outer.coeff(n), n);
  for (int k = n - 1; k >= 0; --k) r = r * dx + outer.coeff(k);
  return r;
}

inline Jet sin(const Jet& g) {
  Jet s(g.n_), c(g.n_);
  s.c_[0] = std::sin(g.c_[0]);
  c.c_[0] = std::cos(g.c_[0]);
  for (int k = 1; k <= g.n_; ++k) {
    double as = 0.0, ac = 0.0;
    for (int j = 1; j <= k; ++j) {
      as += j * g.coeff(j) * c.c_[k - j];
      ac -= j * g.coeff(j) * s.c_[k - j];
    }
    s.c_[k] = as / k;
    c.c_[k] = ac / k;
  }
  return s;
}

inline Jet cos(const Jet& g) {
  Jet s(g.n_), c(g.n_);
  s.c_[0] = std::sin(g.c_[0]);
  c.c_[0] = std::cos(g.c_[0]);
  for (int k = 1; k <= g.n_; ++k) {
    double as = 0.0, ac = 0.0;
    for (int j = 1; j <= k; ++j) {
      as += j * g.coeff(j) * c.c_[k - j];
      ac -= j * g.coeff(j) * s.c_[k - j];
    }
    s.c_[k] = as / k;
    c.c_[k] = ac / k;
  }
  return c;
}

inline Jet sinh(const Jet& g) {
  Jet s(g.n_), c(g.n_);
  s.c_[0] = std::sinh(g.c_[0]);
  c.c_[0] = std::cosh(g.c_[0]);
  for (int k = 1; k <= g.n_; ++k) {
    double as = 0.0, ac = 0.0;
    for (int j = 1; j <= k; ++j) {
      as += j * g.coeff(j) * c.c_[k - j];
      ac += j * g.coeff(j) * s.c_[k - j];
    }
    s.c_[k] = as / k;
    c.c_[k] = ac / k;
  }
  return s;
}

inline Jet cosh(const Jet& g) {
  Jet s(g.n_), c(g.n_);
  s.c_[0] = std::sinh(g.c_[0]);
  c.c_[0] = std::cosh(g.c_[0]);
  for (int k = 1; k <= g.n_; ++k) {
    double as = 0.0, ac = 0.0;
    for (int j = 1; j <= k; ++j) {
      as += j * g.coeff(j) * c.c_[k - j];
      ac += j * g.coeff(j) * s.c_[k - j];
    }
    s.c_[k] = as / k;
    c.c_[k] = ac / k;
  }
  return c;
}

}  // namespace displab
