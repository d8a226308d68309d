#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "displab/jet.hpp"

namespace displab {

/// A scalar function u -> f(u) together with all of its derivatives,
/// represented as a callable on truncated Taylor series.  Models hand these
/// around instead of plain std::function so that solvers can request exact
/// derivatives of any order up to Jet::kMaxOrder.
class SmoothFn {
 public:
  using JetFn = std::function<Jet(const Jet&)>;

  SmoothFn() = default;
  explicit SmoothFn(JetFn f) : f_(std::make_shared<JetFn>(std::move(f))) {}

  bool valid() const { return static_cast<bool>(f_); }

  double operator()(double u) const {
    return (*f_)(Jet::variable(u, 0)).value();
  }

  Jet operator()(const Jet& u) const { return (*f_)(u); }

  /// m-th derivative at u.
  double deriv(double u, int m) const {
    return (*f_)(Jet::variable(u, m)).deriv(m);
  }

  /// Value and derivatives 1..max_m, as a vector of length max_m + 1.
  std::vector<double> derivs(double u, int max_m) const {
    Jet j = (*f_)(Jet::variable(u, max_m));
    std::vector<double> out(max_m + 1);
    for (int m = 0; m <= max_m; ++m) out[m] = j.deriv(m);
    return out;
  }

  /// The k-th derivative as a SmoothFn in its own right.  Correct under
  /// composition: the Taylor series of f^(k) around the argument's value is
  /// composed with the argument series.
  SmoothFn derivative_fn(int k) const {
    auto base = f_;
    return SmoothFn([base, k](const Jet& u) {
      const int n = u.order();
      Jet tay =
          (*base)(Jet::variable(u.value(), std::min(n + k, Jet::kMaxOrder)));
      for (int i = 0; i < k; ++i) tay = tay.derivative_series();
      return compose(tay.to_order(n), u);
    });
  }

  /// f and its first nd derivatives evaluated at the jet u (each one a jet
  /// of the same order as u).
  std::vector<Jet> derivative_jets(const Jet& u, int nd) const {
    const int n = u.order();
    Jet tay = (*f_)(Jet::variable(u.value(), std::min(n + nd, Jet::kMaxOrder)));
    std::vector<Jet> out;
    out.reserve(nd + 1);
    Jet cur = tay;
    for (int k = 0; k <= nd; ++k) {
      out.push_back(compose(cur.to_order(n), u));
      cur = cur.derivative_series();
    }
    return out;
  }

  static SmoothFn zero() {
    return SmoothFn([](const Jet& u) { return Jet::constant(0.0, u.order()); });
  }

  static SmoothFn constant(double v) {
    return SmoothFn([v](const Jet& u) { return Jet::constant(v, u.order()); });
  }

  static SmoothFn identity() {
    return SmoothFn([](const Jet& u) { return u; });
  }

  /// c0 + c1 u + c2 u^2 + ...
  static SmoothFn polynomial(std::vector<double> coeffs) {
    return SmoothFn([c = std::move(coeffs)](const Jet& u) {
      Jet r = Jet::constant(0.0, u.order());
      for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * u + *it;
      return r;
    });
  }

  /// coef * u^expnt for real exponent (u > 0 unless expnt is a small
  /// nonnegative integer).
  static SmoothFn monomial(double coef, double expnt) {
    return SmoothFn(
        [coef, expnt](const Jet& u) { return coef * pow(u, expnt); });
  }

  friend SmoothFn operator+(const SmoothFn& a, const SmoothFn& b) {
    auto fa = a.f_, fb = b.f_;
    return SmoothFn([fa, fb](const Jet& u) { return (*fa)(u) + (*fb)(u); });
  }
  friend SmoothFn operator-(const SmoothFn& a, const SmoothFn& b) {
    auto fa = a.f_, fb = b.f_;
    return SmoothFn([fa, fb](const Jet& u) { return (*fa)(u) - (*fb)(u); });
  }
  friend SmoothFn operator*(const SmoothFn& a, const SmoothFn& b) {
    auto fa = a.f_, fb = b.f_;
    return SmoothFn([fa, fb](const Jet& u) { return (*fa)(u) * (*fb)(u); });
  }
  friend SmoothFn operator*(double s, const SmoothFn& a) {
    auto fa = a.f_;
    return SmoothFn([fa, s](const Jet& u) { return s * (*fa)(u); });
  }

 private:
  std::shared_ptr<JetFn> f_;
};

}  // namespace displab
