#include "displab/pi2.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace displab {

namespace {

// Fornberg finite-difference weights: weights[j] multiplies samples at
// xs[j] to approximate the m-th derivative at x0.
std::vector<double> fd_weights(double x0, std::span<const double> xs, int m) {
  const int n = static_cast<int>(xs.size());
  std::vector<double> C(n * (m + 1), 0.0);
  auto at = [&](int i, int k) -> double& { return C[i * (m + 1) + k]; };
  double c1 = 1.0, c4 = xs[0] - x0;
  at(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
        at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
      at(j, 0) = c4 * at(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = at(j, m);
  return w;
}

// Per-node stencils of fixed width on a uniform grid, one-sided near the
// boundaries, for derivative orders 1, 2 and 4.
class Stencils {
 public:
  Stencils(int n, double x0, double h, int width = 13)
      : n_(n), w_(std::min(width, n)) {
    w1_.resize(n_ * w_);
    w2_.resize(n_ * w_);
    w4_.resize(n_ * w_);
    start_.resize(n_);
    std::vector<double> xs(w_);
    for (int i = 0; i < n_; ++i) {
      int s = std::clamp(i - w_ / 2, 0, n_ - w_);
      start_[i] = s;
      for (int j = 0; j < w_; ++j) xs[j] = x0 + (s + j) * h;
      double xi = x0 + i * h;
      auto a1 = fd_weights(xi, xs, 1);
      auto a2 = fd_weights(xi, xs, 2);
      auto a4 = fd_weights(xi, xs, 4);
      for (int j = 0; j < w_; ++j) {
        w1_[i * w_ + j] = a1[j];
        w2_[i * w_ + j] = a2[j];
        w4_[i * w_ + j] = a4[j];
      }
    }
  }

  int width() const { return w_; }
  int start(int i) const { return start_[i]; }
  const double* w1(int i) const { return &w1_[i * w_]; }
  const double* w2(int i) const { return &w2_[i * w_]; }
  const double* w4(int i) const { return &w4_[i * w_]; }

  std::vector<double> apply(std::span<const double> U, int order) const {
    std::vector<double> out(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      const double* w = order == 1 ? w1(i) : order == 2 ? w2(i) : w4(i);
      double s = 0.0;
      for (int j = 0; j < w_; ++j) s += w[j] * U[start_[i] + j];
      out[i] = s;
    }
    return out;
  }

 private:
  int n_, w_;
  std::vector<double> w1_, w2_, w4_;
  std::vector<int> start_;
};

double cbrt_safe(double v) { return std::cbrt(v); }

}  // namespace

std::vector<double> pi2_residual(std::span<const double> X,
                                 std::span<const double> U,
                                 std::span<const double> Ux,
                                 std::span<const double> Uxx,
                                 std::span<const double> Uxxxx, double T) {
  const size_t n = X.size();
  std::vector<double> r(n);
  for (size_t i = 0; i < n; ++i)
    r[i] = X[i] - T * U[i] + U[i] * U[i] * U[i] / 6.0 +
           Ux[i] * Ux[i] / 24.0 + U[i] * Uxx[i] / 12.0 + Uxxxx[i] / 240.0;
  return r;
}

std::vector<double> pi2_residual_fd(std::span<const double> X,
                                    std::span<const double> U, double T) {
  const int n = static_cast<int>(X.size());
  if (n < 13) throw Error("pi2_residual_fd: need at least 13 nodes");
  const double h = X[1] - X[0];
  Stencils st(n, X[0], h);
  auto Ux = st.apply(U, 1);
  auto Uxx = st.apply(U, 2);
  auto Uxxxx = st.apply(U, 4);
  return pi2_residual(X, U, Ux, Uxx, Uxxxx, T);
}

double cubic_leading(double X, double T) {
  // Roots of U^3 - 6 T U + 6 X = 0.
  if (T > 0.0) {
    const double xstar = 2.0 * std::sqrt(2.0) / 3.0 * std::pow(T, 1.5);
    if (std::abs(X) < xstar) {
      // Monotone Hermite bridge between the outer branches across the fold.
      const double u0 = 2.0 * std::sqrt(2.0 * T);   // value at X = -xstar
      const double m = -1.0 / (3.0 * T);            // slope at both ends
      const double s = (X + xstar) / (2.0 * xstar);
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
      const double h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s);
      const double h11 = s * s * (s - 1);
      return h00 * u0 + h10 * (2.0 * xstar) * m + h01 * (-u0) +
             h11 * (2.0 * xstar) * m;
    }
  }
  // Single real root by Cardano on the depressed cubic (p = -6T, q = 6X).
  const double p = -6.0 * T, q = 6.0 * X;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    return cbrt_safe(-0.5 * q + sq) + cbrt_safe(-0.5 * q - sq);
  }
  // Three real roots just outside the bridged window (round-off): pick the
  // branch continuing the tails via the trigonometric form.
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double phi = std::acos(std::clamp(
      3.0 * q / (p * r), -1.0, 1.0));
  // Roots r cos((phi - 2 pi k)/3); the tail branch is the one with sign
  // opposite to X and largest magnitude.
  double best = 0.0;
  for (int k = 0; k < 3; ++k) {
    double root =
        r * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0);
    if (k == 0 || root * X < best * X) best = root;
  }
  return best;
}

double pi2_asymptotic(double X, double T) {
  return -cbrt_safe(6.0 * X) - std::pow(2.0, 2.0 / 3.0) * T / cbrt_safe(3.0 * X);
}

double pi2_asymptotic_dx(double X, double T) {
  const double c6 = cbrt_safe(6.0 * X);
  const double c3 = cbrt_safe(3.0 * X);
  return -2.0 / (c6 * c6) +
         std::pow(2.0, 2.0 / 3.0) * T / (c3 * c3 * c3 * c3);
}

namespace {

struct NewtonSystem {
  int n;
  double h;
  std::vector<double> X;
  const Stencils* st;
  double T;
  double bcl, bcl_dx, bcr, bcr_dx;

  // Full residual: value/slope boundary rows at 0, 1, n-2, n-1 and the ODE
  // at interior nodes.
  std::vector<double> residual(std::span<const double> U,
                               double* interior_sup = nullptr) const {
    auto Ux = st->apply(U, 1);
    auto Uxx = st->apply(U, 2);
    auto Uxxxx = st->apply(U, 4);
    std::vector<double> F(n);
    F[0] = U[0] - bcl;
    F[1] = Ux[0] - bcl_dx;
    F[n - 2] = Ux[n - 1] - bcr_dx;
    F[n - 1] = U[n - 1] - bcr;
    double sup = 0.0;
    for (int i = 2; i <= n - 3; ++i) {
      double r = X[i] - T * U[i] + U[i] * U[i] * U[i] / 6.0 +
                 Ux[i] * Ux[i] / 24.0 + U[i] * Uxx[i] / 12.0 +
                 Uxxxx[i] / 240.0;
      F[i] = r;
      sup = std::max(sup, std::abs(r));
    }
    if (interior_sup) *interior_sup = sup;
    return F;
  }

  Eigen::SparseMatrix<double> jacobian(std::span<const double> U) const {
    auto Ux = st->apply(U, 1);
    auto Uxx = st->apply(U, 2);
    const int w = st->width();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * w);
    trip.emplace_back(0, 0, 1.0);
    trip.emplace_back(n - 1, n - 1, 1.0);
    for (int j = 0; j < w; ++j) {
      trip.emplace_back(1, st->start(0) + j, st->w1(0)[j]);
      trip.emplace_back(n - 2, st->start(n - 1) + j, st->w1(n - 1)[j]);
    }
    for (int i = 2; i <= n - 3; ++i) {
      const int s = st->start(i);
      for (int j = 0; j < w; ++j) {
        double v = Ux[i] / 12.0 * st->w1(i)[j] + U[i] / 12.0 * st->w2(i)[j] +
                   st->w4(i)[j] / 240.0;
        if (s + j == i) v += -T + 0.5 * U[i] * U[i] + Uxx[i] / 12.0;
        trip.emplace_back(i, s + j, v);
      }
    }
    Eigen::SparseMatrix<double> J(n, n);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }
};

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// One damped-Newton solve at fixed T from the given initial guess.
PI2Solution newton_solve(double T, const PI2SolveOptions& opt,
                         std::vector<double> U) {
  const int n = opt.n_nodes;
  const double h = 2.0 * opt.X_max / (n - 1);
  std::vector<double> X(n);
  for (int i = 0; i < n; ++i) X[i] = -opt.X_max + i * h;
  static thread_local std::unique_ptr<Stencils> cached;
  static thread_local int cached_n = 0;
  static thread_local double cached_h = 0.0, cached_x0 = 0.0;
  if (!cached || cached_n != n || cached_h != h || cached_x0 != X[0]) {
    cached = std::make_unique<Stencils>(n, X[0], h);
    cached_n = n;
    cached_h = h;
    cached_x0 = X[0];
  }

  NewtonSystem sys{n,
                   h,
                   X,
                   cached.get(),
                   T,
                   pi2_asymptotic(-opt.X_max, T),
                   pi2_asymptotic_dx(-opt.X_max, T),
                   pi2_asymptotic(opt.X_max, T),
                   pi2_asymptotic_dx(opt.X_max, T)};

  std::vector<double> damping_trace;
  double sup = 0.0;
  int iters = 0;
  for (; iters < opt.max_newton; ++iters) {
    std::vector<double> F = sys.residual(U, &sup);
    if (sup < opt.tol && std::abs(F[0]) < 1e-12 && std::abs(F[n - 1]) < 1e-12)
      break;
    double f0 = norm2(F);

    Eigen::SparseMatrix<double> J = sys.jacobian(U);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw NonconvergenceError("pi2_solve: singular Jacobian",
                                damping_trace);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -F[i];
    Eigen::VectorXd dU = lu.solve(rhs);

    // Armijo backtracking on the residual 2-norm.
    double lam = 1.0;
    std::vector<double> Utry(n);
    bool accepted = false;
    while (lam >= std::ldexp(1.0, -20)) {
      for (int i = 0; i < n; ++i) Utry[i] = U[i] + lam * dU[i];
      double f1 = norm2(sys.residual(Utry));
      if (f1 <= (1.0 - 1e-4 * lam) * f0) {
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    damping_trace.push_back(lam);
    if (!accepted) {
      // No descent left: either the residual sits on the round-off floor
      // of the fourth-derivative stencils (a plateau) or Newton diverged.
      sys.residual(U, &sup);
      if (sup < 1e-6)
        throw AccuracyError("pi2_solve: residual plateau above tolerance",
                            sup);
      throw NonconvergenceError(
          "pi2_solve: Newton line search stalled (divergence)",
          damping_trace);
    }
    U = Utry;
  }
  if (iters == opt.max_newton) {
    sys.residual(U, &sup);
    if (sup >= opt.tol)
      throw AccuracyError("pi2_solve: residual plateau above tolerance", sup);
  }

  PI2Solution sol;
  sol.T = T;
  sol.X = std::move(X);
  sol.U = std::move(U);
  sol.X_max = opt.X_max;
  sol.n_nodes = n;
  sol.residual_norm = sup;
  sol.newton_iterations = iters;
  return sol;
}

}  // namespace

namespace {

// Evaluate a solved profile at the nodes of a finer grid (4-point
// Lagrange); the prolonged guess is smooth enough for undamped Newton.
std::vector<double> prolong(const PI2Solution& s, int n_fine, double X_max) {
  std::vector<double> out(n_fine);
  const double h = 2.0 * X_max / (n_fine - 1);
  const double hc = s.X[1] - s.X[0];
  for (int i = 0; i < n_fine; ++i) {
    double X = -X_max + i * h;
    int j = static_cast<int>(std::floor((X - s.X[0]) / hc));
    int lo = std::clamp(j - 1, 0, s.n_nodes - 4);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      double li = 1.0;
      for (int b = 0; b < 4; ++b) {
        if (a == b) continue;
        li *= (X - s.X[lo + b]) / (s.X[lo + a] - s.X[lo + b]);
      }
      acc += li * s.U[lo + a];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

PI2Solution pi2_solve(double T, const PI2SolveOptions& opt) {
  if (opt.X_max < 100.0) throw Error("pi2_solve: X_max must be >= 100");
  if (opt.n_nodes < 64) throw Error("pi2_solve: too few nodes");

  // Continuation path in T: direct for |T| <= 0.5, otherwise steps of at
  // most continuation_step starting from 0.5 * sign(T).
  std::vector<double> path;
  if (std::abs(T) <= 0.5) {
    path.push_back(T);
  } else {
    double s = T > 0 ? 1.0 : -1.0;
    double cur = 0.5 * s;
    path.push_back(cur);
    while (std::abs(T - cur) > 1e-12) {
      double step = std::min(opt.continuation_step, std::abs(T - cur));
      cur += s * step;
      path.push_back(cur);
    }
  }

  // Nested iteration on the first waypoint: the leading-order guess is
  // only safe to linearize around on coarse grids.
  std::vector<int> levels;
  for (int n = opt.n_nodes; n >= 600; n = (n - 1) / 2 + 1) levels.push_back(n);
  std::reverse(levels.begin(), levels.end());

  PI2Solution sol;
  {
    PI2SolveOptions lopt = opt;
    lopt.n_nodes = levels.front();
    const double h0 = 2.0 * opt.X_max / (lopt.n_nodes - 1);
    std::vector<double> U0(lopt.n_nodes);
    for (int i = 0; i < lopt.n_nodes; ++i)
      U0[i] = cubic_leading(-opt.X_max + i * h0, path.front());
    sol = newton_solve(path.front(), lopt, std::move(U0));
    for (size_t l = 1; l < levels.size(); ++l) {
      lopt.n_nodes = levels[l];
      sol = newton_solve(path.front(), lopt,
                         prolong(sol, levels[l], opt.X_max));
    }
  }
  for (size_t i = 1; i < path.size(); ++i)
    sol = newton_solve(path[i], opt, sol.U);
  return sol;
}

// ---------------------------------------------------------------------------
// Tabulation / interpolation
// ---------------------------------------------------------------------------

PI2Interpolator::PI2Interpolator(std::vector<PI2Solution> solutions)
    : sols_(std::move(solutions)) {
  if (sols_.empty()) throw Error("PI2Interpolator: no solutions");
  std::sort(sols_.begin(), sols_.end(),
            [](const auto& a, const auto& b) { return a.T < b.T; });
  for (size_t i = 0; i + 1 < sols_.size(); ++i) {
    if (sols_[i].n_nodes != sols_[i + 1].n_nodes ||
        sols_[i].X_max != sols_[i + 1].X_max)
      throw Error("PI2Interpolator: inconsistent grids across T");
  }
  x_max_ = sols_.front().X_max;
  t_min_ = sols_.front().T;
  t_max_ = sols_.back().T;
}

namespace {

// Cubic Lagrange on up to 4 consecutive samples (fewer near edges / short
// tables); abscissae need not be uniform.
double lagrange_interp(std::span<const double> xs, std::span<const double> ys,
                       double x) {
  const int n = static_cast<int>(xs.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double li = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      li *= (x - xs[j]) / (xs[i] - xs[j]);
    }
    acc += li * ys[i];
  }
  return acc;
}

double eval_in_x(const PI2Solution& s, double X) {
  const int n = s.n_nodes;
  const double h = s.X[1] - s.X[0];
  int j = static_cast<int>(std::floor((X - s.X[0]) / h));
  int lo = std::clamp(j - 1, 0, n - 4);
  return lagrange_interp(std::span(&s.X[lo], 4), std::span(&s.U[lo], 4), X);
}

}  // namespace

double PI2Interpolator::eval(double X, double T) const {
  if (std::abs(X) > x_max_) return pi2_asymptotic(X, T);

  const int nt = static_cast<int>(sols_.size());
  if (nt == 1) {
    if (std::abs(T - sols_[0].T) > 1e-9)
      throw OutOfWindowError("PI2Interpolator: single-T table, T = " +
                             std::to_string(sols_[0].T));
    return eval_in_x(sols_[0], X);
  }
  const double pad = 1e-9 * std::max(1.0, std::abs(t_max_));
  if (T < t_min_ - pad || T > t_max_ + pad)
    throw OutOfWindowError("PI2Interpolator: T outside tabulated range");

  int j = 0;
  while (j + 1 < nt && sols_[j + 1].T < T) ++j;
  int lo = std::clamp(j - 1, 0, std::max(0, nt - 4));
  int m = std::min(4, nt - lo);
  std::vector<double> ts(m), us(m);
  for (int i = 0; i < m; ++i) {
    ts[i] = sols_[lo + i].T;
    us[i] = eval_in_x(sols_[lo + i], X);
  }
  return lagrange_interp(ts, us, T);
}

PI2TabulateReport pi2_tabulate(std::span<const double> T_values,
                               const PI2SolveOptions& opt, bool validate) {
  if (T_values.empty()) throw Error("pi2_tabulate: empty T list");
  std::vector<PI2Solution> sols;
  for (double T : T_values) sols.push_back(pi2_solve(T, opt));

  PI2TabulateReport rep;
  rep.interpolator = PI2Interpolator(std::move(sols));

  if (validate && T_values.size() >= 2) {
    const auto& ss = rep.interpolator.solutions();
    size_t mid = ss.size() / 2 - (ss.size() % 2 == 0 ? 1 : 0);
    double Th = 0.5 * (ss[mid].T + ss[mid + 1].T);
    PI2Solution direct = pi2_solve(Th, opt);
    double err = 0.0;
    for (int i = 0; i < direct.n_nodes; ++i)
      err = std::max(err, std::abs(rep.interpolator.eval(direct.X[i], Th) -
                                   direct.U[i]));
    rep.holdout_error = err;
    rep.validated = true;
  }
  return rep;
}

}  // namespace displab
