#include "displab/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "displab/errors.hpp"

namespace displab {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::ResolutionExhausted: return "resolution-exhausted";
    case RunStatus::BlowupSuspected: return "blowup-suspected";
  }
  return "unknown";
}

double energy(const ModelSpec& m, const RealField& u, double eps) {
  return m.energy_sign * functional_value(m.density, u, eps);
}

// ---------------------------------------------------------------------------
// ETDRK4
// ---------------------------------------------------------------------------

Etdrk4::Etdrk4(const ModelSpec& m, const PeriodicGrid& grid, double eps,
               double dt)
    : model_(m), grid_(grid), eps_(eps), dt_(dt) {
  if (!m.has_linear_part)
    throw Error("Etdrk4: model has no linear stiff part; use GaussIrk4");
  const int n = grid.size;
  e_.resize(n);
  e2_.resize(n);
  q_.resize(n);
  f1_.resize(n);
  f2_.resize(n);
  f3_.resize(n);

  constexpr int kContourPoints = 64;
  for (int j = 0; j < n; ++j) {
    const std::complex<double> L =
        m.linear_symbol(grid.wavenumber(grid.mode_of_slot(j)), eps);
    const std::complex<double> z = L * dt;
    e_[j] = std::exp(z);
    e2_[j] = std::exp(0.5 * z);

    // Contour averaging of the phi functions on |r - z| = 1 avoids the
    // cancellation for small |z|.
    std::complex<double> q{}, f1{}, f2{}, f3{};
    for (int p = 0; p < kContourPoints; ++p) {
      const double th =
          2.0 * std::numbers::pi * (p + 0.5) / kContourPoints;
      const std::complex<double> r = z + std::polar(1.0, th);
      const std::complex<double> er = std::exp(r);
      const std::complex<double> r2 = r * r, r3 = r2 * r;
      q += (std::exp(0.5 * r) - 1.0) / r;
      f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r2)) / r3;
      f2 += (2.0 + r + er * (-2.0 + r)) / r3;
      f3 += (-4.0 - 3.0 * r - r2 + er * (4.0 - r)) / r3;
    }
    const double w = dt / kContourPoints;
    q_[j] = q * w;
    f1_[j] = f1 * w;
    f2_[j] = f2 * w;
    f3_[j] = f3 * w;
  }
}

void Etdrk4::step(SpectralCoeffs& u_hat) const {
  const int n = grid_.size;
  SpectralCoeffs nv(grid_), na(grid_), nb(grid_), nc(grid_);
  SpectralCoeffs a(grid_), b(grid_), c(grid_);

  rhs_nonlinear_spectral(model_, u_hat, eps_, nv);
  auto uh = u_hat.coeffs();
  for (int j = 0; j < n; ++j)
    a.coeffs()[j] = e2_[j] * uh[j] + q_[j] * nv.coeffs()[j];
  rhs_nonlinear_spectral(model_, a, eps_, na);
  for (int j = 0; j < n; ++j)
    b.coeffs()[j] = e2_[j] * uh[j] + q_[j] * na.coeffs()[j];
  rhs_nonlinear_spectral(model_, b, eps_, nb);
  for (int j = 0; j < n; ++j)
    c.coeffs()[j] =
        e2_[j] * a.coeffs()[j] + q_[j] * (2.0 * nb.coeffs()[j] - nv.coeffs()[j]);
  rhs_nonlinear_spectral(model_, c, eps_, nc);
  for (int j = 0; j < n; ++j)
    uh[j] = e_[j] * uh[j] + f1_[j] * nv.coeffs()[j] +
            2.0 * f2_[j] * (na.coeffs()[j] + nb.coeffs()[j]) +
            f3_[j] * nc.coeffs()[j];
}

// ---------------------------------------------------------------------------
// Gauss-Legendre IRK4
// ---------------------------------------------------------------------------

namespace {

// Butcher data of the 2-stage Gauss scheme.
constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kA11 = 0.25, kA12 = 0.25 - kSqrt3 / 6.0;
constexpr double kA21 = 0.25 + kSqrt3 / 6.0, kA22 = 0.25;
constexpr double kB1 = 0.5, kB2 = 0.5;

}  // namespace

GaussIrk4::GaussIrk4(const ModelSpec& m, const PeriodicGrid& grid, double eps,
                     double dt, GaussIrk4Options opt)
    : model_(m), grid_(grid), eps_(eps), dt_(dt), opt_(opt) {}

void GaussIrk4::step(SpectralCoeffs& u_hat) const {
  const int n = grid_.size;
  const double h = dt_;

  // Effective diagonal symbol: the model's own linear part plus the
  // frozen-coefficient leading dispersive terms, used to make the stage
  // iteration implicit in the stiff directions.
  RealField u_phys = to_physical(u_hat);
  double u_mean = 0.0;
  for (double v : u_phys.values()) u_mean += v;
  u_mean /= n;

  std::vector<std::complex<double>> leff(n);
  {
    double b1m = model_.b1(u_mean);
    double a1 = model_.a.deriv(u_mean, 1);
    double a2 = model_.a.deriv(u_mean, 2);
    double cm = model_.c(u_mean);
    double pm = model_.p(u_mean);
    double coeff5 = 2.0 * pm * a1 + 0.6 * cm * cm * a2;
    const double e2 = eps_ * eps_, e4 = e2 * e2;
    for (int j = 0; j < n; ++j) {
      double k = grid_.wavenumber(grid_.mode_of_slot(j));
      std::complex<double> base =
          model_.linear_symbol(grid_.wavenumber(grid_.mode_of_slot(j)), eps_);
      if (!model_.has_linear_part) base = {0.0, 0.0};
      // -e2 b1 (ik)^3 - e4 coeff5 (ik)^5 frozen at the mean value
      std::complex<double> froz{
          0.0, e2 * b1m * k * k * k - e4 * coeff5 * k * k * k * k * k};
      leff[j] = model_.has_linear_part ? base : froz;
    }
  }

  // Stage unknowns g1, g2 (spectral).  Fixed-point iteration solving the
  // 2x2 diagonal-linear system exactly each sweep:
  //   (I - hA (x) Leff) g = 1 (x) u + hA (x) (F(g) - Leff g).
  SpectralCoeffs g1 = u_hat, g2 = u_hat;
  SpectralCoeffs f1(grid_), f2(grid_);
  std::vector<double> residuals;

  auto eval_f = [&](const SpectralCoeffs& g, SpectralCoeffs& out) {
    rhs_nonlinear_spectral(model_, g, eps_, out);
    if (model_.has_linear_part) {
      for (int j = 0; j < n; ++j) {
        double k = grid_.wavenumber(grid_.mode_of_slot(j));
        out.coeffs()[j] += model_.linear_symbol(k, eps_) * g.coeffs()[j];
      }
    }
  };

  const double scale = std::max(u_hat.max_abs(), 1.0);
  bool converged = false;
  for (int it = 0; it < opt_.max_newton; ++it) {
    eval_f(g1, f1);
    eval_f(g2, f2);
    double delta = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::complex<double> L = leff[j];
      const std::complex<double> uj = u_hat.coeffs()[j];
      // Explicit residual parts with the diagonal stiff piece moved left.
      const std::complex<double> r1 =
          uj + h * (kA11 * (f1.coeffs()[j] - L * g1.coeffs()[j]) +
                    kA12 * (f2.coeffs()[j] - L * g2.coeffs()[j]));
      const std::complex<double> r2 =
          uj + h * (kA21 * (f1.coeffs()[j] - L * g1.coeffs()[j]) +
                    kA22 * (f2.coeffs()[j] - L * g2.coeffs()[j]));
      // Solve (I - hL A) g_new = r for the 2x2 block of this mode.
      const std::complex<double> hl = h * L;
      const std::complex<double> m11 = 1.0 - hl * kA11, m12 = -hl * kA12;
      const std::complex<double> m21 = -hl * kA21, m22 = 1.0 - hl * kA22;
      const std::complex<double> det = m11 * m22 - m12 * m21;
      const std::complex<double> n1 = (m22 * r1 - m12 * r2) / det;
      const std::complex<double> n2 = (m11 * r2 - m21 * r1) / det;
      delta = std::max(delta, std::abs(n1 - g1.coeffs()[j]));
      delta = std::max(delta, std::abs(n2 - g2.coeffs()[j]));
      g1.coeffs()[j] = n1;
      g2.coeffs()[j] = n2;
    }
    residuals.push_back(delta / scale);
    if (delta / scale < opt_.newton_tol) {
      converged = true;
      break;
    }
    if (!std::isfinite(delta)) break;
  }
  if (!converged)
    throw NonconvergenceError("GaussIrk4: stage iteration did not converge",
                              residuals);

  eval_f(g1, f1);
  eval_f(g2, f2);
  for (int j = 0; j < n; ++j)
    u_hat.coeffs()[j] += h * (kB1 * f1.coeffs()[j] + kB2 * f2.coeffs()[j]);
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

namespace {

struct StepperBox {
  std::optional<Etdrk4> etd;
  std::optional<GaussIrk4> irk;
  double dt = 0.0;

  void rebuild(const ModelSpec& m, const PeriodicGrid& g, double eps,
               double dt_new, IntegratorKind kind, const GaussIrk4Options& o) {
    dt = dt_new;
    bool use_etd = kind == IntegratorKind::Etdrk4 ||
                   (kind == IntegratorKind::Auto && m.has_linear_part);
    if (use_etd) {
      etd.emplace(m, g, eps, dt_new);
      irk.reset();
    } else {
      irk.emplace(m, g, eps, dt_new, o);
      etd.reset();
    }
  }

  void step(SpectralCoeffs& u_hat) const {
    if (etd)
      etd->step(u_hat);
    else
      irk->step(u_hat);
  }
};

}  // namespace

RunRecord evolve(const ModelSpec& m, const RealField& u0, double eps,
                 const EvolveConfig& cfg) {
  if (!u0.finite()) throw InvalidFieldError("evolve: non-finite initial data");
  if (!(cfg.dt > 0.0)) throw Error("evolve: dt must be positive");

  RunRecord rec;
  const PeriodicGrid grid = u0.grid();
  rec.mass_initial = integrate(u0);
  const double mass_scale = std::max(std::abs(rec.mass_initial), 1e-12);

  const double e0 = energy(m, u0, eps);
  const double e_scale = std::max(std::abs(e0), 1e-30);

  // Snapshot schedule: strictly increasing, clipped to [0, t_end].
  std::vector<double> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  std::erase_if(snaps, [&](double t) { return t < 0.0 || t > cfg.t_end; });

  SpectralCoeffs u_hat = to_spectral(u0);
  double t = 0.0;

  auto record_state = [&](const RealField& u, double time) {
    double e = energy(m, u, eps);
    double drift = std::abs(e - e0) / e_scale;
    rec.energy.push_back({time, e, drift});
    rec.max_energy_drift = std::max(rec.max_energy_drift, drift);
    rec.linf_history.push_back({time, u.max_abs()});
    auto rep = resolution_ok(to_spectral(u), 0.1, 1e-8);
    rec.tail_history.push_back({time, rep.tail_max});
    double mass = integrate(u);
    rec.max_mass_drift = std::max(
        rec.max_mass_drift, std::abs(mass - rec.mass_initial) / mass_scale);
    rec.mass_final = mass;
    return rep.tail_max;
  };

  record_state(u0, 0.0);
  rec.snapshots.push_back({0.0, u0});
  size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) ++next_snap;

  StepperBox box;
  box.rebuild(m, grid, eps, cfg.dt, cfg.integrator, cfg.irk);

  long step_count = 0;
  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);

  while (t < cfg.t_end - t_eps) {
    double target = cfg.t_end;
    if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
    double dt_step = std::min(cfg.dt, target - t);
    if (dt_step < cfg.dt - t_eps) {
      // Final short step onto the snapshot time; rebuild propagators once.
      box.rebuild(m, grid, eps, dt_step, cfg.integrator, cfg.irk);
    } else if (box.dt != cfg.dt) {
      box.rebuild(m, grid, eps, cfg.dt, cfg.integrator, cfg.irk);
    }

    try {
      box.step(u_hat);
    } catch (const NonconvergenceError& e) {
      rec.status = RunStatus::BlowupSuspected;
      rec.status_detail = std::string("stage solve failed at t = ") +
                          std::to_string(t) + ": " + e.what();
      return rec;
    }
    t += box.dt;
    ++step_count;

    bool monitor_now = (step_count % cfg.monitor_stride == 0);
    bool snap_now =
        next_snap < snaps.size() && t >= snaps[next_snap] - t_eps;
    bool final_now = t >= cfg.t_end - t_eps;
    if (!monitor_now && !snap_now && !final_now) continue;

    RealField u = to_physical(u_hat);
    if (!u.finite()) {
      rec.status = RunStatus::BlowupSuspected;
      rec.status_detail =
          "non-finite values at t = " + std::to_string(t);
      return rec;
    }
    double tail = record_state(u, t);
    double linf = rec.linf_history.back().second;

    if (snap_now) {
      rec.snapshots.push_back({snaps[next_snap], u});
      ++next_snap;
    } else if (final_now) {
      rec.snapshots.push_back({t, u});
    }

    if (linf > cfg.blowup_linf || tail > cfg.blowup_tail) {
      rec.status = RunStatus::BlowupSuspected;
      rec.status_detail = "blowup suspected at t = " + std::to_string(t) +
                          " (linf = " + std::to_string(linf) +
                          ", tail = " + std::to_string(tail) + ")";
      return rec;
    }
    if (tail > cfg.resolution_error_level) {
      rec.status = RunStatus::ResolutionExhausted;
      rec.status_detail = "resolution exhausted at t = " + std::to_string(t) +
                          " (tail = " + std::to_string(tail) + ")";
      return rec;
    }
  }

  rec.status = RunStatus::Completed;
  rec.energy_flagged = rec.max_energy_drift > cfg.energy_drift_bound;
  return rec;
}

}  // namespace displab
