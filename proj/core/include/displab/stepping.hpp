#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "displab/grid.hpp"
#include "displab/models.hpp"

namespace displab {

struct EnergyRecord {
  double t = 0.0;
  double E = 0.0;
  double drift = 0.0;  // |E - E0| / max(|E0|, tiny), nonnegative
};

enum class RunStatus { Completed, ResolutionExhausted, BlowupSuspected };

std::string to_string(RunStatus s);

struct Snapshot {
  double t;
  RealField u;
};

/// Everything one evolve call produces; persisted by the io layer.
struct RunRecord {
  std::vector<Snapshot> snapshots;
  std::vector<EnergyRecord> energy;
  std::vector<std::pair<double, double>> linf_history;   // (t, max|u|)
  std::vector<std::pair<double, double>> tail_history;   // (t, relative tail)
  RunStatus status = RunStatus::Completed;
  std::string status_detail;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double max_energy_drift = 0.0;
  double max_mass_drift = 0.0;
  bool energy_flagged = false;  // drift above the acceptance bound
  std::map<std::string, std::string> metadata;
};

/// Monitored Hamiltonian value (sign convention per model.energy_sign).
double energy(const ModelSpec& m, const RealField& u, double eps);

/// Four-stage exponential time differencing integrator for models whose
/// stiff part is linear-diagonal in Fourier space.  The phi-coefficient
/// tables are contour averages over 64 points on a unit circle around each
/// L*dt value and are rebuilt whenever (dt, eps, model, grid) change.
class Etdrk4 {
 public:
  Etdrk4(const ModelSpec& m, const PeriodicGrid& grid, double eps, double dt);

  void step(SpectralCoeffs& u_hat) const;
  double dt() const { return dt_; }

 private:
  const ModelSpec& model_;
  PeriodicGrid grid_;
  double eps_, dt_;
  std::vector<std::complex<double>> e_, e2_, q_, f1_, f2_, f3_;
};

struct GaussIrk4Options {
  double newton_tol = 1e-12;
  int max_newton = 50;
};

/// Two-stage Gauss-Legendre (Hammer-Hollingsworth) step of order 4 on the
/// spectral coefficients.  Stage equations are solved by fixed-point
/// iteration that treats the constant-coefficient stiff part implicitly;
/// when that stalls, a frozen-coefficient diagonal Newton update takes over.
class GaussIrk4 {
 public:
  GaussIrk4(const ModelSpec& m, const PeriodicGrid& grid, double eps,
            double dt, GaussIrk4Options opt = {});

  void step(SpectralCoeffs& u_hat) const;
  double dt() const { return dt_; }

 private:
  const ModelSpec& model_;
  PeriodicGrid grid_;
  double eps_, dt_;
  GaussIrk4Options opt_;
};

enum class IntegratorKind { Auto, Etdrk4, GaussIrk4 };

struct EvolveConfig {
  double dt = 1e-4;
  double t_end = 0.0;
  std::vector<double> snapshot_times;  // landed on exactly via short steps
  IntegratorKind integrator = IntegratorKind::Auto;
  int monitor_stride = 16;             // steps between history samples
  double resolution_error_level = 1e-4;
  double blowup_linf = 1e6;
  double blowup_tail = 1e-2;
  double energy_drift_bound = 1e-6;
  GaussIrk4Options irk;
};

/// Advance u0 to t_end recording snapshots, energy / L-inf / spectral-tail
/// histories.  Aborts cleanly (partial record, status set) when resolution
/// is exhausted or a blowup is suspected; never returns silent NaNs.
RunRecord evolve(const ModelSpec& m, const RealField& u0, double eps,
                 const EvolveConfig& cfg);

}  // namespace displab
