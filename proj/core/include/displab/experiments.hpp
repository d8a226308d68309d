#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "displab/asymptotics.hpp"
#include "displab/diagnostics.hpp"
#include "displab/hamiltonian.hpp"
#include "displab/hopf.hpp"
#include "displab/io.hpp"
#include "displab/models.hpp"
#include "displab/pi2.hpp"
#include "displab/stepping.hpp"

namespace displab {

/// "genkdv:<n>" | "kawahara:<alpha>:<beta>" | "kdv2:<alpha>" |
/// "nldisp:<cspec>:<pspec>" with specs "zero" | "const:<v>" |
/// "mono:<coef>:<expnt>".
ModelSpec model_from_string(const std::string& spec);
IntegratorKind integrator_from_string(const std::string& s);

/// Number of sweep workers: DISPLAB_WORKERS or the hardware concurrency.
int worker_count();
/// Index-parallel loop over [0, n) on the worker pool; tasks own their
/// slots, so results are identical regardless of scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

/// Grid size for breakup-scale runs: grows like eps^{-6/7} from 2048 at
/// eps = 0.1, capped at 32768 (sizes 2^k and 3*2^k).
int choose_grid_size(double eps);
/// Fixed step from the explicit stability of the advection (and, for the
/// KdV-hierarchy family, the u-dependent third-derivative) terms.
double choose_dt(const ModelSpec& m, double eps, double L, int N,
                 double u_amp, double safety = 0.35);

/// sech^2 initial data sampled on the grid.
RealField sech2_field(const PeriodicGrid& grid);

struct SweepPoint {
  double eps = 0.0;
  int grid_size = 0;
  double dt = 0.0;
  double sup_diff = 0.0;  // meaning depends on the experiment
  RunStatus status = RunStatus::Completed;
  double energy_drift = 0.0;
  double mass_drift = 0.0;
  RealField final_state{PeriodicGrid(1.0, 16)};
  double t_final = 0.0;
};

struct ScalingExperiment {
  int n = 0;  // generalized KdV exponent
  CriticalPoint cp;
  std::vector<SweepPoint> points;  // sup|PDE - transport| at t_c
  FitResult fit;
};

/// Whole-domain PDE-vs-transport sup difference at the catastrophe time
/// across the eps sweep, with the log-log fit.
ScalingExperiment run_scaling_genkdv(int n, std::span<const double> eps_list,
                                     double L, double safety_override = 0.0);

struct UniversalityResult {
  double eps = 0.0;
  CriticalPoint cp;
  MultiscaleConstants mc;
  double window_halfwidth = 0.0;
  double hopf_err = 0.0;        // windowed sup |u_pde - u_transport|
  double multiscale_err = 0.0;  // windowed sup |u_pde - u_multiscale|
  RunStatus status = RunStatus::Completed;
  double energy_drift = 0.0;
  std::vector<double> xs, u_pde, u_hopf, u_ms;  // columns around x_c
};

/// Snapshot comparison at t_c inside the multiscale trust window.
UniversalityResult run_breakup_universality(const ModelSpec& m, double eps,
                                            const PI2Interpolator& tab,
                                            double L);

/// Windowed errors recomputed from an existing final state at t_c.
UniversalityResult universality_from_state(const ModelSpec& m, double eps,
                                           const RealField& u_at_tc,
                                           const PI2Interpolator& tab);

struct QuasitrivialityExperiment {
  std::vector<double> eps;
  std::vector<double> hopf_diff;   // sup over the whole domain
  std::vector<double> quasi_diff;  // sup over [window_lo, window_hi]
  FitResult hopf_fit, quasi_fit;
  std::vector<RunStatus> statuses;
  std::vector<double> energy_drifts, mass_drifts;
  double t = 0.0;
};

QuasitrivialityExperiment run_quasitriviality(const ModelSpec& m,
                                              std::span<const double> eps_list,
                                              double t, double window_lo,
                                              double window_hi, double L);

struct BlowupExperiment {
  RunRecord record;
  CriticalPoint cp;
  std::vector<double> snap_times;
  std::vector<double> linf_series;   // per snapshot
  std::vector<double> delta_series;  // fitted Fourier decay rates
  bool linf_growing_after_tc = false;
  bool delta_decreasing = false;
};

BlowupExperiment run_blowup(const ModelSpec& m, double eps, double t_end,
                            double L, int grid_size = 0, double dt = 0.0);

struct HamiltonianChecks {
  CoefficientReport kdv_report;
  CoefficientReport kawahara_report;
  double antisymmetry_violation = 0.0;
  double casimir_violation = 0.0;
  std::vector<double> family_slopes;     // order-4 commuting densities
  std::vector<double> extension_slopes;  // order-6 extension
  double c0_demo_slope = 0.0;  // beta-only densities at c = 0 (exploratory)
  bool obstruction_raised = false;
};

HamiltonianChecks run_hamiltonian_checks(std::uint64_t seed);

struct Kdv2Transition {
  std::vector<double> alphas;
  std::vector<RunRecord> records;
};

Kdv2Transition run_kdv2_transition(std::span<const double> alphas, double eps,
                                   double t_end, double L);

/// Catalog dispatcher: runs the named experiment and persists everything
/// under cfg.out_dir.  Returns the process exit code (0 complete, 2 partial).
int run_experiment(const RunConfig& cfg);

}  // namespace displab
