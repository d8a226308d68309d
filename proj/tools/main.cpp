// Command-line front end: one subcommand per catalog entry plus direct
// access to the transport, PI2 and multiscale constructions.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "displab/experiments.hpp"

namespace fs = std::filesystem;
using namespace displab;

namespace {

struct CliState {
  RunConfig cfg;
  std::string config_file;
};

void add_common(CLI::App* cmd, CliState& st) {
  cmd->add_option("--model", st.cfg.model,
                  "model spec: genkdv:<n> | kawahara:<a>:<b> | kdv2:<a> | "
                  "nldisp:<cspec>;<pspec>");
  cmd->add_option("--eps", st.cfg.eps, "dispersion parameter");
  cmd->add_option("--eps-list", st.cfg.eps_list, "sweep values");
  cmd->add_option("--half-width,-L", st.cfg.domain_half_width,
                  "domain half-width L");
  cmd->add_option("--grid-size,-N", st.cfg.grid_size,
                  "grid size (0 = experiment default)");
  cmd->add_option("--dt", st.cfg.dt, "time step (0 = experiment default)");
  cmd->add_option("--t-end", st.cfg.t_end, "final time (<0 = default)");
  cmd->add_option("--snapshots", st.cfg.snapshot_times, "snapshot times");
  cmd->add_option("--integrator", st.cfg.integrator, "auto | etdrk4 | irk4");
  cmd->add_option("--window-lo", st.cfg.window_lo, "comparison window start");
  cmd->add_option("--window-hi", st.cfg.window_hi, "comparison window end");
  cmd->add_option("--seed", st.cfg.seed, "random seed for property checks");
  cmd->add_option("--out,-o", st.cfg.out_dir, "output directory");
  cmd->add_option("--config", st.config_file,
                  "key = value file; overrides any flags");
}

// The config file wins over flags by design: flags give quick defaults,
// the file is the reproducible record.
void finalize(CliState& st) {
  if (!st.config_file.empty())
    st.cfg.apply_kv(parse_kv_file(st.config_file));
}

int do_evolve(CliState& st) {
  finalize(st);
  ModelSpec m = model_from_string(st.cfg.model);
  const double L = st.cfg.domain_half_width;
  const int N = st.cfg.grid_size > 0 ? st.cfg.grid_size
                                     : choose_grid_size(st.cfg.eps);
  const PeriodicGrid grid(L, N);
  EvolveConfig ecfg;
  ecfg.t_end = st.cfg.t_end > 0 ? st.cfg.t_end : 0.4;
  ecfg.dt = st.cfg.dt > 0 ? st.cfg.dt
                          : choose_dt(m, st.cfg.eps, L, N, 1.6);
  ecfg.snapshot_times = st.cfg.snapshot_times;
  ecfg.integrator = integrator_from_string(st.cfg.integrator);
  ecfg.resolution_error_level = st.cfg.resolution_error_level;
  ecfg.energy_drift_bound = st.cfg.energy_drift_bound;
  RunRecord rec = evolve(m, sech2_field(grid), st.cfg.eps, ecfg);
  emit_run_record(fs::path(st.cfg.out_dir), st.cfg, rec);
  std::printf("status: %s  energy-drift: %.3e  mass-drift: %.3e\n",
              to_string(rec.status).c_str(), rec.max_energy_drift,
              rec.max_mass_drift);
  return rec.status == RunStatus::Completed ? 0 : 2;
}

int do_hopf(CliState& st) {
  finalize(st);
  ModelSpec m = model_from_string(st.cfg.model);
  const InitialData data = sech2_data();
  const double t = st.cfg.t_end >= 0 ? st.cfg.t_end : 0.1;
  const int N = st.cfg.grid_size > 0 ? st.cfg.grid_size : 4096;
  const PeriodicGrid grid(st.cfg.domain_half_width, N);
  RealField u = hopf_solve_grid(m.a, data, grid, t);
  CriticalPoint cp = critical_point(m.a, data);
  std::vector<std::string> names = {"x", "u"};
  std::vector<std::vector<double>> cols(2);
  cols[0] = grid.nodes();
  cols[1].assign(u.values().begin(), u.values().end());
  write_columns(fs::path(st.cfg.out_dir) / "hopf.dat", names, cols);
  std::printf("critical point: x_c = %.12g  t_c = %.12g  u_c = %.12g  "
              "k = %.12g\n",
              cp.x, cp.t, cp.u, cp.k);
  return 0;
}

int do_pi2(CliState& st, double T, double X_max, int nodes) {
  finalize(st);
  PI2SolveOptions opt;
  opt.X_max = X_max;
  opt.n_nodes = nodes;
  std::vector<double> ts = st.cfg.eps_list.empty()
                               ? std::vector<double>{T}
                               : st.cfg.eps_list;  // reuse list flag for T's
  std::vector<PI2Solution> sols;
  for (double t : ts) sols.push_back(pi2_solve(t, opt));
  write_pi2_table(fs::path(st.cfg.out_dir) / "pi2_table.dat", sols);
  for (const auto& s : sols)
    std::printf("T = %+.6f  residual = %.3e  newton iterations = %d\n", s.T,
                s.residual_norm, s.newton_iterations);
  return 0;
}

int do_multiscale(CliState& st) {
  finalize(st);
  st.cfg.experiment = "breakup-universality";
  return run_experiment(st.cfg);
}

int do_catalog(CliState& st, const std::string& id) {
  finalize(st);
  st.cfg.experiment = id;
  return run_experiment(st.cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "displab: pseudospectral laboratory for small-dispersion Hamiltonian "
      "perturbations of the transport equation"};
  app.require_subcommand(1);

  CliState st;
  double pi2_T = 0.0, pi2_xmax = 400.0;
  int pi2_nodes = 4096;
  std::string catalog_id;

  auto* evolve_cmd =
      app.add_subcommand("evolve", "integrate one PDE initial-value problem");
  add_common(evolve_cmd, st);

  auto* hopf_cmd = app.add_subcommand(
      "hopf", "dispersionless solution by characteristics + critical point");
  add_common(hopf_cmd, st);

  auto* pi2_cmd =
      app.add_subcommand("pi2", "solve / tabulate the PI2 special solution");
  add_common(pi2_cmd, st);
  pi2_cmd->add_option("--T", pi2_T, "slow-time parameter");
  pi2_cmd->add_option("--X-max", pi2_xmax, "half-width of the X domain");
  pi2_cmd->add_option("--nodes", pi2_nodes, "collocation nodes");

  auto* ms_cmd = app.add_subcommand(
      "multiscale", "breakup comparison: PDE vs transport vs local model");
  add_common(ms_cmd, st);

  auto* qt_cmd = app.add_subcommand(
      "quasitriv", "quasitriviality convergence sweep");
  add_common(qt_cmd, st);

  auto* sc_cmd =
      app.add_subcommand("scaling", "breakup-distance scaling sweep");
  add_common(sc_cmd, st);

  auto* hc_cmd = app.add_subcommand(
      "hamcheck", "Hamiltonian structure and commuting-family checks");
  add_common(hc_cmd, st);

  auto* bl_cmd = app.add_subcommand(
      "blowup", "oscillatory regime and blowup phenomenology run");
  add_common(bl_cmd, st);

  auto* cat_cmd = app.add_subcommand("catalog-run",
                                     "run a named catalog experiment");
  add_common(cat_cmd, st);
  cat_cmd
      ->add_option("experiment", catalog_id,
                   "scaling | breakup-universality | quasitriviality | "
                   "blowup | kdv2-transition | hamiltonian-checks")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (evolve_cmd->parsed()) return do_evolve(st);
    if (hopf_cmd->parsed()) return do_hopf(st);
    if (pi2_cmd->parsed()) return do_pi2(st, pi2_T, pi2_xmax, pi2_nodes);
    if (ms_cmd->parsed()) return do_multiscale(st);
    if (qt_cmd->parsed()) return do_catalog(st, "quasitriviality");
    if (sc_cmd->parsed()) return do_catalog(st, "scaling");
    if (hc_cmd->parsed()) return do_catalog(st, "hamiltonian-checks");
    if (bl_cmd->parsed()) return do_catalog(st, "blowup");
    if (cat_cmd->parsed()) return do_catalog(st, catalog_id);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
