#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "displab/pi2.hpp"
#include "displab/stepping.hpp"

namespace displab {

/// Experiment description; every field has a CLI flag of the same name and
/// a config-file key (the config file wins over flags).
struct RunConfig {
  std::string experiment;       // catalog id, empty for plain runs
  std::string model = "genkdv:1";
  double eps = 1e-2;
  std::vector<double> eps_list;  // sweeps; falls back to {eps}
  double domain_half_width = 8.0 * 3.14159265358979323846;
  int grid_size = 0;            // 0 = experiment picks
  double dt = 0.0;              // 0 = experiment picks
  double t_end = -1.0;          // < 0 = experiment picks
  std::vector<double> snapshot_times;
  std::string integrator = "auto";  // auto | etdrk4 | irk4
  double window_lo = 0.8, window_hi = 2.0;
  double resolution_error_level = 1e-4;
  double energy_drift_bound = 1e-6;
  std::uint64_t seed = 20121u;
  std::string out_dir = "out";

  std::map<std::string, std::string> to_kv() const;
  /// Apply `key = value` pairs (unknown keys are an error).
  void apply_kv(const std::map<std::string, std::string>& kv);
};

/// Parse a `key = value` file ('#' comments, blank lines ignored).
std::map<std::string, std::string> parse_kv_file(
    const std::filesystem::path& path);

/// Write `key = value` lines atomically (temp file + rename).
void write_kv_file(const std::filesystem::path& path,
                   const std::map<std::string, std::string>& kv);

/// Columnar numeric file: one header line naming the columns, then rows of
/// 17-significant-digit decimals.  Written atomically.
void write_columns(const std::filesystem::path& path,
                   std::span<const std::string> names,
                   std::span<const std::vector<double>> columns);

struct ColumnsFile {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};

ColumnsFile read_columns(const std::filesystem::path& path);

/// Persist one run: `<dir>/run.meta` plus `snap_<index>.dat` columnar
/// snapshots and `histories.dat`.
void emit_run_record(const std::filesystem::path& dir, const RunConfig& cfg,
                     const RunRecord& rec);

/// Versioned tabulation file of PI2 solutions (header then per-T blocks).
void write_pi2_table(const std::filesystem::path& path,
                     std::span<const PI2Solution> sols);
std::vector<PI2Solution> read_pi2_table(const std::filesystem::path& path);

/// Format a double with 17 significant digits (round-trips exactly).
std::string format_g17(double v);

}  // namespace displab
