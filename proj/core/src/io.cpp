#include "displab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "displab/errors.hpp"

namespace displab {

namespace fs = std::filesystem;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

namespace {

std::string join_doubles(std::span<const double> v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_g17(v[i]);
  }
  return s;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  double v;
  while (is >> v) out.push_back(v);
  return out;
}

// All writes go to a temp file first so a failing run never leaves a
// half-written artifact behind.
class AtomicWriter {
 public:
  explicit AtomicWriter(const fs::path& target)
      : target_(target), tmp_(target.string() + ".tmp") {
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    out_.open(tmp_, std::ios::out | std::ios::trunc);
    if (!out_) throw IoError("cannot open " + tmp_.string() + " for writing");
  }

  std::ofstream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + tmp_.string());
    out_.close();
    std::error_code ec;
    fs::rename(tmp_, target_, ec);
    if (ec)
      throw IoError("rename " + tmp_.string() + " -> " + target_.string() +
                    " failed: " + ec.message());
    committed_ = true;
  }

  ~AtomicWriter() {
    if (!committed_) {
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }

 private:
  fs::path target_, tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace

std::map<std::string, std::string> parse_kv_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const char* ws = " \t\r\n";
      auto b = s.find_first_not_of(ws);
      auto e = s.find_last_not_of(ws);
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}

void write_kv_file(const fs::path& path,
                   const std::map<std::string, std::string>& kv) {
  AtomicWriter w(path);
  for (const auto& [k, v] : kv) w.stream() << k << " = " << v << "\n";
  w.commit();
}

void write_columns(const fs::path& path, std::span<const std::string> names,
                   std::span<const std::vector<double>> columns) {
  if (names.size() != columns.size())
    throw IoError("write_columns: name/column count mismatch");
  const size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns)
    if (c.size() != rows) throw IoError("write_columns: ragged columns");

  AtomicWriter w(path);
  w.stream() << "#";
  for (const auto& n : names) w.stream() << ' ' << n;
  w.stream() << "\n";
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) {
      if (c) w.stream() << ' ';
      w.stream() << format_g17(columns[c][r]);
    }
    w.stream() << "\n";
  }
  w.commit();
}

ColumnsFile read_columns(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  ColumnsFile f;
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw IoError("read_columns: missing header in " + path.string());
  {
    std::istringstream is(line.substr(1));
    std::string n;
    while (is >> n) f.names.push_back(n);
  }
  f.columns.resize(f.names.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto vals = split_doubles(line);
    if (vals.size() != f.names.size())
      throw IoError("read_columns: row width mismatch in " + path.string());
    for (size_t c = 0; c < vals.size(); ++c) f.columns[c].push_back(vals[c]);
  }
  return f;
}

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

std::map<std::string, std::string> RunConfig::to_kv() const {
  std::map<std::string, std::string> kv;
  kv["experiment"] = experiment;
  kv["model"] = model;
  kv["eps"] = format_g17(eps);
  kv["eps_list"] = join_doubles(eps_list);
  kv["domain_half_width"] = format_g17(domain_half_width);
  kv["grid_size"] = std::to_string(grid_size);
  kv["dt"] = format_g17(dt);
  kv["t_end"] = format_g17(t_end);
  kv["snapshot_times"] = join_doubles(snapshot_times);
  kv["integrator"] = integrator;
  kv["window_lo"] = format_g17(window_lo);
  kv["window_hi"] = format_g17(window_hi);
  kv["resolution_error_level"] = format_g17(resolution_error_level);
  kv["energy_drift_bound"] = format_g17(energy_drift_bound);
  kv["seed"] = std::to_string(seed);
  kv["out_dir"] = out_dir;
  return kv;
}

void RunConfig::apply_kv(const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "experiment") experiment = v;
    else if (k == "model") model = v;
    else if (k == "eps") eps = std::stod(v);
    else if (k == "eps_list") eps_list = split_doubles(v);
    else if (k == "domain_half_width") domain_half_width = std::stod(v);
    else if (k == "grid_size") grid_size = std::stoi(v);
    else if (k == "dt") dt = std::stod(v);
    else if (k == "t_end") t_end = std::stod(v);
    else if (k == "snapshot_times") snapshot_times = split_doubles(v);
    else if (k == "integrator") integrator = v;
    else if (k == "window_lo") window_lo = std::stod(v);
    else if (k == "window_hi") window_hi = std::stod(v);
    else if (k == "resolution_error_level")
      resolution_error_level = std::stod(v);
    else if (k == "energy_drift_bound") energy_drift_bound = std::stod(v);
    else if (k == "seed") seed = std::stoull(v);
    else if (k == "out_dir") out_dir = v;
    else
      throw ConfigError("unknown configuration key: " + k);
  }
}

void emit_run_record(const fs::path& dir, const RunConfig& cfg,
                     const RunRecord& rec) {
  fs::create_directories(dir);
  auto kv = cfg.to_kv();
  for (const auto& [k, v] : rec.metadata) kv["run." + k] = v;
  kv["run.status"] = to_string(rec.status);
  if (!rec.status_detail.empty()) kv["run.status_detail"] = rec.status_detail;
  kv["run.mass_initial"] = format_g17(rec.mass_initial);
  kv["run.mass_final"] = format_g17(rec.mass_final);
  kv["run.max_energy_drift"] = format_g17(rec.max_energy_drift);
  kv["run.max_mass_drift"] = format_g17(rec.max_mass_drift);
  kv["run.energy_flagged"] = rec.energy_flagged ? "1" : "0";
  kv["run.snapshot_count"] = std::to_string(rec.snapshots.size());
  write_kv_file(dir / "run.meta", kv);

  for (size_t i = 0; i < rec.snapshots.size(); ++i) {
    const auto& s = rec.snapshots[i];
    std::vector<std::vector<double>> cols(2);
    cols[0] = s.u.grid().nodes();
    cols[1].assign(s.u.values().begin(), s.u.values().end());
    std::vector<std::string> names = {"x", "u"};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%03zu.dat", i);
    write_columns(dir / buf, names, cols);
  }

  if (!rec.energy.empty()) {
    std::vector<std::vector<double>> cols(5);
    for (size_t i = 0; i < rec.energy.size(); ++i) {
      cols[0].push_back(rec.energy[i].t);
      cols[1].push_back(rec.energy[i].E);
      cols[2].push_back(rec.energy[i].drift);
      cols[3].push_back(rec.linf_history[i].second);
      cols[4].push_back(rec.tail_history[i].second);
    }
    std::vector<std::string> names = {"t", "energy", "energy_drift", "linf",
                                      "spectral_tail"};
    write_columns(dir / "histories.dat", names, cols);
  }
}

// ---------------------------------------------------------------------------
// PI2 tabulation files
// ---------------------------------------------------------------------------

void write_pi2_table(const fs::path& path, std::span<const PI2Solution> sols) {
  if (sols.empty()) throw IoError("write_pi2_table: no solutions");
  AtomicWriter w(path);
  auto& os = w.stream();
  os << "displab-pi2-table v1\n";
  os << "t_count = " << sols.size() << "\n";
  os << "x_max = " << format_g17(sols[0].X_max) << "\n";
  os << "n_nodes = " << sols[0].n_nodes << "\n";
  os << "t_values =";
  for (const auto& s : sols) os << ' ' << format_g17(s.T);
  os << "\nresiduals =";
  for (const auto& s : sols) os << ' ' << format_g17(s.residual_norm);
  os << "\nnewton_iterations =";
  for (const auto& s : sols) os << ' ' << s.newton_iterations;
  os << "\n";
  for (const auto& s : sols) {
    os << "block T = " << format_g17(s.T) << "\n";
    for (int i = 0; i < s.n_nodes; ++i)
      os << format_g17(s.X[i]) << ' ' << format_g17(s.U[i]) << "\n";
  }
  w.commit();
}

std::vector<PI2Solution> read_pi2_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "displab-pi2-table v1")
    throw IoError("read_pi2_table: bad signature in " + path.string());

  size_t t_count = 0;
  double x_max = 0.0;
  int n_nodes = 0;
  std::vector<double> t_values, residuals;
  std::vector<int> iters;
  while (std::getline(in, line)) {
    if (line.rfind("block T", 0) == 0) break;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::string val = line.substr(eq + 1);
    if (key == "t_count") t_count = std::stoul(val);
    else if (key == "x_max") x_max = std::stod(val);
    else if (key == "n_nodes") n_nodes = std::stoi(val);
    else if (key == "t_values") t_values = split_doubles(val);
    else if (key == "residuals") residuals = split_doubles(val);
    else if (key == "newton_iterations") {
      for (double v : split_doubles(val)) iters.push_back((int)v);
    }
  }
  if (t_values.size() != t_count || residuals.size() != t_count)
    throw IoError("read_pi2_table: inconsistent header");

  std::vector<PI2Solution> sols;
  for (size_t b = 0; b < t_count; ++b) {
    // `line` currently holds the block marker
    PI2Solution s;
    s.T = t_values[b];
    s.X_max = x_max;
    s.n_nodes = n_nodes;
    s.residual_norm = residuals[b];
    s.newton_iterations = b < iters.size() ? iters[b] : 0;
    s.X.resize(n_nodes);
    s.U.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      if (!std::getline(in, line))
        throw IoError("read_pi2_table: truncated block");
      auto vals = split_doubles(line);
      if (vals.size() != 2) throw IoError("read_pi2_table: bad row");
      s.X[i] = vals[0];
      s.U[i] = vals[1];
    }
    sols.push_back(std::move(s));
    std::getline(in, line);  // next block marker (if any)
  }
  return sols;
}

}  // namespace displab
