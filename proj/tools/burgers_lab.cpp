// burgers_lab: simulate, build bases, tabulate averaged energy transfer, emit
// plot data and run the verification oracles. Every file goes under --out.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "burgers/basis.hpp"
#include "burgers/energy.hpp"
#include "burgers/io.hpp"
#include "burgers/solver.hpp"
#include "burgers/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace burgers;

namespace {

struct Options {
  fs::path config;
  fs::path out;
  fs::path snapshots;
  int jobs = 1;
  std::string basis;
  std::optional<double> rank_tol;
  bool end_to_end = false;
  std::vector<double> times;
  std::string scope = "all";
  fs::path goldens;
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Collects outputs and timings, then writes <out>/<name>.json.
class Manifest {
 public:
  Manifest(std::string command, const fs::path& out) : out_(out) { doc_["command"] = std::move(command); }

  json& operator[](const char* key) { return doc_[key]; }

  void add_output(const std::string& role, const fs::path& file) {
    doc_["outputs"][role] = {{"path", file.filename().string()}, {"sha256", file_digest(file)}};
  }
  void time(const char* stage, double seconds) { doc_["wall_seconds"][stage] = seconds; }

  fs::path write(const std::string& name) {
    const fs::path path = out_ / (name + ".json");
    write_text(path, doc_.dump(2) + "\n");
    return path;
  }

 private:
  fs::path out_;
  json doc_;
};

RunConfig load(const Options& o) {
  RunConfig rc = load_run_config(o.config);
  if (!o.basis.empty()) rc.basis_kind = parse_basis_kind(o.basis);
  if (o.rank_tol) rc.rank_tol = o.rank_tol;
  return rc;
}

void prepare_out(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("--out is required");
  fs::create_directories(o.out);
}

fs::path in_out(const Options& o, const std::string& file) { return o.out / file; }

std::string basis_stem(const RunConfig& rc) { return rc.case_id + "_" + std::string(to_string(rc.basis_kind)); }

json case_json(const RunConfig& rc) {
  json j = to_json(rc.sim);
  j["case_id"] = rc.case_id;
  return j;
}

void check_matches(const SnapshotSet& s, const CaseConfig& c, const fs::path& path) {
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  if (s.config.n_cells != c.n_cells || !close(s.config.nu, c.nu) || !close(s.config.dt, c.dt) ||
      !close(s.config.T, c.T) || s.config.snapshot_stride != c.snapshot_stride) {
    throw std::invalid_argument(path.string() + " was produced by a different configuration");
  }
}

/// Snapshots from --snapshots, from <out>/<case>_snapshots.csv, or a fresh run.
SnapshotSet obtain_snapshots(const Options& o, const RunConfig& rc, Manifest& manifest, Stopwatch& clock) {
  if (o.end_to_end) {
    SnapshotSet s = run_case(rc.sim);
    manifest.time("simulate", clock.lap());
    manifest["snapshot_source"] = "end-to-end run";
    return s;
  }
  const fs::path path = o.snapshots.empty() ? in_out(o, rc.case_id + "_snapshots.csv") : o.snapshots;
  if (!fs::exists(path)) {
    throw std::invalid_argument("snapshot file " + path.string() + " not found (run 'simulate' or pass --end-to-end)");
  }
  SnapshotSet s = read_snapshots(path);
  check_matches(s, rc.sim, path);
  s.config = rc.sim;
  manifest.time("read_snapshots", clock.lap());
  manifest["snapshot_source"] = {{"path", path.string()}, {"sha256", file_digest(path)}};
  return s;
}

json basis_json(const BasisSet& b) {
  json j = {{"kind", std::string(to_string(b.kind))}, {"d", b.dimension()}, {"n_cells", b.n_cells}};
  j["rank_tol"] = b.kind == BasisKind::Pod ? json(b.rank_tol) : json(nullptr);
  if (b.kind == BasisKind::Pod) j["modes_for_80_percent_energy"] = modes_for_energy(b, 0.8);
  return j;
}

int cmd_simulate(const Options& o) {
  prepare_out(o);
  const RunConfig rc = load(o);
  Stopwatch clock;
  Manifest manifest("simulate", o.out);
  manifest["case"] = case_json(rc);
  manifest["config_source"] = {{"path", o.config.string()}, {"sha256", file_digest(o.config)}};

  int max_iter = 0;
  long total_iter = 0;
  const SnapshotSet snaps = run_case(rc.sim, [&](const StepReport& r) {
    max_iter = std::max(max_iter, r.iterations);
    total_iter += r.iterations;
  });
  manifest.time("simulate", clock.lap());

  const fs::path file = in_out(o, rc.case_id + "_snapshots.csv");
  write_snapshots(file, snaps);
  manifest.time("write", clock.lap());
  manifest.add_output("snapshots", file);
  manifest["snapshot_count"] = snaps.size();
  manifest["newton"] = {{"max_iterations", max_iter}, {"total_iterations", total_iter}};
  manifest.write(rc.case_id + "_simulate_manifest");
  std::cout << "wrote " << file.string() << " (" << snaps.size() << " snapshots)\n";
  return 0;
}

int cmd_basis(const Options& o) {
  prepare_out(o);
  const RunConfig rc = load(o);
  Stopwatch clock;
  Manifest manifest("basis", o.out);
  manifest["case"] = case_json(rc);
  manifest["config_source"] = {{"path", o.config.string()}, {"sha256", file_digest(o.config)}};
  const SnapshotSet snaps = obtain_snapshots(o, rc, manifest, clock);

  const BasisSet basis = build_table_basis(snaps, rc.table_options(o.jobs));
  manifest.time("basis", clock.lap());
  const fs::path file = in_out(o, basis_stem(rc) + "_basis.csv");
  write_basis(file, basis);
  manifest.add_output("basis", file);
  manifest["basis"] = basis_json(basis);
  manifest["d"] = basis.dimension();
  manifest.write(basis_stem(rc) + "_basis_manifest");
  std::cout << "wrote " << file.string() << " (d = " << basis.dimension() << ")\n";
  return 0;
}

void write_interval_tables(const Options& o, const RunConfig& rc, const std::vector<IntervalTable>& tables,
                           Manifest& manifest) {
  const double t_run = rc.sim.T;
  std::string longform = "T_sub,n,m,avg_e_m,avg_E_m,avg_sum,e_m_over_T_run,E_m_over_T_run\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      const double scale = t.T / t_run;
      longform += format_double(t.T) + ',' + std::to_string(t.n) + ',' + std::to_string(r.m) + ',' +
                  format_double(r.avg_e_m) + ',' + format_double(r.avg_E_m) + ',' + format_double(r.avg_sum) + ',' +
                  format_double(scale * r.avg_e_m) + ',' + format_double(scale * r.avg_E_m) + '\n';
    }
  }
  const fs::path long_file = in_out(o, basis_stem(rc) + "_intervals.csv");
  write_text(long_file, longform);
  manifest.add_output("intervals", long_file);

  // Wide layout: one column per window, each (1 / T_run) * int_0^{T'}.
  for (const bool viscous : {false, true}) {
    std::string wide = "m";
    for (const auto& t : tables) wide += ",T_" + format_double(t.T);
    wide += '\n';
    for (std::size_t i = 0; i < rc.m_list.size(); ++i) {
      wide += std::to_string(rc.m_list[i]);
      for (const auto& t : tables) {
        const auto& r = t.rows[i];
        wide += ',' + format_double(t.T / t_run * (viscous ? r.avg_E_m : r.avg_e_m));
      }
      wide += '\n';
    }
    const std::string role = viscous ? "E_m_by_interval" : "e_m_by_interval";
    const fs::path file = in_out(o, basis_stem(rc) + "_" + role + ".csv");
    write_text(file, wide);
    manifest.add_output(role, file);
  }
}

int cmd_table(const Options& o) {
  prepare_out(o);
  const RunConfig rc = load(o);
  if (rc.m_list.empty()) throw ConfigError("config.table.m: at least one m is required for 'table'");
  Stopwatch clock;
  Manifest manifest("table", o.out);
  manifest["case"] = case_json(rc);
  manifest["config_source"] = {{"path", o.config.string()}, {"sha256", file_digest(o.config)}};
  const SnapshotSet snaps = obtain_snapshots(o, rc, manifest, clock);

  const TableOptions options = rc.table_options(o.jobs);
  const BasisSet basis = build_table_basis(snaps, options);
  manifest.time("basis", clock.lap());
  const fs::path basis_file = in_out(o, basis_stem(rc) + "_basis.csv");
  write_basis(basis_file, basis);
  manifest.add_output("basis", basis_file);

  const std::vector<AveragedBudget> rows = budget_rows(snaps, basis, options, rc.sim.T);
  manifest.time("table", clock.lap());
  const fs::path table_file = in_out(o, basis_stem(rc) + "_table.csv");
  write_table(table_file, rows);
  manifest.add_output("table", table_file);

  if (!rc.intervals.empty()) {
    write_interval_tables(o, rc, interval_tables(snaps, basis, rc.m_list, rc.intervals, o.jobs), manifest);
    manifest.time("intervals", clock.lap());
    manifest["intervals"] = rc.intervals;
  }

  manifest["basis"] = basis_json(basis);
  manifest["d"] = basis.dimension();
  manifest["rank_tol"] = basis.kind == BasisKind::Pod ? json(basis.rank_tol) : json(nullptr);
  manifest["m_list"] = rc.m_list;
  manifest["n"] = options.n;
  manifest["jobs"] = o.jobs;
  manifest.write(basis_stem(rc) + "_table_manifest");

  std::cout << "d = " << basis.dimension() << ", n = " << options.n << "\n";
  std::cout << "m,avg_e_m,avg_E_m,avg_sum\n";
  for (const auto& r : rows) {
    std::cout << r.m << ',' << format_double(r.avg_e_m) << ',' << format_double(r.avg_E_m) << ','
              << format_double(r.avg_sum) << '\n';
  }
  return 0;
}

int cmd_plot_data(const Options& o) {
  prepare_out(o);
  const RunConfig rc = load(o);
  Stopwatch clock;
  Manifest manifest("plot-data", o.out);
  manifest["case"] = case_json(rc);
  manifest["config_source"] = {{"path", o.config.string()}, {"sha256", file_digest(o.config)}};
  const SnapshotSet snaps = obtain_snapshots(o, rc, manifest, clock);

  std::vector<double> times = !o.times.empty() ? o.times : rc.plot_times;
  if (times.empty()) times = {0.0, rc.sim.T};
  const Mesh mesh = rc.sim.mesh();
  std::string out = "time,x,u\n";
  for (double t : times) {
    std::size_t k = 0;
    while (k < snaps.size() && std::abs(snaps.times[k] - t) > 1e-9) ++k;
    if (k == snaps.size()) throw std::invalid_argument("requested time " + format_double(t) + " was not recorded");
    const FEVector& u = snaps.states[k];
    const std::string ts = format_double(snaps.times[k]) + ',';
    out += ts + "0,0\n";
    for (int i = 0; i < mesh.n_dof; ++i) out += ts + format_double(mesh.node(i)) + ',' + format_double(u[i]) + '\n';
    out += ts + "1,0\n";
  }
  const fs::path file = in_out(o, rc.case_id + "_plot.csv");
  write_text(file, out);
  manifest.time("plot", clock.lap());
  manifest.add_output("plot", file);
  manifest["times"] = times;
  manifest.write(rc.case_id + "_plot_manifest");
  std::cout << "wrote " << file.string() << "\n";
  return 0;
}

int cmd_verify(const Options& o) {
  prepare_out(o);
  verify::OracleOptions vo;
  vo.scope = o.scope;
  vo.goldens = o.goldens;
  vo.table_config = o.config;
  vo.jobs = o.jobs;
  Stopwatch clock;
  const auto reports = verify::run_oracles(vo);
  const double seconds = clock.lap();

  std::string csv = "name,max_abs_err,max_rel_err,tolerance,pass,detail\n";
  json rows = json::array();
  bool ok = true;
  for (const auto& r : reports) {
    ok = ok && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  abs=" << r.max_abs_err << " rel=" << r.max_rel_err
              << " tol=" << r.tolerance << (r.detail.empty() ? "" : "  [" + r.detail + "]") << '\n';
    csv += r.name + ',' + format_double(r.max_abs_err) + ',' + format_double(r.max_rel_err) + ',' +
           format_double(r.tolerance) + ',' + (r.pass ? "true" : "false") + ",\"" + r.detail + "\"\n";
    rows.push_back({{"name", r.name},
                    {"max_abs_err", r.max_abs_err},
                    {"max_rel_err", r.max_rel_err},
                    {"tolerance", r.tolerance},
                    {"pass", r.pass},
                    {"detail", r.detail}});
  }
  write_text(in_out(o, "verify_report.csv"), csv);
  write_text(in_out(o, "verify_report.json"),
             json{{"scope", o.scope}, {"wall_seconds", seconds}, {"pass", ok}, {"reports", rows}}.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous Burgers DNS, reduced bases and averaged inter-mode energy transfer"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "case configuration (JSON)")->check(CLI::ExistingFile);
    if (needs_config) c->required();
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--jobs", o.jobs, "worker threads for independent m values")->check(CLI::Range(1, 256));
  };
  auto add_basis = [&](CLI::App* sub) {
    sub->add_option("--basis", o.basis, "basis kind")->check(CLI::IsMember({"pod", "spectral"}));
    sub->add_option_function<double>(
           "--rank-tol", [&](const double& v) { o.rank_tol = v; }, "relative POD eigenvalue cutoff")
        ->check(CLI::NonNegativeNumber);
  };
  auto add_source = [&](CLI::App* sub) {
    sub->add_flag("--end-to-end", o.end_to_end, "run the simulation instead of reading snapshots");
    sub->add_option("--snapshots", o.snapshots, "snapshot CSV (default <out>/<case_id>_snapshots.csv)")
        ->check(CLI::ExistingFile);
  };

  auto* simulate = app.add_subcommand("simulate", "run the DNS and write the snapshot file");
  add_common(simulate, true);

  auto* basis = app.add_subcommand("basis", "build a POD or spectral basis from snapshots");
  add_common(basis, true);
  add_basis(basis);
  add_source(basis);

  auto* table = app.add_subcommand("table", "time-averaged e_m and E_m for every configured m");
  add_common(table, true);
  add_basis(table);
  add_source(table);

  auto* plot = app.add_subcommand("plot-data", "long-format (time, x, u) profiles");
  add_common(plot, true);
  add_source(plot);
  plot->add_option("--times", o.times, "times to emit (default: config plot.times, else 0 and T)");

  auto* ver = app.add_subcommand("verify", "run the independent oracles");
  add_common(ver, false);
  ver->add_option("--scope", o.scope, "all, trilinear, jacobian, picard, spectrum, solve or tables");
  ver->add_option("--goldens", o.goldens, "directory with golden table CSVs")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(o);
    if (*basis) return cmd_basis(o);
    if (*table) return cmd_table(o);
    if (*plot) return cmd_plot_data(o);
    if (*ver) return cmd_verify(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
