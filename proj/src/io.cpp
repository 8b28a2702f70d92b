#include "burgers/io.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string_view>

namespace burgers {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

// ---- config ---------------------------------------------------------------

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config." + field + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) field_error(where.empty() ? key : where + "." + key, "unknown field");
  }
}

const json* child(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& where, std::optional<double> fallback) {
  const json* v = child(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    field_error(where + key, "required number is missing");
  }
  if (!v->is_number()) field_error(where + key, "expected a number, got " + v->dump());
  return v->get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, std::optional<int> fallback) {
  const json* v = child(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    field_error(where + key, "required integer is missing");
  }
  if (!v->is_number_integer()) field_error(where + key, "expected an integer, got " + v->dump());
  return v->get<int>();
}

std::vector<double> get_numbers(const json& obj, const char* key, const std::string& where) {
  std::vector<double> out;
  const json* v = child(obj, key);
  if (!v) return out;
  if (!v->is_array()) field_error(where + key, "expected an array of numbers");
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) field_error(where + key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

// ---- CSV ------------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

class LineReader {
 public:
  LineReader(std::string text, fs::path path) : text_(std::move(text)), path_(std::move(path)) {}

  std::string_view next() {
    if (pos_ >= text_.size()) fail("unexpected end of file");
    const auto end = text_.find('\n', pos_);
    const auto stop = end == std::string::npos ? text_.size() : end;
    std::string_view line(text_.data() + pos_, stop - pos_);
    pos_ = stop + 1;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  bool done() const { return pos_ >= text_.size(); }

  std::vector<double> numbers(std::size_t expected) {
    const std::string_view line = next();
    std::vector<double> out;
    out.reserve(expected);
    std::size_t p = 0;
    while (p <= line.size()) {
      auto comma = line.find(',', p);
      if (comma == std::string_view::npos) comma = line.size();
      const std::string_view cell = line.substr(p, comma - p);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        fail("bad number '" + std::string(cell) + "'");
      }
      out.push_back(v);
      p = comma + 1;
    }
    if (out.size() != expected) {
      fail("expected " + std::to_string(expected) + " fields, got " + std::to_string(out.size()));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string text_;
  fs::path path_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

void append_row(std::string& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  out += '\n';
}

int as_count(double v, const LineReader& r, const char* what) {
  if (v < 0 || v != std::floor(v) || v > 1e9) r.fail(std::string("invalid ") + what);
  return static_cast<int>(v);
}

}  // namespace

// ---- RunConfig ----------------------------------------------------------------

int RunConfig::quadrature_n() const {
  return n > 0 ? n : static_cast<int>(sim.num_steps() / sim.snapshot_stride);
}

TableOptions RunConfig::table_options(int jobs) const {
  TableOptions o;
  o.basis_kind = basis_kind;
  o.rank_tol = rank_tol;
  o.pod_from_quadrature_nodes = pod_from_quadrature_nodes;
  o.spectral_count = spectral_count;
  o.m_list = m_list;
  o.n = quadrature_n();
  o.jobs = jobs;
  return o;
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown(j, "", {"case_id", "simulation", "basis", "table", "plot"});
  RunConfig rc;

  const json* id = child(j, "case_id");
  if (!id || !id->is_string() || id->get<std::string>().empty()) field_error("case_id", "expected a non-empty string");
  rc.case_id = id->get<std::string>();
  for (char c : rc.case_id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      field_error("case_id", "only letters, digits, '_' and '-' are allowed");
    }
  }

  const json* sim = child(j, "simulation");
  if (!sim || !sim->is_object()) field_error("simulation", "required object is missing");
  reject_unknown(*sim, "simulation",
                 {"n_cells", "nu", "T", "dt", "snapshot_stride", "newton_tol", "newton_max_iter", "forcing"});
  const std::string s = "simulation.";
  CaseConfig& c = rc.sim;
  c.n_cells = get_int(*sim, "n_cells", s, 128);
  c.nu = get_number(*sim, "nu", s, 1e-2);
  c.T = get_number(*sim, "T", s, std::nullopt);
  c.dt = get_number(*sim, "dt", s, std::nullopt);
  c.snapshot_stride = get_int(*sim, "snapshot_stride", s, 1);
  c.newton_tol = get_number(*sim, "newton_tol", s, 1e-12);
  c.newton_max_iter = get_int(*sim, "newton_max_iter", s, 50);
  c.forcing = get_numbers(*sim, "forcing", s);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config.simulation.") + e.what());
  }

  if (const json* b = child(j, "basis")) {
    if (!b->is_object()) field_error("basis", "expected an object");
    reject_unknown(*b, "basis", {"kind", "rank_tol", "snapshots", "spectral_count"});
    if (const json* k = child(*b, "kind")) {
      if (!k->is_string()) field_error("basis.kind", "expected \"pod\" or \"spectral\"");
      try {
        rc.basis_kind = parse_basis_kind(k->get<std::string>());
      } catch (const std::invalid_argument& e) {
        field_error("basis.kind", e.what());
      }
    }
    if (const json* t = child(*b, "rank_tol")) {
      if (t->is_string() && t->get<std::string>() == "auto") {
        rc.rank_tol.reset();
      } else if (t->is_number() && t->get<double>() >= 0.0) {
        rc.rank_tol = t->get<double>();
      } else {
        field_error("basis.rank_tol", "expected a number >= 0 or \"auto\", got " + t->dump());
      }
    }
    if (const json* snaps = child(*b, "snapshots")) {
      const std::string v = snaps->is_string() ? snaps->get<std::string>() : "";
      if (v == "recorded") {
        rc.pod_from_quadrature_nodes = false;
      } else if (v == "quadrature") {
        rc.pod_from_quadrature_nodes = true;
      } else {
        field_error("basis.snapshots", "expected \"recorded\" or \"quadrature\", got " + snaps->dump());
      }
    }
    rc.spectral_count = get_int(*b, "spectral_count", "basis.", 0);
    if (rc.spectral_count < 0 || rc.spectral_count > c.n_cells - 1) {
      field_error("basis.spectral_count", "must lie in [0, n_cells - 1]");
    }
  }

  if (const json* t = child(j, "table")) {
    if (!t->is_object()) field_error("table", "expected an object");
    reject_unknown(*t, "table", {"m", "n", "intervals"});
    for (double m : get_numbers(*t, "m", "table.")) {
      if (m < 1 || m != std::floor(m)) field_error("table.m", "entries must be positive integers");
      rc.m_list.push_back(static_cast<int>(m));
    }
    rc.n = get_int(*t, "n", "table.", 0);
    if (rc.n < 0) field_error("table.n", "must be >= 0");
    if (rc.n > 0) {
      const long recorded = c.num_steps() / c.snapshot_stride;
      if (recorded % rc.n != 0) {
        field_error("table.n", std::to_string(rc.n) + " quadrature subintervals do not align with the " +
                                   std::to_string(recorded) + " recorded snapshot intervals");
      }
    }
    rc.intervals = get_numbers(*t, "intervals", "table.");
    for (double T : rc.intervals) {
      if (!(T > 0.0) || T > c.T * (1 + 1e-12)) field_error("table.intervals", "entries must lie in (0, T]");
    }
  }

  if (const json* p = child(j, "plot")) {
    if (!p->is_object()) field_error("plot", "expected an object");
    reject_unknown(*p, "plot", {"times"});
    rc.plot_times = get_numbers(*p, "times", "plot.");
  }
  return rc;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  return parse_run_config(j);
}

json to_json(const CaseConfig& cfg) {
  return {{"n_cells", cfg.n_cells},
          {"nu", cfg.nu},
          {"T", cfg.T},
          {"dt", cfg.dt},
          {"snapshot_stride", cfg.snapshot_stride},
          {"newton_tol", cfg.newton_tol},
          {"newton_max_iter", cfg.newton_max_iter},
          {"forcing", cfg.forcing.empty() ? json(nullptr) : json(cfg.forcing)}};
}

// ---- files ------------------------------------------------------------------

void write_text(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_snapshots(const fs::path& path, const SnapshotSet& snaps) {
  const CaseConfig& c = snaps.config;
  std::string out = "n_cells,nu,dt,T,stride,count\n";
  out += std::to_string(c.n_cells) + ',' + format_double(c.nu) + ',' + format_double(c.dt) + ',' +
         format_double(c.T) + ',' + std::to_string(c.snapshot_stride) + ',' + std::to_string(snaps.size()) + '\n';
  out += "time";
  for (int i = 1; i < c.n_cells; ++i) out += ",v_" + std::to_string(i);
  out += '\n';
  std::vector<double> row(static_cast<std::size_t>(c.n_cells));
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    row[0] = snaps.times[k];
    const auto v = snaps.states[k].values();
    std::copy(v.begin(), v.end(), row.begin() + 1);
    append_row(out, row);
  }
  write_text(path, out);
}

SnapshotSet read_snapshots(const fs::path& path) {
  LineReader r(read_file(path), path);
  if (r.next() != "n_cells,nu,dt,T,stride,count") r.fail("expected snapshot header");
  const auto h = r.numbers(6);
  SnapshotSet s;
  s.config.n_cells = as_count(h[0], r, "n_cells");
  s.config.nu = h[1];
  s.config.dt = h[2];
  s.config.T = h[3];
  s.config.snapshot_stride = as_count(h[4], r, "stride");
  const int count = as_count(h[5], r, "count");
  try {
    s.config.validate();
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  r.next();  // column names
  const Mesh mesh = build_mesh(s.config.n_cells);
  for (int k = 0; k < count; ++k) {
    auto row = r.numbers(static_cast<std::size_t>(s.config.n_cells));
    s.times.push_back(row[0]);
    s.states.emplace_back(mesh, std::vector<double>(row.begin() + 1, row.end()));
  }
  if (!r.done()) r.fail("trailing data after " + std::to_string(count) + " snapshots");
  return s;
}

void write_basis(const fs::path& path, const BasisSet& basis) {
  std::string out = "kind,d,n_cells,rank_tol\n";
  out += std::string(to_string(basis.kind)) + ',' + std::to_string(basis.dimension()) + ',' +
         std::to_string(basis.n_cells) + ',' + format_double(basis.rank_tol) + '\n';
  append_row(out, basis.eigenvalues);
  for (const auto& w : basis.vectors) append_row(out, w.values());
  write_text(path, out);
}

BasisSet read_basis(const fs::path& path) {
  LineReader r(read_file(path), path);
  if (r.next() != "kind,d,n_cells,rank_tol") r.fail("expected basis header");
  const std::string_view meta = r.next();
  const auto comma = meta.find(',');
  if (comma == std::string_view::npos) r.fail("bad basis metadata");
  BasisSet b;
  try {
    b.kind = parse_basis_kind(meta.substr(0, comma));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  // Re-parse the numeric tail of the metadata row.
  LineReader tail(std::string(meta.substr(comma + 1)), path);
  const auto m = tail.numbers(3);
  const int d = as_count(m[0], r, "d");
  b.n_cells = as_count(m[1], r, "n_cells");
  b.rank_tol = m[2];
  if (d < 1 || b.n_cells < 2 || d > b.n_cells - 1) r.fail("inconsistent d / n_cells");
  b.eigenvalues = r.numbers(static_cast<std::size_t>(d));
  const Mesh mesh = build_mesh(b.n_cells);
  for (int k = 0; k < d; ++k) b.vectors.emplace_back(mesh, r.numbers(static_cast<std::size_t>(mesh.n_dof)));
  if (!r.done()) r.fail("trailing data after " + std::to_string(d) + " vectors");
  return b;
}

void write_table(const fs::path& path, const std::vector<AveragedBudget>& rows) {
  std::string out = "m,avg_e_m,avg_E_m,avg_sum\n";
  for (const auto& row : rows) {
    out += std::to_string(row.m) + ',' + format_double(row.avg_e_m) + ',' + format_double(row.avg_E_m) + ',' +
           format_double(row.avg_sum) + '\n';
  }
  write_text(path, out);
}

std::vector<AveragedBudget> read_table(const fs::path& path) {
  LineReader r(read_file(path), path);
  if (r.next() != "m,avg_e_m,avg_E_m,avg_sum") r.fail("expected table header");
  std::vector<AveragedBudget> rows;
  while (!r.done()) {
    const auto v = r.numbers(4);
    AveragedBudget a;
    a.m = as_count(v[0], r, "m");
    a.avg_e_m = v[1];
    a.avg_E_m = v[2];
    a.avg_sum = v[3];
    rows.push_back(a);
  }
  return rows;
}

std::string file_digest(const fs::path& path) {
  const std::string data = read_file(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw FormatError("sha256 failed for " + path.string());
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace burgers
