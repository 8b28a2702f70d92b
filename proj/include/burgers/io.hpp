#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "burgers/basis.hpp"
#include "burgers/energy.hpp"
#include "burgers/solver.hpp"

namespace burgers {

/// Malformed or unreadable data file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, round-trip safe.
std::string format_double(double x);

/// Everything a committed case file describes.
struct RunConfig {
  std::string case_id;
  CaseConfig sim;

  BasisKind basis_kind = BasisKind::Pod;
  std::optional<double> rank_tol;
  bool pod_from_quadrature_nodes = false;
  int spectral_count = 0;

  std::vector<int> m_list;
  int n = 0;  // 0 means every recorded snapshot interval
  /// Nested averaging windows [0, T'] sharing one basis; empty means just [0, T].
  std::vector<double> intervals;
  /// Profiles emitted by plot-data; empty means {0, T}.
  std::vector<double> plot_times;

  /// n resolved against the recorded snapshot count.
  int quadrature_n() const;
  TableOptions table_options(int jobs) const;
};

/// Parses and validates; errors name the offending field ("config.dt: ...").
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const CaseConfig& cfg);

void write_snapshots(const std::filesystem::path& path, const SnapshotSet& snaps);
SnapshotSet read_snapshots(const std::filesystem::path& path);

void write_basis(const std::filesystem::path& path, const BasisSet& basis);
BasisSet read_basis(const std::filesystem::path& path);

void write_table(const std::filesystem::path& path, const std::vector<AveragedBudget>& rows);
/// Rows as (m, avg_e_m, avg_E_m, avg_sum); metadata fields are left at zero.
std::vector<AveragedBudget> read_table(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of the file contents.
std::string file_digest(const std::filesystem::path& path);

/// Writes text through a temporary file in the same directory.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace burgers
