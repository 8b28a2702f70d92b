#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"

#include "burgers/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = BURGERS_CLI;
const fs::path kConfigs = BURGERS_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("burgers_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::set<fs::path> listing(const fs::path& dir) {
  std::set<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) out.insert(e.path());
  return out;
}

std::string case1() { return "--config " + (kConfigs / "case1.json").string(); }

}  // namespace

TEST_CASE("simulate and table are deterministic") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  REQUIRE(run("simulate " + case1() + " --out " + a.string()) == 0);
  REQUIRE(run("simulate " + case1() + " --out " + b.string()) == 0);
  CHECK(slurp(a / "case1_snapshots.csv") == slurp(b / "case1_snapshots.csv"));

  REQUIRE(run("table " + case1() + " --out " + a.string()) == 0);
  REQUIRE(run("table " + case1() + " --out " + b.string() + " --jobs 3") == 0);
  CHECK(slurp(a / "case1_pod_table.csv") == slurp(b / "case1_pod_table.csv"));
  CHECK(slurp(a / "case1_pod_basis.csv") == slurp(b / "case1_pod_basis.csv"));

  // Reading snapshots back reproduces the end-to-end pipeline exactly.
  const fs::path c = scratch("det_c");
  REQUIRE(run("table " + case1() + " --end-to-end --out " + c.string()) == 0);
  CHECK(slurp(a / "case1_pod_table.csv") == slurp(c / "case1_pod_table.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("spectral table has a vanishing E_m column") {
  const fs::path dir = scratch("spectral");
  REQUIRE(run("table " + case1() + " --basis spectral --end-to-end --out " + dir.string()) == 0);
  const auto rows = burgers::read_table(dir / "case1_spectral_table.csv");
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(std::abs(r.avg_E_m) <= 1e-12);
  }
  fs::remove_all(dir);
}

TEST_CASE("rank tolerance flag changes the retained dimension") {
  const fs::path dir = scratch("ranktol");
  REQUIRE(run("basis " + case1() + " --end-to-end --rank-tol 1e-6 --out " + dir.string()) == 0);
  const auto loose = burgers::read_basis(dir / "case1_pod_basis.csv");
  CHECK(loose.rank_tol == 1e-6);
  REQUIRE(run("basis " + case1() + " --end-to-end --out " + dir.string()) == 0);
  const auto dflt = burgers::read_basis(dir / "case1_pod_basis.csv");
  CHECK(loose.dimension() < dflt.dimension());
  CHECK(run("basis " + case1() + " --end-to-end --rank-tol -1 --out " + dir.string()) != 0);
  fs::remove_all(dir);
}

TEST_CASE("invalid input gives a nonzero exit") {
  const fs::path dir = scratch("invalid");
  std::ofstream(dir / "bad.json") << R"({"case_id": "bad", "simulation": {"T": 1.0, "dt": 0.3}})";
  CHECK(run("simulate --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string()) == 2);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(run("simulate --config " + (dir / "broken.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run("simulate --out " + dir.string()) != 0);
  CHECK(run("table " + case1() + " --basis wavelet --out " + dir.string()) != 0);
  CHECK(run("verify --scope nonsense --out " + dir.string()) != 0);
  // No snapshots in the output directory and no --end-to-end.
  CHECK(run("table " + case1() + " --out " + dir.string()) == 1);
  fs::remove_all(dir);
}

TEST_CASE("plot-data profiles") {
  const fs::path dir = scratch("plot");
  REQUIRE(run("plot-data " + case1() + " --end-to-end --out " + dir.string()) == 0);
  std::ifstream in(dir / "case1_plot.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,x,u");
  std::map<double, std::vector<std::pair<double, double>>> profiles;
  while (std::getline(in, line)) {
    double t, x, u;
    char c1, c2;
    std::istringstream s(line);
    s >> t >> c1 >> x >> c2 >> u;
    profiles[t].emplace_back(x, u);
  }
  REQUIRE(profiles.size() == 5);
  double previous_mass = 1e300;
  for (const auto& [t, prof] : profiles) {
    REQUIRE(prof.size() == 129);
    CHECK(prof.front().first == 0.0);
    CHECK(prof.front().second == 0.0);
    CHECK(prof.back().first == 1.0);
    CHECK(prof.back().second == 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < prof.size(); ++i) {
      mass += 0.5 * (prof[i].second * prof[i].second + prof[i + 1].second * prof[i + 1].second) / 128.0;
    }
    CHECK(mass <= previous_mass);
    previous_mass = mass;
    if (t == 0.0) {
      for (const auto& [x, u] : prof) {
        if (x > 0.0 && x <= 0.5) CHECK(u == 1.0);
        if (x > 0.5) CHECK(u == 0.0);
      }
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("nothing is written outside --out") {
  const fs::path root = scratch("confine");
  const fs::path out = root / "out";
  const fs::path cwd = root / "cwd";
  fs::create_directories(cwd);
  const auto before = listing(root);
  const fs::path old = fs::current_path();
  fs::current_path(cwd);
  REQUIRE(run("simulate " + case1() + " --out " + out.string()) == 0);
  REQUIRE(run("table " + case1() + " --out " + out.string()) == 0);
  REQUIRE(run("plot-data " + case1() + " --out " + out.string()) == 0);
  REQUIRE(run("verify --scope spectrum --out " + out.string()) == 0);
  fs::current_path(old);
  for (const auto& p : listing(root)) {
    if (before.count(p)) continue;
    CAPTURE(p.string());
    CHECK((p == out || p.parent_path() == out));
  }
  CHECK(fs::is_empty(cwd));
  for (const auto& e : fs::directory_iterator(out)) CHECK(e.path().extension() != ".tmp");
  fs::remove_all(root);
}

TEST_CASE("verify passes by default") {
  const fs::path dir = scratch("verify");
  CHECK(run("verify --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "verify_report.csv"));
  CHECK(fs::exists(dir / "verify_report.json"));
  fs::remove_all(dir);
}
