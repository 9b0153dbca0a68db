#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "iabnet/analytic.hpp"
#include "iabnet/config.hpp"

namespace fs = std::filesystem;
using namespace iabnet;

namespace {

std::string cli_path() {
  const char* p = std::getenv("IABNET_CLI");
  REQUIRE_MESSAGE(p != nullptr, "IABNET_CLI must point at the CLI binary");
  return p;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("iabnet_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int counter;
};
int TempDir::counter = 0;

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

// shrunken library keeps the optimize/validate paths quick
std::string small_config_text() {
  std::string text = default_config_text();
  const auto pos = text.find("C_max = 800");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "C_max = 24 ");
  return text;
}

}  // namespace

TEST_CASE("emit-default-config round trip") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.txt";
  REQUIRE(run(cli_path() + " --emit-default-config " + cfg_path.string()) == 0);
  const SystemConfig parsed = load_config_file(cfg_path.string());
  CHECK(config_hash(parsed) == config_hash(default_config()));
}

TEST_CASE("invalid configs exit 2 and name the key") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "bad.txt";
  std::ofstream(cfg_path) << "alpha_L = 3\nalpha_NL = 2\n";
  const fs::path err = dir.path / "stderr.txt";
  CHECK(run(cli_path() + " analyze --config " + cfg_path.string() + " --out-dir " +
            dir.path.string() + " 2> " + err.string()) == 2);
  CHECK(slurp(err).find("alpha_NL") != std::string::npos);

  CHECK(run(cli_path() + " analyze --config " + (dir.path / "missing.txt").string() +
            " 2> /dev/null") == 2);
  CHECK(run(cli_path() + " 2> /dev/null > /dev/null") == 2);
}

TEST_CASE("analyze matches direct library calls bit for bit") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.txt";
  REQUIRE(run(cli_path() + " --emit-default-config " + cfg_path.string()) == 0);
  REQUIRE(run(cli_path() + " analyze --config " + cfg_path.string() +
              " --gamma 10 --C 200 --eta 0.9 --out-dir " + dir.path.string() +
              " > /dev/null") == 0);

  std::ifstream csv(dir.path / "analyze.csv");
  std::string header, row;
  REQUIRE(std::getline(csv, header));
  REQUIRE(std::getline(csv, row));
  CHECK(header == "gamma_db,cov_sbs,cov_mbs,cov_bh,apt_total,binding_side");
  const auto cells = split_csv_line(row);
  REQUIRE(cells.size() == 6);

  const SystemConfig cfg = default_config();
  const double g = db_to_linear(10.0);
  CHECK(std::stod(cells[1]) == analytic::coverage_sbs(g, 200, cfg).value);
  CHECK(std::stod(cells[2]) == analytic::coverage_mbs(g, 200, cfg).value);
  CHECK(std::stod(cells[3]) == analytic::coverage_backhaul(g, cfg).value);
  CHECK(std::stod(cells[4]) == analytic::apt(0.9, 200, cfg).total);
  CHECK(cells[5] == "backhaul");
}

TEST_CASE("analyze edge rows") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.txt";
  REQUIRE(run(cli_path() + " --emit-default-config " + cfg_path.string()) == 0);

  SUBCASE("huge threshold gives an all-but-zero row") {
    REQUIRE(run(cli_path() + " analyze --config " + cfg_path.string() +
                " --gamma 90 --C 0 --eta 0.5 --out-dir " + dir.path.string() +
                " > /dev/null") == 0);
    std::ifstream csv(dir.path / "analyze.csv");
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    const auto cells = split_csv_line(row);
    for (int i = 1; i <= 3; ++i) CHECK(std::stod(cells[i]) <= 1e-6);
  }
  SUBCASE("eta = 0 zeroes the throughput column") {
    REQUIRE(run(cli_path() + " analyze --config " + cfg_path.string() +
                " --gamma 0,10 --C 100 --eta 0 --out-dir " + dir.path.string() +
                " > /dev/null") == 0);
    std::ifstream csv(dir.path / "analyze.csv");
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) CHECK(std::stod(split_csv_line(line)[4]) == 0.0);
  }
  SUBCASE("integrand dump is flag-gated") {
    REQUIRE(run(cli_path() + " analyze --config " + cfg_path.string() +
                " --gamma 10 --C 0 --eta 0.9 --dump-integrands samples.csv --out-dir " +
                dir.path.string() + " > /dev/null") == 0);
    const std::string dump = slurp(dir.path / "samples.csv");
    CHECK(dump.rfind("kind,link,r,integrand\n", 0) == 0);
    CHECK(std::count(dump.begin(), dump.end(), '\n') > 100);
    CHECK(dump.find("sbs,los,") != std::string::npos);
  }
}

TEST_CASE("sweep ranges") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.txt";
  REQUIRE(run(cli_path() + " --emit-default-config " + cfg_path.string()) == 0);

  SUBCASE("single-point range produces one data row") {
    REQUIRE(run(cli_path() + " sweep --config " + cfg_path.string() +
                " --axis eta --range 0.9:1:0.9 --C 0 --out-dir " + dir.path.string() +
                " > /dev/null") == 0);
    std::ifstream csv(dir.path / "sweep.csv");
    std::string line;
    int rows = 0;
    std::getline(csv, line);  // header
    while (std::getline(csv, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 1);
  }
  SUBCASE("empty range exits 2") {
    CHECK(run(cli_path() + " sweep --config " + cfg_path.string() +
              " --axis eta --range 1:1:0 --out-dir " + dir.path.string() +
              " 2> /dev/null") == 2);
  }
  SUBCASE("unknown axis exits 2") {
    CHECK(run(cli_path() + " sweep --config " + cfg_path.string() +
              " --axis bogus --range 0:1:1 2> /dev/null") == 2);
  }
  SUBCASE("two-axis sweep emits the full grid sorted by axis values") {
    REQUIRE(run(cli_path() + " sweep --config " + cfg_path.string() +
                " --axis C --range 0,100 --axis2 eta --range2 0.5,0.25 --out-dir " +
                dir.path.string() + " > /dev/null") == 0);
    std::ifstream csv(dir.path / "sweep.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("C,eta,", 0) == 0);
    std::vector<std::pair<double, double>> seen;
    while (std::getline(csv, line)) {
      const auto cells = split_csv_line(line);
      seen.emplace_back(std::stod(cells[0]), std::stod(cells[1]));
    }
    const std::vector<std::pair<double, double>> expected = {
        {0, 0.25}, {0, 0.5}, {100, 0.25}, {100, 0.5}};
    CHECK(seen == expected);
  }
}

TEST_CASE("optimize and validate are reproducible byte for byte") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.txt";
  std::ofstream(cfg_path) << small_config_text();
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);

  auto run_into = [&](const std::string& sub) {
    const fs::path out = dir.path / sub;
    REQUIRE(run(cli_path() + " optimize --config " + cfg_path.string() +
                " --algorithm all --seed 7 --out-dir " + out.string() + " > /dev/null") == 0);
    return out;
  };
  const fs::path a = run_into("a");
  const fs::path b = run_into("b");
  for (const char* name : {"results.csv", "trace.json", "manifest.json"})
    CHECK(slurp(a / name) == slurp(b / name));

  SUBCASE("results carry every algorithm with the power identity") {
    std::ifstream csv(a / "results.csv");
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    const SystemConfig cfg = load_config_file(cfg_path.string());
    while (std::getline(csv, line)) {
      ++rows;
      const auto cells = split_csv_line(line);
      const int c_star = std::stoi(cells[2]);
      const double p_tr = std::stod(cells[4]);
      const double total = cfg.rho_s * p_tr + cfg.p_s_fc_w +
                           cfg.omega_ca_w_per_bit * cfg.file_size_bits * c_star;
      CHECK(total == doctest::Approx(cfg.p_s_max_w).epsilon(1e-12));
    }
    CHECK(rows == 5);  // jcspa + four baselines
  }
  ::unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("validate command") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.txt";
  std::ofstream(cfg_path) << small_config_text();

  SUBCASE("n = 0 is a usage error") {
    CHECK(run(cli_path() + " validate --config " + cfg_path.string() +
              " --n 0 2> /dev/null") == 2);
  }
  SUBCASE("produces a deterministic report with the declared schema") {
    const std::string cmd = cli_path() + " validate --config " + cfg_path.string() +
                            " --n 300 --C 10 --seed 5 --out-dir ";
    const int rc1 = run(cmd + (dir.path / "v1").string() + " > /dev/null");
    const int rc2 = run(cmd + (dir.path / "v2").string() + " > /dev/null");
    CHECK((rc1 == 0 || rc1 == 4));
    CHECK(rc1 == rc2);
    const std::string r1 = slurp(dir.path / "v1" / "validation.csv");
    CHECK(r1 == slurp(dir.path / "v2" / "validation.csv"));
    CHECK(r1.rfind("check,kind,gamma_db,C,analytic,empirical,ci99,delta,tolerance,pass\n", 0) ==
          0);
  }
  SUBCASE("per-realization trace is flag-gated") {
    const int rc = run(cli_path() + " validate --config " + cfg_path.string() +
                       " --n 200 --C 10 --seed 5 --trace --out-dir " +
                       (dir.path / "vt").string() + " > /dev/null");
    CHECK((rc == 0 || rc == 4));
    const std::string tr = slurp(dir.path / "vt" / "trace.csv");
    CHECK(tr.rfind("realization,served,tier,sinr\n", 0) == 0);
    CHECK(std::count(tr.begin(), tr.end(), '\n') == 201);  // header + one row each
  }
}

TEST_CASE("sweep rebuilds coverage when the axis moves it") {
  TempDir dir;
  const fs::path cfg_path = dir.path / "cfg.txt";
  REQUIRE(run(cli_path() + " --emit-default-config " + cfg_path.string()) == 0);
  REQUIRE(run(cli_path() + " sweep --config " + cfg_path.string() +
              " --axis gamma0 --range 5,10 --C 0 --eta 0.9 --out-dir " + dir.path.string() +
              " > /dev/null") == 0);
  std::ifstream csv(dir.path / "sweep.csv");
  std::string header, row5, row10;
  REQUIRE(std::getline(csv, header));
  REQUIRE(std::getline(csv, row5));
  REQUIRE(std::getline(csv, row10));
  CHECK(header.rfind("gamma0_db,", 0) == 0);
  // a higher threshold can only lower coverage-driven throughput terms,
  // but log2(1+gamma0) grows; both rows must at least be positive and differ
  CHECK(std::stod(split_csv_line(row5)[1]) > 0.0);
  CHECK(std::stod(split_csv_line(row10)[1]) > 0.0);
  CHECK(split_csv_line(row5)[1] != split_csv_line(row10)[1]);
}
