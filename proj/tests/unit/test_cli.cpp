#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcc/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run fcc_run(std::vector<std::string> args) {
  args.insert(args.begin(), "fcc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fcc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fcc_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::vector<std::string> kLightLoad{"--R", "1", "--L", "0.25e-3", "--C", "100e-6", "--Vdc", "100", "--T", "1200e-6"};
const std::vector<std::string> kTable{"--R", "2", "--L", "10e-3", "--C", "100e-6", "--Vdc", "100"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("analyze report") {
  const Run r = fcc_run(cat({"analyze"}, kLightLoad));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"alpha", "beta", "eig_real", "eig_imag", "spectral_radius", "jury_margin_beta",
                          "jury_margin_alpha", "stable"}) {
    CHECK(j["stability"].contains(key));
  }
  for (const char* key : {"x0", "x_half", "fixed_point_residual", "half_period_current_residual"}) {
    CHECK(j["steady_state"].contains(key));
  }
  for (const char* key : {"v_avg", "i_avg", "i_nominal", "i_deviation_bound", "i_max_half"}) {
    CHECK(j["averages"].contains(key));
  }
  CHECK(j["energy_residuals"].contains("power_balance_residual"));
  CHECK(j["energy_residuals"].contains("ohmic_residual"));
  CHECK(j["stability"]["stable"] == true);
  CHECK(j["summary"]["v_avg"] == "50.0000");
  // Full precision in the JSON numbers.
  CHECK(j["averages"]["i_avg"].get<double>() == doctest::Approx(33.131477620259963).epsilon(1e-14));
}

TEST_CASE("reference: analyze summary, light load") {
  const auto j = nlohmann::json::parse(fcc_run(cat({"analyze"}, kLightLoad)).out);
  CHECK(j["summary"]["i_avg"] == "33.1215");
}

TEST_CASE("analyze, unforced") {
  const Run r = fcc_run({"analyze", "--R", "1", "--L", "1", "--C", "1", "--Vdc", "0", "--T", "1"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["stability"]["stable"] == true);
  CHECK(j["averages"]["i_avg"] == 0.0);
  CHECK(j["averages"]["v_avg"] == 0.0);
  CHECK(j["averages"]["i_deviation_bound"] == 0.0);
  CHECK(j["steady_state"]["x0"][0] == 0.0);
  CHECK(j["steady_state"]["x_half"][1] == 0.0);
}

TEST_CASE("validation errors exit with 2") {
  const Run bad = fcc_run({"analyze", "--R", "1", "--L", "-1", "--C", "1", "--Vdc", "1", "--T", "1"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("L must be > 0") != std::string::npos);
  CHECK(fcc_run({"analyze"}).code == 2);
  CHECK(fcc_run({"frobnicate"}).code == 2);
  CHECK(fcc_run({"analyze", "--R", "x"}).code == 2);
  CHECK(fcc_run(cat({"simulate"}, kLightLoad)).code == 2);
}

TEST_CASE("parameter file with flag override") {
  TempDir dir;
  {
    std::ofstream f(dir / "light_load.txt");
    f << "# light load\nR = 5\nL = 0.25e-3\nC = 100e-6\nVdc = 100\nT = 1200e-6\n";
  }
  const Run r = fcc_run({"analyze", "--params", dir / "light_load.txt", "--R", "1"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["params"]["R"] == 1.0);
  CHECK(fcc_run({"analyze", "--params", dir / "missing.txt"}).code == 3);
  {
    std::ofstream f(dir / "duty.txt");
    f << "R = 1\nD = 0.3\n";
  }
  CHECK(fcc_run({"analyze", "--params", dir / "duty.txt"}).code == 2);
}

TEST_CASE("simulate, closed form tiling") {
  TempDir dir;
  const Run r = fcc_run(cat({"simulate", "--periods", "2", "--output", dir / "cf.csv", "--deterministic"}, kLightLoad));
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = read_csv(dir / "cf.csv", &header);
  CHECK(header == "t_s,i_A,v_V");
  CHECK(rows.size() == 2 * 512 + 1);
  CHECK(std::abs(rows.front()[1] - rows.back()[1]) <= 1e-9);
  CHECK(std::abs(rows.front()[2] - rows.back()[2]) <= 1e-9);
  CHECK(rows.back()[0] == doctest::Approx(2 * 1200e-6).epsilon(1e-15));
  CHECK(fs::exists(dir / "cf.csv.manifest.json"));
  const std::string text = slurp(dir / "cf.csv");
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("simulate, unforced") {
  TempDir dir;
  REQUIRE(fcc_run({"simulate", "--R", "1", "--L", "1", "--C", "1", "--Vdc", "0", "--T", "1", "--periods", "3", "--source",
                   "rk45", "--output", dir / "z.csv"})
              .code == 0);
  for (const auto& row : read_csv(dir / "z.csv", nullptr)) {
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
  }
}

TEST_CASE("simulate, rk45 light-load protocol against the closed form") {
  TempDir dir;
  const Run r = fcc_run(cat({"simulate", "--source", "rk45", "--output", dir / "rk.csv"}, kLightLoad));
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "rk.csv", nullptr);
  REQUIRE(rows.size() == 20 * 512 + 1);
  double si = 0, sv = 0;
  for (std::size_t k = 19 * 512; k < rows.size() - 1; ++k) {
    si += 0.5 * (rows[k][1] + rows[k + 1][1]);
    sv += 0.5 * (rows[k][2] + rows[k + 1][2]);
  }
  CHECK(std::abs(si / 512 - 33.13148) <= 0.005);
  CHECK(std::abs(sv / 512 - 50.0) <= 0.01);
  CHECK(r.out.find("v_avg = 50.0000") != std::string::npos);
}

TEST_CASE("simulate, explicit initial state and bad output path") {
  TempDir dir;
  CHECK(fcc_run(cat({"simulate", "--source", "rk45", "--periods", "1", "--i0", "-10.830524073543467", "--v0",
                     "-49.39443286077989", "--output", dir / "x.csv"},
                    kLightLoad))
            .code == 0);
  const auto rows = read_csv(dir / "x.csv", nullptr);
  CHECK(std::abs(rows.back()[1] + 10.830524073543467) <= 1e-6);
  CHECK(fcc_run(cat({"simulate", "--output", (dir.path / "no" / "x.csv").string()}, kLightLoad)).code == 3);
  CHECK(fcc_run(cat({"simulate", "--i0", "1", "--output", dir / "y.csv"}, kLightLoad)).code == 2);
  CHECK(fcc_run(cat({"simulate", "--source", "euler", "--output", dir / "y.csv"}, kLightLoad)).code == 2);
  CHECK(fcc_run(cat({"simulate", "--periods", "0", "--output", dir / "y.csv"}, kLightLoad)).code == 2);
}

TEST_CASE("sweep, three reference periods") {
  TempDir dir;
  const Run r = fcc_run(cat({"sweep", "--t-from", "400e-5", "--t-to", "1600e-5", "--steps", "3", "--scale", "log",
                             "--output", dir / "t.csv"},
                            kTable));
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = read_csv(dir / "t.csv", &header);
  CHECK(header == "T_s,i_avg_A,i_nominal_A,bound_A,conjecture_ok");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == 400e-5);
  CHECK(rows[1][0] == doctest::Approx(800e-5).epsilon(1e-14));
  CHECK(rows[2][0] == 1600e-5);
  CHECK(std::abs(rows[0][1] - 24.3412) <= 1e-3 * 24.3412);
  CHECK(std::abs(rows[1][1] - 13.0181) <= 1e-3 * 13.0181);
  CHECK(std::abs(rows[2][1] - 1.8258) <= 1e-3 * 1.8258);
  for (const auto& row : rows) {
    CHECK(row[2] == 25.0);
    CHECK(row[4] == 1.0);
  }
}

TEST_CASE("sweep validation and linear spacing") {
  TempDir dir;
  CHECK(fcc_run(cat({"sweep", "--t-from", "1e-3", "--t-to", "1e-3", "--steps", "3", "--output", dir / "a.csv"}, kTable))
            .code == 2);
  CHECK(fcc_run(cat({"sweep", "--t-from", "0", "--t-to", "1e-3", "--steps", "3", "--output", dir / "a.csv"}, kTable))
            .code == 2);
  CHECK(fcc_run(cat({"sweep", "--t-from", "1e-3", "--t-to", "2e-3", "--steps", "1", "--output", dir / "a.csv"}, kTable))
            .code == 2);
  REQUIRE(fcc_run(cat({"sweep", "--t-from", "1e-3", "--t-to", "5e-3", "--steps", "5", "--scale", "linear", "--output",
                       dir / "lin.csv"},
                      kTable))
              .code == 0);
  const auto rows = read_csv(dir / "lin.csv", nullptr);
  REQUIRE(rows.size() == 5);
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(rows[k][0] == doctest::Approx(1e-3 * (k + 1)).epsilon(1e-15));
}

TEST_CASE("profiles") {
  TempDir dir;
  const Run r = fcc_run(cat({"profiles", "--t-list", "400e-5,800e-5,1600e-5", "--output", dir / "p.csv", "--gnuplot",
                             dir / "p.gp"},
                            kTable));
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = read_csv(dir / "p.csv", &header);
  CHECK(header == "tau,i_A_T1,v_V_T1,i_A_T2,v_V_T2,i_A_T3,v_V_T3");
  REQUIRE(rows.size() == 2 * 512 + 1);
  CHECK(rows.front()[0] == 0.0);
  CHECK(rows.back()[0] == 2.0);
  for (int p = 0; p < 3; ++p) {
    const std::size_t ic = 1 + 2 * p;
    const std::size_t vc = 2 + 2 * p;
    // v(0) + v(T/2) = Vdc, tau = 0.5 is row 256.
    CHECK(std::abs(rows[0][vc] + rows[256][vc] - 100.0) <= 1e-9 * 100.0);
    double peak = 0;
    for (const auto& row : rows) peak = std::max(peak, std::abs(row[ic]));
    for (std::size_t k = 0; k + 256 < rows.size(); ++k) CHECK(std::abs(rows[k][ic] - rows[k + 256][ic]) <= 1e-8 * peak);
  }
  CHECK(slurp(dir / "p.gp").find("plot") != std::string::npos);
  CHECK(fcc_run(cat({"profiles", "--t-list", "", "--output", dir / "q.csv"}, kTable)).code == 2);
  CHECK(fcc_run(cat({"profiles", "--t-list", "1e-3,abc", "--output", dir / "q.csv"}, kTable)).code == 2);
}

TEST_CASE("deterministic runs are byte-identical") {
  TempDir dir;
  for (const char* name : {"a", "b"}) {
    const std::string out = dir / (std::string(name) + ".csv");
    REQUIRE(fcc_run(cat({"sweep", "--t-from", "1e-5", "--t-to", "2e-2", "--steps", "50", "--output", out,
                         "--deterministic"},
                        kTable))
                .code == 0);
  }
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  const auto ma = nlohmann::json::parse(slurp(dir / "a.csv.manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(dir / "b.csv.manifest.json"));
  CHECK(!ma.contains("timestamp"));
  ma.at("output_paths");
  CHECK(ma["params"] == mb["params"]);
  CHECK(ma["tool_version"] == fcc::cli::kToolVersion);

  REQUIRE(fcc_run(cat({"simulate", "--source", "rk45", "--periods", "2", "--output", dir / "s1.csv",
                       "--deterministic"},
                      kLightLoad))
              .code == 0);
  REQUIRE(fcc_run(cat({"simulate", "--source", "rk45", "--periods", "2", "--output", dir / "s2.csv",
                       "--deterministic"},
                      kLightLoad))
              .code == 0);
  CHECK(slurp(dir / "s1.csv") == slurp(dir / "s2.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "s1.csv.manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["config"]["abs_tol"] == 1e-9);
}
