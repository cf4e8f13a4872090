#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "wkbspec/cli.hpp"

using namespace wkbspec;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell and returns its exit status.
int run_binary(const std::string& args) {
  const std::string cmd = std::string(WKB_SPECTRA_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wkbspec_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(CliSpectrum, CoulombClosedJson) {
  auto r = run({"spectrum", "--potential", "coulomb", "--params", "alpha=1", "--l", "0", "--nr-max", "2", "--method",
                "closed", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["rows"][0]["energy"].get<double>(), -0.5);
  EXPECT_EQ(j["rows"][1]["energy"].get<double>(), -0.125);
  EXPECT_NEAR(j["rows"][2]["energy"].get<double>(), -1.0 / 18.0, 1e-15);
  EXPECT_EQ(j["rows"][0]["method"], "closed");
  EXPECT_TRUE(j.contains("config_echo"));
  EXPECT_EQ(j["config_echo"]["potential"], "coulomb");
  EXPECT_EQ(j["provenance"]["version"], cli::kVersion);
  EXPECT_TRUE(j["provenance"]["tolerances"].contains("quadrature_rel"));
}

TEST(CliSpectrum, CoulombQuadratureMatchesClosed) {
  auto r = run({"spectrum", "--potential", "coulomb", "--params", "alpha=1", "--l", "0", "--nr-max", "2", "--method",
                "quadrature", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = json::parse(r.out)["rows"];
  const double expected[] = {-0.5, -0.125, -1.0 / 18.0};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(rows[i]["energy"].get<double>(), expected[i], 1e-8);
    EXPECT_LT(std::abs(rows[i]["residual"].get<double>()), 1e-9);
  }
}

TEST(CliSpectrum, RowsSortedByLThenRadialNumber) {
  auto r = run({"spectrum", "--potential", "oscillator", "--l", "0", "--l-max", "2", "--nr-max", "2", "--method",
                "quadrature", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n_r,l,method,energy,residual");
  std::vector<std::pair<int, int>> order;
  while (std::getline(in, line)) {
    int n = 0, l = 0;
    std::sscanf(line.c_str(), "%d,%d", &n, &l);
    order.emplace_back(l, n);
  }
  ASSERT_EQ(order.size(), 9u);
  EXPECT_TRUE(std::is_sorted(order.begin(), order.end()));
}

TEST(CliSpectrum, ThreadCapDoesNotChangeOutput) {
  const std::vector<std::string> args = {"spectrum", "--potential", "coulomb", "--l-max", "2", "--nr-max", "3",
                                         "--method", "quadrature", "--format", "csv"};
  setenv("WKB_SPECTRA_THREADS", "1", 1);
  auto serial = run(args);
  setenv("WKB_SPECTRA_THREADS", "4", 1);
  auto parallel = run(args);
  unsetenv("WKB_SPECTRA_THREADS");
  ASSERT_EQ(serial.code, 0);
  EXPECT_EQ(serial.out, parallel.out);
}

TEST(CliSpectrum, HulthenUnboundExitsThree) {
  auto r = run({"spectrum", "--potential", "hulthen", "--params", "v0=1,r0=1", "--nr-max", "5"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("N=2"), std::string::npos) << r.err;
}

TEST(CliSpectrum, MultiwellLinearOscillator) {
  auto r = run({"spectrum", "--potential", "linear-oscillator", "--params", "k=1,omega=1", "--nr-max", "1", "--method",
                "multiwell", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = json::parse(r.out)["rows"];
  EXPECT_NEAR(rows[0]["energy"].get<double>(), 1.0, 1e-8);
  EXPECT_NEAR(rows[1]["energy"].get<double>(), 3.0, 1e-8);
}

TEST(CliSpectrum, MultiwellRequiresConfiningPotential) {
  EXPECT_EQ(run({"spectrum", "--potential", "coulomb", "--method", "multiwell"}).code, 2);
}

TEST(CliSpectrum, OracleMethod) {
  auto r = run({"spectrum", "--potential", "oscillator", "--nr-max", "2", "--method", "oracle", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = json::parse(r.out)["rows"];
  EXPECT_NEAR(rows[2]["energy"].get<double>(), 5.5, 1e-4);
}

TEST(CliSpectrum, TabulatedPotentialFromFile) {
  auto path = temp_file("table.csv");
  {
    std::ofstream f(path);
    f << "r,V\n";
    for (int i = 1; i <= 400; ++i) f << 0.02 * i << "," << 0.5 * (0.02 * i) * (0.02 * i) << "\n";
  }
  auto r = run({"spectrum", "--potential", "tabulated", "--table", path.string(), "--format", "json"});
  std::filesystem::remove(path);
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = json::parse(r.out)["rows"];
  EXPECT_EQ(rows[0]["method"], "quadrature");
  EXPECT_NEAR(rows[0]["energy"].get<double>(), 1.5, 1e-4);
}

TEST(CliSpectrum, ConfigFileWithCommandLineOverride) {
  auto path = temp_file("run.conf");
  {
    std::ofstream f(path);
    f << "potential=coulomb\nalpha=2\nnr-max=1\nformat=json\nmethod=closed\n";
  }
  auto from_file = run({"spectrum", "--config", path.string()});
  auto overridden = run({"spectrum", "--config", path.string(), "--params", "alpha=1"});
  std::filesystem::remove(path);
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(json::parse(from_file.out)["rows"][0]["energy"].get<double>(), -2.0);
  EXPECT_EQ(json::parse(overridden.out)["rows"][0]["energy"].get<double>(), -0.5);
  EXPECT_EQ(json::parse(from_file.out)["rows"].size(), 2u);
}

TEST(CliSpectrum, InvalidInputsExitTwo) {
  EXPECT_EQ(run({"spectrum", "--potential", "yukawa"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--potential", "coulomb", "--params", "omega=1"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--potential", "coulomb", "--params", "alpha=-1"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--potential", "coulomb", "--params", "alpha"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--potential", "coulomb", "--hbar", "0"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--potential", "coulomb", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--potential", "coulomb", "--nr", "3", "--nr-max", "1"}).code, 2);
  EXPECT_EQ(run({"launch"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(CliSpectrum, UnreachableToleranceExitsFour) {
  auto r = run({"spectrum", "--potential", "coulomb", "--method", "quadrature", "--tol-quad", "1e-30"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("spectrum"), std::string::npos);
}

TEST(CliSpectrum, WritesOutputFile) {
  auto path = temp_file("out.json");
  auto r = run({"spectrum", "--potential", "oscillator", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  auto j = json::parse(f);
  std::filesystem::remove(path);
  EXPECT_EQ(j["rows"][0]["energy"].get<double>(), 1.5);
}

TEST(CliJson, RoundTripIsBitExact) {
  auto r = run({"spectrum", "--potential", "hulthen", "--params", "v0=10,r0=1", "--l-max", "1", "--nr-max", "2",
                "--method", "quadrature", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  auto again = json::parse(j.dump());
  for (std::size_t i = 0; i < j["rows"].size(); ++i) {
    const double a = j["rows"][i]["energy"].get<double>();
    const double b = again["rows"][i]["energy"].get<double>();
    EXPECT_EQ(std::memcmp(&a, &b, sizeof(double)), 0);
  }
  // and the serialized value equals the library result bit for bit
  const double direct = quantize_2tp(PotentialSpec::hulthen(10.0, 1.0), QuantumNumbers(2, 1)).energy;
  const double parsed = j["rows"][5]["energy"].get<double>();
  EXPECT_EQ(std::memcmp(&direct, &parsed, sizeof(double)), 0);
}

TEST(CliAngular, Examples) {
  auto a = run({"angular", "--l", "0", "--mz", "0", "--format", "json"});
  ASSERT_EQ(a.code, 0) << a.err;
  auto row = json::parse(a.out)["rows"][0];
  EXPECT_EQ(row["M"].get<double>(), 0.5);
  EXPECT_EQ(row["M2"].get<double>(), 0.25);

  auto b = run({"angular", "--l", "3", "--mz", "2", "--samples", "8", "--format", "json"});
  ASSERT_EQ(b.code, 0) << b.err;
  auto jb = json::parse(b.out);
  EXPECT_EQ(jb["rows"][0]["M"].get<double>(), 3.5);
  EXPECT_NEAR(jb["rows"][0]["polar_integral"].get<double>(), std::numbers::pi * 1.5, 1e-10);
  EXPECT_EQ(jb["samples"].size(), 8u);

  EXPECT_EQ(run({"angular", "--l", "1", "--mz", "2"}).code, 2);
}

TEST(CliWavefunction, NodesAndCsv) {
  auto j = run({"wavefunction", "--potential", "coulomb", "--nr", "3", "--l", "1", "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  auto parsed = json::parse(j.out);
  EXPECT_EQ(parsed["nodes"], 3);
  EXPECT_EQ(parsed["r"].size(), 4096u);

  auto c = run({"wavefunction", "--potential", "oscillator", "--nr", "1", "--points", "64", "--format", "csv"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out.rfind("# n_r=1 l=0", 0), 0u);

  auto s = run({"wavefunction", "--potential", "coulomb", "--nr", "1", "--form", "standing", "--format", "json"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(json::parse(s.out)["form"], "standing-wave");
}

TEST(CliCompare, CoulombAndMorse) {
  auto c = run({"compare", "--potential", "coulomb", "--nr-max", "2", "--format", "json"});
  ASSERT_EQ(c.code, 0) << c.err;
  auto rows = json::parse(c.out)["rows"];
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_LT(std::abs(row["delta_quadrature"].get<double>()), 1e-3);
    EXPECT_LT(std::abs(row["delta_oracle_ll1"].get<double>()), 1e-3);
  }

  auto m = run({"compare", "--potential", "morse", "--format", "csv"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_NE(m.out.find("0.414213562"), std::string::npos) << m.out;

  EXPECT_EQ(run({"compare", "--potential", "nonsense"}).code, 2);
}

TEST(CliCompare, EveryCellFailingExitsFour) {
  EXPECT_EQ(run({"compare", "--potential", "hulthen", "--params", "v0=1", "--nr", "3", "--nr-max", "3"}).code, 4);
}

TEST(CliBinary, ExitCodes) {
  EXPECT_EQ(run_binary("spectrum --potential coulomb --nr-max 2"), 0);
  EXPECT_EQ(run_binary("spectrum --potential yukawa"), 2);
  EXPECT_EQ(run_binary("spectrum --potential hulthen --params v0=1,r0=1 --nr-max 5"), 3);
  EXPECT_EQ(run_binary("spectrum --potential coulomb --method quadrature --tol-quad 1e-30"), 4);
  EXPECT_EQ(run_binary("--help"), 0);
}
