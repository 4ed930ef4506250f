#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qprobe/io.hpp"
#include "qprobe_cli/cli.hpp"

namespace fs = std::filesystem;
using qprobe::io::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qprobe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qprobe");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return qprobe::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

constexpr const char* kPauliMixed = R"({
  "system": {"model": "pauli_x"},
  "state": {"maximally_mixed": true}
})";

constexpr const char* kFiveLines = R"({
  "system": {"model": "ladder", "levels": 5, "spacing": 1.0},
  "state": {"random_populations": {"seed": 3, "floor": 0.1}},
  "probe": {"p0": 0, "g": 1, "tau": 1, "mode": "squeezed", "s": 7.0},
  "sampling": {"n": 50000, "seed": 11}
})";

}  // namespace

TEST_F(CliTest, SpectrumPauliMixed) {
  const auto cfg = write("c.json", kPauliMixed);
  ASSERT_EQ(run({"spectrum", "--config", cfg}), 0) << err_.str();
  const auto j = json::parse(out_.str());
  const auto& lines = j.at("spectrum").at("lines");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NEAR(lines[0].at("energy").get<double>(), -1.0, 1e-12);
  EXPECT_NEAR(lines[0].at("probability").get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(lines[1].at("energy").get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, SpectrumFiveLines) {
  const auto cfg = write("c.json", kFiveLines);
  ASSERT_EQ(run({"spectrum", "--config", cfg, "--format", "csv"}), 0) << err_.str();
  std::istringstream in(out_.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "energy,probability,degeneracy");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST_F(CliTest, MalformedConfigExitsTwo) {
  const auto cfg = write("bad.json", "{\"system\": ");
  EXPECT_EQ(run({"spectrum", "--config", cfg}), 2);
  EXPECT_FALSE(err_.str().empty());
  const auto unknown = write("unknown.json", R"({"system": {"model": "nope"}, "state": {"maximally_mixed": true}})");
  EXPECT_EQ(run({"spectrum", "--config", unknown}), 2);
  EXPECT_EQ(run({"spectrum", "--config", path("missing.json")}), 2);
  EXPECT_EQ(run({"bogus"}), 2);
  EXPECT_EQ(run({"spectrum"}), 2);
}

TEST_F(CliTest, SampleIsByteIdentical) {
  const auto cfg = write("c.json", kFiveLines);
  ASSERT_EQ(run({"sample", "--config", cfg, "--out", path("a.csv")}), 0) << err_.str();
  ASSERT_EQ(run({"sample", "--config", cfg, "--out", path("b.csv")}), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ASSERT_EQ(run({"sample", "--config", cfg, "--seed", "12", "--out", path("c.csv")}), 0);
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(CliTest, AutoSampleCountMatchesRows) {
  const auto cfg = write("c.json", R"({
    "system": {"model": "pauli_x"},
    "state": {"thermal": {"beta": 0.5}},
    "probe": {"g": 1, "tau": 1, "mode": "squeezed", "s": 2.0},
    "sampling": {"n": "auto", "seed": 1}
  })");
  ASSERT_EQ(run({"sample", "--config", cfg, "--out", path("r.csv")}), 0) << err_.str();
  std::ifstream in(path("r.csv"));
  const auto loaded = qprobe::io::read_record(in);
  // sigma_E = 1/(2 sqrt 2), smallest population 1/(1 + e)
  const double p_min = 1.0 / (1.0 + std::exp(1.0));
  const auto expected = static_cast<std::size_t>(std::ceil(8.0 / p_min));
  EXPECT_EQ(loaded.record.samples.size(), expected);
  EXPECT_EQ(loaded.header.at("config").at("sampling").at("n").get<std::size_t>(), expected);
}

TEST_F(CliTest, SqueezingNarrowsPeaks) {
  auto spread = [&](double s) {
    const auto cfg = write("s.json", json{{"system", {{"model", "pauli_z"}}},
                                          {"state", {{"matrix", {{1, 0}, {0, 0}}}}},
                                          {"probe", {{"g", 1}, {"tau", 1}, {"mode", "squeezed"}, {"s", s}}},
                                          {"sampling", {{"n", 20000}, {"seed", 4}}}}
                                         .dump());
    EXPECT_EQ(run({"sample", "--config", cfg, "--out", path("r.csv")}), 0) << err_.str();
    std::ifstream in(path("r.csv"));
    const auto rec = qprobe::io::read_record(in).record;
    double m = 0.0, v = 0.0;
    for (double p : rec.samples) m += p;
    m /= rec.samples.size();
    for (double p : rec.samples) v += (p - m) * (p - m);
    return std::sqrt(v / rec.samples.size());
  };
  const double ratio = spread(1.0) / spread(100.0);
  EXPECT_NEAR(ratio, 100.0, 3.0);
}

TEST_F(CliTest, ReconstructFromRecord) {
  const auto cfg = write("c.json", kFiveLines);
  ASSERT_EQ(run({"sample", "--config", cfg, "--out", path("r.csv")}), 0);
  ASSERT_EQ(run({"reconstruct", "--config", cfg, "--record", path("r.csv")}), 0) << err_.str();
  const auto from_file = json::parse(out_.str());
  EXPECT_EQ(from_file.at("reconstruction").at("lines").size(), 5u);
  ASSERT_EQ(run({"reconstruct", "--config", cfg}), 0);
  const auto in_memory = json::parse(out_.str());
  EXPECT_EQ(in_memory.at("reconstruction"), from_file.at("reconstruction"));
}

TEST_F(CliTest, ReportEmbedsConfigAndReruns) {
  const auto cfg = write("c.json", kFiveLines);
  ASSERT_EQ(run({"reconstruct", "--config", cfg, "--seed", "99"}), 0) << err_.str();
  const std::string first = out_.str();
  const auto report = write("report.json", first);
  ASSERT_EQ(run({"reconstruct", "--config", report}), 0) << err_.str();
  EXPECT_EQ(out_.str(), first);
  EXPECT_EQ(json::parse(first).at("config").at("sampling").at("seed"), 99);
}

TEST_F(CliTest, ThermoExact) {
  const auto cfg = write("c.json", R"({
    "system": {"model": "ladder", "levels": 3},
    "state": {"thermal": {"beta": 0.8}},
    "thermo": {"beta_grid": {"lo": 0.5, "hi": 2.0, "points": 4}}
  })");
  ASSERT_EQ(run({"thermo", "--config", cfg}), 0) << err_.str();
  const auto j = json::parse(out_.str());
  EXPECT_NEAR(j.at("beta_hat").get<double>(), 0.8, 1e-10);
  EXPECT_EQ(j.at("grid").size(), 4u);
  ASSERT_EQ(run({"thermo", "--config", cfg, "--format", "table"}), 0);
  EXPECT_EQ(out_.str().rfind("# beta Z logZ F C S U", 0), 0u);
}

TEST_F(CliTest, ThermoNonThermalIsContractViolation) {
  const auto cfg = write("c.json", R"({
    "system": {"model": "ladder", "levels": 3},
    "state": {"matrix": [[0.5, 0, 0], [0, 0.15, 0], [0, 0, 0.35]]}
  })");
  EXPECT_EQ(run({"thermo", "--config", cfg}), 4);
}

TEST_F(CliTest, QuenchAndOverlap) {
  const auto cfg = write("c.json", R"({
    "quench": {"initial": {"model": "pauli_z"}, "final": {"model": "pauli_x"}, "beta": 1.0},
    "overlap": {"first": {"model": "pauli_z"}, "second": {"model": "pauli_x"}}
  })");
  ASSERT_EQ(run({"quench", "--config", cfg}), 0) << err_.str();
  EXPECT_NEAR(json::parse(out_.str()).at("average_work").get<double>(), std::tanh(1.0), 1e-10);
  ASSERT_EQ(run({"overlap", "--config", cfg}), 0) << err_.str();
  EXPECT_NEAR(json::parse(out_.str()).at("P0").get<double>(), 0.5, 1e-12);
}

TEST_F(CliTest, OverlapDegenerateExitsFour) {
  const auto cfg = write("c.json", R"({
    "overlap": {"first": {"model": "rabi", "sites": 2, "rotate": "hadamard", "scale": 0.0}, "second": {"model": "pauli_x"}}
  })");
  EXPECT_EQ(run({"overlap", "--config", cfg}), 2);  // dimension mismatch is a config error
  const auto degenerate = write("d.json", R"({
    "overlap": {"first": {"matrix": [[0, 0], [0, 0]]}, "second": {"model": "pauli_x"}}
  })");
  EXPECT_EQ(run({"overlap", "--config", degenerate}), 4);
}

TEST_F(CliTest, SweepTables) {
  const auto cfg = write("c.json", R"({
    "system": {"model": "rabi", "sites": 2},
    "sweep": {"parameter": "beta", "beta_grid": {"lo": 0.1, "hi": 10, "points": 7}}
  })");
  ASSERT_EQ(run({"sweep", "--config", cfg}), 0) << err_.str();
  std::istringstream in(out_.str());
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 7);

  const auto lam = write("l.json", R"({
    "sweep": {"parameter": "lambda", "family": {"family": "dicke", "atoms": 4},
              "grid": {"lo": 0, "hi": 2, "points": 5}, "reference_lambda": 0}
  })");
  ASSERT_EQ(run({"sweep", "--config", lam, "--format", "json"}), 0) << err_.str();
  const auto j = json::parse(out_.str());
  ASSERT_EQ(j.at("rows").size(), 5u);
  EXPECT_NEAR(j.at("rows")[0].at("overlap").get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j.at("critical_coupling_illustrative").get<bool>());
}

TEST_F(CliTest, PresetProbe) {
  const auto cfg = write("c.json", R"({
    "system": {"model": "rabi", "sites": 1},
    "state": {"maximally_mixed": true},
    "probe": {"preset": "cavity-qed", "mode": "squeezed", "s": 1.0}
  })");
  ASSERT_EQ(run({"spectrum", "--config", cfg}), 0) << err_.str();
  const auto j = json::parse(out_.str());
  EXPECT_NEAR(j.at("resolution").at("energy_stddev").get<double>(), 1.0 / (std::sqrt(2.0) * 40.0), 1e-12);
  EXPECT_EQ(j.at("config").at("probe").at("tau"), 40.0);
}
