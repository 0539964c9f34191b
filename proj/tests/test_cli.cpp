#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "cparls/kruskal.hpp"
#include "cparls/sparse_tensor.hpp"
#include "cparls/fit.hpp"

using namespace cparls;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cparls_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Exact rank-1 10x10x10 tensor with its generating model.
  void make_rank_one() {
    auto r = run({"synth", "--shape", "10,10,10", "--rank", "1", "--concentrated", "0", "--no-noise", "--seed", "3",
                  "--out", path("syn")});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  std::vector<std::map<std::string, std::string>> read_csv(const std::string& file) {
    std::istringstream in(slurp(file));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    std::stringstream hs(line);
    for (std::string f; std::getline(hs, f, ',');) header.push_back(f);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
      std::map<std::string, std::string> row;
      std::stringstream ls(line);
      std::string f;
      for (std::size_t j = 0; j < header.size(); ++j) {
        std::getline(ls, f, ',');
        row[header[j]] = f;
      }
      rows.push_back(row);
    }
    return rows;
  }

  fs::path dir_;
};

}  // namespace

TEST(ParseTau, Forms) {
  EXPECT_EQ(cli::parse_tau("1", 64), 1.0);
  EXPECT_EQ(cli::parse_tau("1/s", 64), 1.0 / 64);
  EXPECT_EQ(cli::parse_tau("0.25", 64), 0.25);
  EXPECT_THROW(cli::parse_tau("0", 64), std::invalid_argument);
  EXPECT_THROW(cli::parse_tau("1.5", 64), std::invalid_argument);
  EXPECT_THROW(cli::parse_tau("1/t", 64), std::invalid_argument);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  make_rank_one();
  EXPECT_EQ(run({"decompose", path("syn/tensor.tns"), "--tau", "2", "--out", path("o")}).code, 1);
  EXPECT_EQ(run({"decompose", path("syn/tensor.tns"), "--method", "sgd"}).code, 1);
  EXPECT_FALSE(fs::exists(path("o")));
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  EXPECT_EQ(run({"decompose", path("missing.tns"), "--out", path("o")}).code, 2);
  std::ofstream(path("bad.tns")) << "1 2 x\n";
  EXPECT_EQ(run({"score", path("bad.tns"), "--model", path("none")}).code, 2);
  make_rank_one();
  // 10x10x10 tensor scored against a 10x10 model.
  std::ofstream(path("small.model")) << "1\n10 1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n10 1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n";
  auto r = run({"score", path("syn/tensor.tns"), "--model", path("small.model")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("factors"), std::string::npos);
}

TEST_F(CliTest, AlsOnRankOneFile) {
  make_rank_one();
  auto r = run({"decompose", path("syn/tensor.tns"), "--method", "als", "--rank", "1", "--tol", "1e-4", "--out",
                path("als")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto t = read_frostt_file(path("syn/tensor.tns")).tensor;
  auto m = read_kruskal_file(path("als/run0.model"));
  EXPECT_GT(exact_fit(t, m), 1.0 - 1e-6);
  EXPECT_TRUE(fs::exists(path("als/run0.trace.csv")));
  EXPECT_TRUE(fs::exists(path("als/manifest.json")));
}

TEST_F(CliTest, RunsUseConsecutiveSeedsAndShareInitializations) {
  make_rank_one();
  auto a = run({"decompose", path("syn/tensor.tns"), "--rank", "2", "--samples", "64", "--runs", "2", "--seed", "7",
                "--max-epochs", "1", "--no-timing", "--out", path("a")});
  ASSERT_EQ(a.code, 0) << a.err;
  auto b = run({"decompose", path("syn/tensor.tns"), "--rank", "2", "--samples", "64", "--seed", "8", "--max-epochs",
                "1", "--no-timing", "--out", path("b")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(path("a/run1.model")), slurp(path("b/run0.model")));
  EXPECT_EQ(slurp(path("a/run1.trace.csv")), slurp(path("b/run0.trace.csv")));
  const std::string manifest = slurp(path("a/manifest.json"));
  EXPECT_NE(manifest.find("\"seed\": 8"), std::string::npos);
  EXPECT_NE(manifest.find("\"sha256\""), std::string::npos);
}

TEST_F(CliTest, DeterministicOutputs) {
  make_rank_one();
  const std::vector<std::string> cmd{"decompose", path("syn/tensor.tns"), "--rank", "2", "--samples", "100", "--tau",
                                     "1/s", "--fit", "estimated", "--fit-samples", "300", "--init", "rrf",
                                     "--init-samples", "50", "--no-timing", "--out", path("d")};
  ASSERT_EQ(run(cmd).code, 0);
  const std::string trace = slurp(path("d/run0.trace.csv")), model = slurp(path("d/run0.model")),
                    manifest = slurp(path("d/manifest.json"));
  ASSERT_EQ(run(cmd).code, 0);
  EXPECT_EQ(slurp(path("d/run0.trace.csv")), trace);
  EXPECT_EQ(slurp(path("d/run0.model")), model);
  EXPECT_EQ(slurp(path("d/manifest.json")), manifest);
}

TEST_F(CliTest, PartialOutputsRemovedOnFailure) {
  make_rank_one();
  // A directory in place of the manifest makes the final write fail after the run files exist.
  fs::create_directories(path("p/manifest.json"));
  auto r = run({"decompose", path("syn/tensor.tns"), "--rank", "1", "--samples", "32", "--max-epochs", "1", "--out",
                path("p")});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(path("p/run0.model")));
  EXPECT_FALSE(fs::exists(path("p/run0.trace.csv")));
}

TEST_F(CliTest, SynthFilesReproducibleAndExact) {
  ASSERT_EQ(run({"synth", "--shape", "12,11,10", "--rank", "3", "--concentrated", "2", "--spread", "2", "--seed", "5",
                 "--no-noise", "--out", path("s1")})
                .code,
            0);
  ASSERT_EQ(run({"synth", "--shape", "12,11,10", "--rank", "3", "--concentrated", "2", "--spread", "2", "--seed", "5",
                 "--no-noise", "--out", path("s2")})
                .code,
            0);
  EXPECT_EQ(slurp(path("s1/tensor.tns")), slurp(path("s2/tensor.tns")));
  EXPECT_EQ(slurp(path("s1/truth.model")), slurp(path("s2/truth.model")));
  auto r = run({"score", path("s1/tensor.tns"), "--model", path("s1/truth.model"), "--truth", path("s1/truth.model")});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string key;
  double fit = 0, fms = 0;
  in >> key >> fit >> key >> fms;
  EXPECT_NEAR(fit, 1.0, 1e-6);
  EXPECT_NEAR(fms, 1.0, 1e-12);
}

TEST_F(CliTest, SynthDefaultsRecordSpec) {
  ASSERT_EQ(run({"synth", "--out", path("def")}).code, 0);
  const std::string manifest = slurp(path("def/manifest.json"));
  EXPECT_NE(manifest.find("\"spread\": 5"), std::string::npos);
  EXPECT_NE(manifest.find("\"rank\": 25"), std::string::npos);
  EXPECT_EQ(read_frostt_file(path("def/tensor.tns")).tensor.nnz(), 125000u);
}

TEST_F(CliTest, EstimatedFitWithinBand) {
  ASSERT_EQ(run({"synth", "--shape", "10,10,10", "--rank", "2", "--concentrated", "0", "--noise", "0.3", "--seed",
                 "9", "--out", path("s")})
                .code,
            0);
  // A perturbed model so that the residual is not negligible.
  auto m = read_kruskal_file(path("s/truth.model"));
  m.factors[0].array() += 0.2;
  write_kruskal_file(path("perturbed.model"), m);
  auto t = read_frostt_file(path("s/tensor.tns")).tensor;
  const double exact = exact_fit(t, m);
  // Spread of the estimate over seeds gives the band.
  std::vector<double> est;
  for (int seed = 0; seed < 200; ++seed) {
    auto r = run({"score", path("s/tensor.tns"), "--model", path("perturbed.model"), "--estimate", "--fit-samples",
                  "200", "--seed", std::to_string(seed)});
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string key;
    double e = 0, f = 0;
    in >> key >> e >> key >> f;
    EXPECT_NEAR(e, exact, 1e-12);
    est.push_back(f);
  }
  double mean = 0, var = 0;
  for (double f : est) mean += f / est.size();
  for (double f : est) var += (f - mean) * (f - mean) / (est.size() - 1);
  EXPECT_NEAR(est[0], exact, 3 * std::sqrt(var) + 1e-12);
}

TEST_F(CliTest, SampleBenchConfigurations) {
  ASSERT_EQ(run({"synth", "--shape", "20,20,20", "--rank", "5", "--concentrated", "3", "--spread", "2", "--seed", "1",
                 "--out", path("s")})
                .code,
            0);
  auto r = run({"sample-bench", path("s/tensor.tns"), "--model", path("s/truth.model"), "--mode", "1", "--grid",
                "64,256", "--reps", "3", "--exact", "--no-timing", "--out", path("bench.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("bench.csv.manifest.json")));
  auto rows = read_csv(path("bench.csv"));
  ASSERT_EQ(rows.size(), 2u * 2 * 2 * 3);
  // Combining does not change the solve: compare on/off rows with the same plan seed.
  std::map<std::string, std::map<std::string, double>> diff;
  std::map<std::string, double> sbar;
  for (auto& row : rows) {
    const std::string key = row["s"] + row["tau_kind"] + row["rep"];
    diff[key][row["combine"]] = std::stod(row["rel_diff"]);
    if (row["combine"] == "on") sbar[row["s"] + row["tau_kind"]] += std::stod(row["s_bar"]);
    if (row["combine"] == "off") EXPECT_EQ(row["s_bar"], row["s"]);
  }
  for (auto& [key, v] : diff) EXPECT_NEAR(v["on"], v["off"], 1e-10) << key;
  // Hybrid keeps more distinct rows than random sampling on concentrated factors.
  for (const std::string s : {"64", "256"}) EXPECT_GE(sbar[s + "1/s"], sbar[s + "1"]);
}

TEST_F(CliTest, SampleBenchModeChecked) {
  make_rank_one();
  EXPECT_EQ(run({"sample-bench", path("syn/tensor.tns"), "--model", path("syn/truth.model"), "--mode", "4"}).code, 1);
  auto r = run({"sample-bench", path("syn/tensor.tns"), "--model", path("syn/truth.model"), "--grid", "8", "--reps",
                "1", "--no-timing", "--plan-out", path("plans.txt")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("mode,s,tau_kind", 0), 0u);
  EXPECT_EQ(slurp(path("plans.txt")).rfind("# s=8 tau=1 combine=on rep=0\n", 0), 0u);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  make_rank_one();
  std::ofstream(path("c.toml")) << "[decompose]\nrank = 1\nmethod = \"als\"\nno-timing = true\n";
  auto r = run({"--config", path("c.toml"), "decompose", path("syn/tensor.tns"), "--out", path("c1")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(path("c1/manifest.json")).find("\"method\": \"als\""), std::string::npos);
  r = run({"--config", path("c.toml"), "decompose", path("syn/tensor.tns"), "--method", "arls-lev", "--samples", "32",
           "--max-epochs", "1", "--out", path("c2")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(path("c2/manifest.json")).find("\"method\": \"arls-lev\""), std::string::npos);
}
