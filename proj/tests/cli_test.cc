/*
 * Copyright 2026 The symcorr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "symcorr/synth.h"

namespace symcorr::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("symcorr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  int Cli(std::vector<std::string> args) {
    args.insert(args.begin(), "symcorr");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli::Run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string Slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, ExplainThenVerify) {
  ASSERT_EQ(Cli({"explain", "--network", "builtin:N1", "--instance", "0.2,0.1", "--out",
                 Path("r.json")}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(Cli({"verify", "--network", "builtin:N1", "--result", Path("r.json"), "--samples",
                 "10000"}),
            kExitOk)
      << out_.str();
  EXPECT_NE(out_.str().find("flip_rate 1\n"), std::string::npos) << out_.str();
}

TEST_F(CliTest, ExplainExitCodes) {
  EXPECT_EQ(Cli({"explain", "--network", "builtin:N1", "--instance", "1,-2"}), kExitAlreadyAccepted);
  EXPECT_EQ(Cli({"explain", "--network", Path("missing.json"), "--instance", "0.2,0.1"}), kExitUsage);
  EXPECT_EQ(Cli({"explain", "--network", "builtin:N1", "--instance", "0.2"}), kExitUsage);
  EXPECT_EQ(Cli({"explain", "--network", "builtin:N1", "--instance", "0.2,0.1", "--e", "50",
                 "--out", Path("r.json")}),
            kExitNoInterpretation);
  const nlohmann::json doc = nlohmann::json::parse(Slurp(Path("r.json")));
  EXPECT_EQ(doc["status"], "unstable");
  EXPECT_EQ(Cli({"explain"}), kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}), kExitUsage);
}

TEST_F(CliTest, NetworkFileAndConfigFile) {
  SaveNetworkFile(BuiltinNetwork("N1"), Path("n1.json"));
  {
    std::ofstream cfg(Path("cfg.json"));
    cfg << R"({"search":{"m":2,"shape":"simplex"},"distance":{"e":0.5}})";
    std::ofstream inst(Path("x.json"));
    inst << "[0.2, 0.1]\n";
  }
  ASSERT_EQ(Cli({"explain", "--network", Path("n1.json"), "--instance", Path("x.json"), "--config",
                 Path("cfg.json"), "--out", Path("r.json")}),
            kExitOk)
      << err_.str();
  const nlohmann::json doc = nlohmann::json::parse(Slurp(Path("r.json")));
  EXPECT_EQ(doc["config"]["search"]["m"], 2);
  EXPECT_EQ(doc["config"]["distance"]["e"], 0.5);
  EXPECT_EQ(doc["interpretation"]["correction"]["kind"], "simplex");
  EXPECT_LE(doc["interpretation"]["regions_explored"].get<int>(), 2);
  {
    std::ofstream cfg(Path("bad.json"));
    cfg << R"({"search":{"mm":2}})";
  }
  EXPECT_EQ(Cli({"explain", "--network", Path("n1.json"), "--instance", "0.2,0.1", "--config",
                 Path("bad.json")}),
            kExitUsage);
}

TEST_F(CliTest, VerifyCatchesACorruptedBox) {
  ASSERT_EQ(Cli({"explain", "--network", "builtin:N1", "--instance", "0.2,0.1", "--out",
                 Path("r.json")}),
            kExitOk);
  nlohmann::json doc = nlohmann::json::parse(Slurp(Path("r.json")));
  doc["interpretation"]["correction"]["lo"] = {-1.2, -1.1};
  doc["interpretation"]["correction"]["hi"] = {0.8, 0.9};
  std::ofstream(Path("bad.json")) << doc.dump();
  EXPECT_EQ(Cli({"verify", "--network", "builtin:N1", "--result", Path("bad.json")}),
            kExitVerificationFailed);
  EXPECT_EQ(Cli({"verify", "--network", "builtin:N1", "--result", Path("r.json"), "--samples", "0"}),
            kExitUsage);
  EXPECT_EQ(Cli({"verify", "--network", "builtin:N1", "--result", Path("nope.json")}), kExitUsage);
}

TEST_F(CliTest, OracleOnN1) {
  ASSERT_EQ(Cli({"oracle", "--network", "builtin:N1", "--instance", "0.2,0.1", "--features", "0,1",
                 "--grid", "200"}),
            kExitOk)
      << err_.str();
  const nlohmann::json doc = nlohmann::json::parse(out_.str());
  // Flipping needs x1 > 0.3 on the first axis; weights are 1/range = 0.5,
  // so the unweighted minimum 0.2 becomes 0.1.
  const double d = doc["min_distance"].get<double>();
  EXPECT_GT(d, 0.1);
  EXPECT_LE(d, 0.1 + doc["spacing_distance"].get<double>());
  EXPECT_EQ(doc["mask"].size(), 200u);

  ASSERT_EQ(Cli({"oracle", "--network", "builtin:N1", "--instance", "0.2,0.1", "--features", "0",
                 "--grid", "1"}),
            kExitOk);
  EXPECT_EQ(nlohmann::json::parse(out_.str())["total"], 1);

  const Network wide = GenNetwork(TaskSpec{.input_dim = 4, .hidden_sizes = {3}, .seed = 0});
  SaveNetworkFile(wide, Path("w.json"));
  EXPECT_EQ(Cli({"oracle", "--network", Path("w.json"), "--instance", "0,0,0,0", "--features",
                 "0,1,2,3"}),
            kExitUsage);
}

TEST_F(CliTest, OracleLargestBoxIsAllAccepted) {
  ASSERT_EQ(Cli({"oracle", "--network", "builtin:N2", "--instance", "-0.5,-0.5", "--features",
                 "0,1", "--grid", "41"}),
            kExitOk);
  const nlohmann::json doc = nlohmann::json::parse(out_.str());
  ASSERT_FALSE(doc["largest_box"].is_null());
  const Network n2 = BuiltinNetwork("N2");
  const auto lo = doc["largest_box"]["lo"].get<std::vector<double>>();
  const auto hi = doc["largest_box"]["hi"].get<std::vector<double>>();
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      Eigen::VectorXd x(2);
      x << -0.5 + lo[0] + (hi[0] - lo[0]) * a / 10.0, -0.5 + lo[1] + (hi[1] - lo[1]) * b / 10.0;
      EXPECT_EQ(Classify(n2, x), 1);
    }
  }
}

TEST_F(CliTest, PlotData) {
  ASSERT_EQ(Cli({"explain", "--network", "builtin:N1", "--instance", "0.2,0.1", "--out",
                 Path("r.json")}),
            kExitOk);
  ASSERT_EQ(Cli({"plotdata", "--result", Path("r.json")}), kExitOk) << err_.str();
  std::map<std::string, std::set<std::string>> ids;
  std::istringstream csv(out_.str());
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "element,id,x,y");
  while (std::getline(csv, line)) {
    const std::string element = line.substr(0, line.find(','));
    const std::string rest = line.substr(line.find(',') + 1);
    ids[element].insert(rest.substr(0, rest.find(',')));
  }
  EXPECT_EQ(ids["region"].size(), 3u);
  EXPECT_EQ(ids["correction"].size(), 1u);
  EXPECT_EQ(ids["input"].size(), 1u);
  EXPECT_EQ(ids["center"].size(), 1u);
  EXPECT_EQ(Cli({"plotdata", "--result", Path("missing.json")}), kExitUsage);
}

TEST_F(CliTest, PlotDataProjectsABox) {
  const Network net = GenNetwork(TaskSpec{.input_dim = 4, .hidden_sizes = {3}, .seed = 0});
  SaveNetworkFile(net, Path("w.json"));
  ResultFile result;
  result.config = ExplainConfig::Defaults(4);
  result.input = Eigen::VectorXd::Zero(4);
  Interpretation it;
  Eigen::VectorXd lo(4), hi(4);
  lo << 0.1, 0.2, 0.3, 0.4;
  hi << 0.5, 0.6, 0.7, 0.8;
  it.correction = ConvexCorrection::Box(lo, hi, {0, 1, 2, 3}, result.input);
  it.features = {0, 1, 2, 3};
  it.stable_center = (lo + hi) / 2;
  result.interpretation = it;
  const std::string csv = PlotDataCsv(result, {1, 3});
  std::vector<std::pair<double, double>> corners;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("correction,", 0) != 0) continue;
    std::stringstream row(line);
    std::string element, id, x, y;
    std::getline(row, element, ',');
    std::getline(row, id, ',');
    std::getline(row, x, ',');
    std::getline(row, y, ',');
    corners.emplace_back(std::stod(x), std::stod(y));
  }
  ASSERT_EQ(corners.size(), 5u);  // closed rectangle
  std::set<std::pair<double, double>> unique(corners.begin(), corners.end());
  EXPECT_EQ(unique, (std::set<std::pair<double, double>>{{0.2, 0.4}, {0.6, 0.4}, {0.6, 0.8}, {0.2, 0.8}}));
  EXPECT_THROW(PlotDataCsv(result, {1, 5}), std::exception);
}

TEST_F(CliTest, GeneratorsAndTrainer) {
  ASSERT_EQ(Cli({"gen-network", "--input-dim", "3", "--hidden", "4,4", "--seed", "2", "--out",
                 Path("net.json")}),
            kExitOk);
  EXPECT_EQ(LoadNetworkFile(Path("net.json")).num_hidden(), 8);
  ASSERT_EQ(Cli({"gen-dataset", "--input-dim", "2", "--size", "300", "--lo", "0", "--hi", "1",
                 "--weights", "1,1", "--threshold", "1", "--out", Path("d.csv")}),
            kExitOk);
  ASSERT_EQ(Cli({"train", "--data", Path("d.csv"), "--hidden", "8", "--out", Path("t.json")}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("train accuracy"), std::string::npos);
  EXPECT_EQ(Cli({"gen-network", "--builtin", "N2"}), kExitOk);
  EXPECT_EQ(LoadNetwork(out_.str()), BuiltinNetwork("N2"));
}

}  // namespace
}  // namespace symcorr::cli
