// Copyright 2026 The NSZD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nszd/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace nszd::cli {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "nszd_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  RunResult r;
  r.code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Config(const std::string& name) {
  return std::string(NSZD_CONFIG_DIR) + "/" + name;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nszd_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }

  static std::string Read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

constexpr const char* kGame =
    R"("c_p": 5, "c_c": 5, "c_p1": 2, "c_c1": 2, "c_p2": 3, "c_c2": 3)";

TEST_F(CliTest, PayoffsCsvOnStdout) {
  const RunResult r =
      RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"), "payoffs"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("state,CC,CD,DC,DD\n", 0), 0u);
  EXPECT_NE(r.err.find("U_P"), std::string::npos);
}

TEST_F(CliTest, MissingKeyExitsWithConfigError) {
  const std::string cfg =
      Write("c.json", std::string("{") + kGame + R"(, "e1": 0.3})");
  const RunResult r = RunCli({"--config", cfg, "payoffs"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("e2"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitWithConfigError) {
  EXPECT_EQ(RunCli({"payoffs"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"--config", Config("small_e1_0.3_e2_0.5.json")}).code,
            kExitConfig);
  EXPECT_EQ(RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"),
                    "--format", "xml", "payoffs"})
                .code,
            kExitConfig);
  EXPECT_EQ(RunCli({"--config", "/nonexistent.json", "payoffs"}).code,
            kExitConfig);
}

TEST_F(CliTest, FullMaskingNoiseIsDegenerateForPinning) {
  const std::string cfg = Write(
      "c.json", std::string("{") + kGame +
                    R"(, "e1": 0.3, "e2": 1, "pin": {"p1": 0.9, "p4": 0.1}})");
  EXPECT_EQ(RunCli({"--config", cfg, "pin"}).code, kExitInvalid);
  EXPECT_EQ(RunCli({"--config", cfg, "scan-pin"}).code, kExitInvalid);
}

TEST_F(CliTest, StrictOrderingRejectsViolations) {
  const std::string cfg = Config("small_e1_0.3_e2_0.5.json");
  const RunResult r = RunCli({"--config", cfg, "--strict-ordering", "payoffs"});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("ordering"), std::string::npos);
  EXPECT_EQ(RunCli({"--config", cfg, "payoffs"}).code, kExitOk);
}

TEST_F(CliTest, PinJsonCarriesSensitivities) {
  const RunResult r = RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"),
                              "--format", "json", "pin"});
  ASSERT_EQ(r.code, kExitOk);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["p"][1].get<double>(), 133.0 / 170.0, 1e-12);
  EXPECT_NEAR(j["sensitivity"]["ds_de1"].get<double>(), -4.5, 1e-12);
}

TEST_F(CliTest, ScanPinWritesEveryCell) {
  const std::string out = (dir_ / "scan.csv").string();
  const RunResult r = RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"),
                              "--out", out, "scan-pin"});
  ASSERT_EQ(r.code, kExitOk);
  const std::string csv = Read(out);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 101 * 101 + 1);
  EXPECT_NE(r.out.find("scan-pin:"), std::string::npos);
}

TEST_F(CliTest, ScanOutputDoesNotDependOnJobs) {
  for (const char* cmd : {"scan-pin", "scan-extort"}) {
    const std::string cfg = Config(std::string(cmd) == "scan-pin"
                                       ? "large_e1_0.3_e2_0.5.json"
                                       : "extort_l1_2_l2_1.json");
    const RunResult a = RunCli({"--config", cfg, "--jobs", "1", cmd});
    const RunResult b = RunCli({"--config", cfg, "--jobs", "4", cmd});
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out) << cmd;
  }
}

TEST_F(CliTest, ExtortVerifiesRelation) {
  const RunResult r = RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"),
                              "--format", "json", "extort"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["feasible"].get<bool>());
  EXPECT_NEAR(j["phi"].get<double>(), 1.0 / 6.0, 1e-12);
  EXPECT_EQ(j["verification"]["trials"].get<int>(), 1000);
  EXPECT_LT(j["verification"]["max_residual"].get<double>(), 1e-9);
}

TEST_F(CliTest, ExtortWithoutAdmissiblePhiIsEmpty) {
  const RunResult r = RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"),
                              "--negative-phi", "extort"});
  EXPECT_EQ(r.code, kExitEmpty);
}

TEST_F(CliTest, CheckCollectorVerdict) {
  const RunResult r =
      RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"), "check-collector"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("infeasible for collector"), std::string::npos);
  EXPECT_EQ(r.out.rfind("kind,lhs,rhs,gap,holds\npinning,", 0), 0u);
  EXPECT_NE(r.out.find("\nextortion,"), std::string::npos);
}

TEST_F(CliTest, SimulateAllCooperate) {
  const RunResult r = RunCli({"--config", Config("small_e1_0.3_e2_0.5.json"),
                              "--format", "json", "simulate"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["result"]["s_p"].get<double>(), 5);
  EXPECT_EQ(j["result"]["s_c"].get<double>(), 5);
  EXPECT_FALSE(j["comparison"]["flagged"].get<bool>());
}

TEST_F(CliTest, SimulateTraceIsDeterministic) {
  const std::string cfg = Write(
      "c.json", std::string("{") + kGame +
                    R"(, "e1": 0.3, "e2": 0.5, "simulate": {"p": [0.9, 0.5, 0.2, 0.1],
                    "q": [0.3, 0.7], "rounds": 2000, "burn_in": 10}})");
  const RunResult a = RunCli({"--config", cfg, "--seed", "42", "simulate"});
  const RunResult b = RunCli({"--config", cfg, "--seed", "42", "simulate"});
  const RunResult c = RunCli({"--config", cfg, "--seed", "43", "simulate"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 2001);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

}  // namespace
}  // namespace nszd::cli
