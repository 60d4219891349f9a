// Copyright 2026 The corrlab authors
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

// End-to-end checks of the installed binary: exit codes, formats, pipelines.

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

std::string g_binary;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + g_binary + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  while (fgets(buf.data(), int(buf.size()), pipe) != nullptr) out += buf.data();
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string temp_path(const std::string& name) {
  return testing::TempDir() + "/" + name;
}

}  // namespace

TEST(Cli, AnalyzeChshGoldenPath) {
  auto r = run("analyze chsh");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("Extreme"), std::string::npos);
  EXPECT_NE(r.out.find("Exposed"), std::string::npos);
  EXPECT_NE(r.out.find("not local"), std::string::npos);
  EXPECT_NE(r.out.find("self-test (singlet): true"), std::string::npos);
}

TEST(Cli, AnalyzeZeroCorrelator) {
  auto r = run("analyze \"[[0,0],[0,0]]\"");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("NotExtreme"), std::string::npos);
  EXPECT_NE(r.out.find("locality: local"), std::string::npos);
}

TEST(Cli, AnalyzeNonMemberExitsThree) {
  auto r = run("analyze \"[[1,1],[1,-1]]\"");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.out.find("not-member"), std::string::npos);
  EXPECT_NE(r.out.find("cycle"), std::string::npos);  // violated cycle listed
}

TEST(Cli, AnalyzeParseErrorExitsTwo) {
  auto r = run("analyze \"[[1,2],[3]]\"");
  EXPECT_EQ(r.exit_code, 2);
  auto r2 = run("analyze");
  EXPECT_EQ(r2.exit_code, 2);
}

TEST(Cli, AnalyzeMachineFormatIsIdempotentJson) {
  auto r = run("analyze chsh --format machine");
  EXPECT_EQ(r.exit_code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.dump() + "\n", r.out);
  EXPECT_EQ(j["extremality"]["status"], "Extreme");
  EXPECT_EQ(j["exposedness"]["status"], "Exposed");
  EXPECT_EQ(j["self_test"], true);
  EXPECT_EQ(j["locality"]["local"], false);
}

TEST(Cli, AnalyzeMethodFlagsAgree) {
  auto ra = run("analyze chsh --method analytic");
  auto rs = run("analyze chsh --method sdp");
  EXPECT_EQ(ra.exit_code, 0);
  EXPECT_EQ(rs.exit_code, 0);
}

TEST(Cli, AnalyzeInlineExpressions) {
  auto r = run("analyze \"[[1/sqrt(2),1/sqrt(2)],[1/sqrt(2),-1/sqrt(2)]]\"");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("Extreme"), std::string::npos);
}

TEST(Cli, GenerateDeterministicInSeed) {
  auto p1 = temp_path("gen1.jsonl");
  auto p2 = temp_path("gen2.jsonl");
  EXPECT_EQ(run("generate --count 3 --seed 42 --out " + p1).exit_code, 0);
  EXPECT_EQ(run("generate --count 3 --seed 42 --out " + p2).exit_code, 0);
  std::stringstream a, b;
  a << std::ifstream(p1).rdbuf();
  b << std::ifstream(p2).rdbuf();
  EXPECT_EQ(a.str(), b.str());
  int lines = 0;
  std::string line;
  std::istringstream ls(a.str());
  while (std::getline(ls, line))
    if (!line.empty()) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST(Cli, GenerateZeroCountIsUsageError) {
  EXPECT_EQ(run("generate --count 0 --seed 1").exit_code, 2);
}

TEST(Cli, BatchExtremalityCountsMatch) {
  auto p = temp_path("batch_in.jsonl");
  ASSERT_EQ(run("generate --count 12 --seed 7 --out " + p).exit_code, 0);
  auto r = run("batch " + p + " --mode extremality --format machine");
  EXPECT_EQ(r.exit_code, 0);
  // last line is the summary; per-instance verdicts must match its counts
  std::istringstream ls(r.out);
  std::string line, last;
  int extreme_lines = 0, total = 0;
  while (std::getline(ls, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (j.contains("summary")) {
      last = line;
      break;
    }
    ++total;
    if (j["verdict"] == "Extreme") ++extreme_lines;
  }
  ASSERT_FALSE(last.empty());
  auto summary = nlohmann::json::parse(last);
  EXPECT_EQ(summary["counts"]["Extreme"].get<int>(), extreme_lines);
  EXPECT_EQ(total, 12);
  EXPECT_EQ(extreme_lines, 12);
}

TEST(Cli, BatchExposednessMode) {
  auto p = temp_path("batch_exp.jsonl");
  ASSERT_EQ(run("generate --count 8 --seed 11 --out " + p).exit_code, 0);
  auto r = run("batch " + p + " --mode exposedness --format machine");
  EXPECT_EQ(r.exit_code, 0);
  std::istringstream ls(r.out);
  std::string line, last;
  while (std::getline(ls, line))
    if (!line.empty()) last = line;
  auto summary = nlohmann::json::parse(last);
  EXPECT_GE(summary["counts"]["Exposed"].get<int>(), 7);
}

TEST(Cli, BatchSkipsMalformedRecords) {
  auto p = temp_path("batch_bad.jsonl");
  {
    std::ofstream f(p);
    f << "{\"n\":2,\"m\":2,\"c\":[0,0,0,0]}\n";
    f << "this is not a record\n";
    f << "{\"n\":2,\"m\":2,\"c\":[1,1,1,1]}\n";
  }
  auto r = run("batch " + p + " --format machine");
  EXPECT_EQ(r.exit_code, 0);
  std::istringstream ls(r.out);
  std::string line, last;
  while (std::getline(ls, line))
    if (!line.empty()) last = line;
  auto summary = nlohmann::json::parse(last);
  EXPECT_EQ(summary["malformed"].get<int>(), 1);
  EXPECT_EQ(summary["counts"]["Extreme"].get<int>(), 1);
  EXPECT_EQ(summary["counts"]["NotExtreme"].get<int>(), 1);
}

TEST(Cli, BatchEmptyFileSummaryOfZeros) {
  auto p = temp_path("batch_empty.jsonl");
  std::ofstream(p).close();
  auto r = run("batch " + p + " --format machine");
  EXPECT_EQ(r.exit_code, 0);
  auto summary = nlohmann::json::parse(r.out);
  EXPECT_EQ(summary["counts"]["Extreme"].get<int>(), 0);
}

TEST(Cli, BatchMissingFileExitsFive) {
  EXPECT_EQ(run("batch /nonexistent/file.jsonl").exit_code, 5);
}

TEST(Cli, SupportChshFunctional) {
  auto r = run("support \"[[1,1],[1,-1]]\" --format machine");
  EXPECT_EQ(r.exit_code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 2.8284271247461903, 1e-6);
}

TEST(Cli, SupportZeroFunctional) {
  auto r = run("support \"[[0,0],[0,0]]\" --format machine");
  EXPECT_EQ(r.exit_code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 0.0, 1e-9);
}

TEST(Cli, CompletePrintsCompletionAndInterval) {
  auto r = run("complete chsh");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("unique completion: yes"), std::string::npos);
  EXPECT_NE(r.out.find("theta34 interval"), std::string::npos);
  auto rm = run("complete chsh --format machine");
  auto j = nlohmann::json::parse(rm.out);
  EXPECT_EQ(j["member"], true);
  EXPECT_NEAR(j["interval_theta34"][0].get<double>(),
              std::acos(-1.0) / 2, 1e-9);
}

TEST(Cli, GenerateUnwritablePathExitsFive) {
  EXPECT_EQ(run("generate --count 1 --seed 0 --out /nonexistent/dir/x.jsonl")
                .exit_code,
            5);
}

TEST(Cli, SupportKnownFunctionalWithExpressions) {
  auto r = run(
      "support \"[[12*sqrt(2),-4,4*sqrt(2)],[-4,12*sqrt(2),4*sqrt(2)],"
      "[4*sqrt(2),4*sqrt(2),6*sqrt(2)-4]]\" --format machine");
  EXPECT_EQ(r.exit_code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 6.0 * (5.0 * std::sqrt(2.0) + 2.0),
              1e-5);
}

TEST(Cli, ToleranceFlagsAccepted) {
  auto r = run("analyze chsh --rank-tol 1e-6 --tight-tol 1e-6 --gap-tol 1e-8");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("rank_rel=9.9999999999999995e-07"), std::string::npos);
}

TEST(Cli, StrictToleranceProfile) {
  auto r = run("analyze chsh", "CORRLAB_TOL_PROFILE=strict");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("sdp_gap=1e-10"), std::string::npos);
  auto bad = run("analyze chsh", "CORRLAB_TOL_PROFILE=bogus");
  EXPECT_EQ(bad.exit_code, 2);
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-corrlab-binary>\n");
    return 2;
  }
  g_binary = argv[1];
  return RUN_ALL_TESTS();
}
