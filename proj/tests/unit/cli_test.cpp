// Copyright 2026 The pdmcf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pdmcf/cli.hpp"
#include "pdmcf/io.hpp"
#include "test_util.hpp"

namespace pdmcf {
namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result RunCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> ReadCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

// Average ranks with ties.
std::vector<double> Ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j);
    i = j + 1;
  }
  return r;
}

double Spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = Ranks(a), rb = Ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    sab += (ra[k] - ma) * (rb[k] - mb);
    saa += (ra[k] - ma) * (ra[k] - ma);
    sbb += (rb[k] - mb) * (rb[k] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(CliGenerateTest, WritesInstanceAndSummary) {
  const auto dir = testing::ScratchDir("cli_generate");
  const auto path = (dir / "i.json").string();
  const auto r = RunCli({"generate", "--n", "100", "--q", "10", "--seed", "0",
                         "--out", path});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto inst = ReadInstance(path);
  EXPECT_EQ(inst.n(), 100u);
  EXPECT_GE(inst.m(), 1178 * 0.85);
  EXPECT_LE(inst.m(), 1178 * 1.15);
  EXPECT_NE(r.out.find("n=100 m=" + std::to_string(inst.m())),
            std::string::npos);
  EXPECT_NE(r.out.find("d_max="), std::string::npos);
  EXPECT_NE(r.out.find("eta="), std::string::npos);

  const auto again = (dir / "j.json").string();
  ASSERT_EQ(RunCli({"generate", "--n", "100", "--q", "10", "--seed", "0",
                    "--out", again})
                .code,
            cli::kExitOk);
  EXPECT_EQ(Slurp(path), Slurp(again));
}

TEST(CliGenerateTest, PowerFamily) {
  const auto dir = testing::ScratchDir("cli_power");
  const auto path = (dir / "p.json").string();
  ASSERT_EQ(RunCli({"generate", "--n", "8", "--q", "2", "--family", "power",
                    "--gamma", "0.25", "--out", path})
                .code,
            cli::kExitOk);
  EXPECT_EQ(ReadInstance(path).utility.family, UtilityFamily::Power(0.25));
}

TEST(CliGenerateTest, UsageErrors) {
  const auto dir = testing::ScratchDir("cli_usage");
  const auto path = (dir / "x.json").string();
  EXPECT_EQ(RunCli({"generate", "--n", "1", "--q", "1", "--out", path}).code,
            cli::kExitUsage);
  EXPECT_EQ(RunCli({"generate", "--n", "5", "--q", "5", "--out", path}).code,
            cli::kExitUsage);
  EXPECT_EQ(RunCli({"generate", "--n", "5", "--q", "2", "--family", "power",
                    "--gamma", "1.5", "--out", path})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(RunCli({"generate", "--n", "5"}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({"--help"}).code, cli::kExitOk);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(CliSolveTest, WritesSolutionTraceAndSummary) {
  const auto dir = testing::ScratchDir("cli_solve");
  const auto inst = (dir / "i.json").string();
  const auto sol = (dir / "s.json").string();
  const auto trace = (dir / "t.csv").string();
  ASSERT_EQ(RunCli({"generate", "--n", "15", "--q", "3", "--seed", "2",
                    "--out", inst})
                .code,
            0);
  const auto r = RunCli({"solve", "--instance", inst, "--solution", sol,
                         "--trace", trace});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const char* key : {"n=15 ", "q=3 ", " m=", " nm=", " iterations=",
                          " seconds=", " converged=1"}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
  const Solution s = ReadSolution(sol);
  EXPECT_TRUE(s.converged);
  EXPECT_LT(s.final_residual, s.threshold);
  const auto rows = ReadTraceCsv(trace);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.back().iter, s.iterations);
  EXPECT_LT(rows.back().residual, s.threshold);
  EXPECT_EQ(rows.back().infeasible_fraction, 0.0);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_GE(rows[rows.size() - 2].residual, rows.back().residual);
}

TEST(CliSolveTest, NonConvergenceExitCodeStillWritesFiles) {
  const auto dir = testing::ScratchDir("cli_cap");
  const auto inst = (dir / "i.json").string();
  const auto sol = (dir / "s.json").string();
  const auto trace = (dir / "t.csv").string();
  ASSERT_EQ(RunCli({"generate", "--n", "20", "--q", "3", "--out", inst}).code,
            0);
  const auto r = RunCli({"solve", "--instance", inst, "--solution", sol,
                         "--trace", trace, "--max-iters", "10"});
  EXPECT_EQ(r.code, cli::kExitNotConverged);
  EXPECT_NE(r.out.find("converged=0"), std::string::npos);
  EXPECT_FALSE(ReadSolution(sol).converged);
  EXPECT_FALSE(ReadTraceCsv(trace).empty());
}

TEST(CliSolveTest, IoAndFlagErrors) {
  const auto dir = testing::ScratchDir("cli_io");
  EXPECT_EQ(RunCli({"solve", "--instance", (dir / "none.json").string()}).code,
            cli::kExitIo);
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{\"version\": 1, \"n\": 3}";
  EXPECT_EQ(RunCli({"solve", "--instance", bad.string()}).code, cli::kExitIo);
  const auto inst = (dir / "i.json").string();
  ASSERT_EQ(RunCli({"generate", "--n", "6", "--q", "2", "--out", inst}).code,
            0);
  EXPECT_EQ(RunCli({"solve", "--instance", inst, "--rho", "2.5"}).code,
            cli::kExitUsage);
  EXPECT_EQ(RunCli({"solve", "--instance", inst, "--eps", "-1"}).code,
            cli::kExitUsage);
  EXPECT_EQ(RunCli({"solve", "--instance", inst, "--solution",
                    (dir / "no" / "such" / "dir.json").string()})
                .code,
            cli::kExitIo);
}

TEST(CliWarmStartTest, FileFeedsSolve) {
  const auto dir = testing::ScratchDir("cli_warm");
  const auto inst = (dir / "i.json").string();
  const auto ws = (dir / "ws.json").string();
  ASSERT_EQ(RunCli({"generate", "--n", "14", "--q", "3", "--seed", "1",
                    "--out", inst})
                .code,
            0);
  const auto r = RunCli({"warmstart", "--instance", inst, "--nu", "0.1",
                         "--seed", "3", "--out", ws});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const char* key : {"nu=0.1", "omega_feas=", "feasibility_iterations=",
                          "cold_iterations=", "warm_iterations="}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
  const auto s = RunCli({"solve", "--instance", inst, "--warm-start", ws});
  EXPECT_EQ(s.code, cli::kExitOk) << s.err;
  EXPECT_EQ(RunCli({"warmstart", "--instance", inst, "--nu", "1.0"}).code,
            cli::kExitUsage);

  const auto other = (dir / "o.json").string();
  ASSERT_EQ(RunCli({"generate", "--n", "9", "--q", "2", "--out", other}).code,
            0);
  EXPECT_EQ(RunCli({"solve", "--instance", other, "--warm-start", ws}).code,
            cli::kExitIo);
}

TEST(CliBenchTest, OneRowPerSizeAndSeed) {
  const auto r = RunCli({"bench", "--sizes", "8:2,12:3", "--seeds", "0,1,2"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = ReadCsv(r.out);
  ASSERT_EQ(rows.size(), 1u + 6u);
  EXPECT_EQ(rows[0].size(), 11u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    ASSERT_EQ(rows[k].size(), 11u);
    EXPECT_EQ(rows[k][10], "ok");
    EXPECT_LT(std::stod(rows[k][8]), std::stod(rows[k][9]));
  }
  EXPECT_EQ(RunCli({"bench", "--sizes", "8"}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({"bench", "--sizes", "8:8"}).code, cli::kExitUsage);
}

TEST(CliBenchTest, RuntimeGrowsWithProblemSize) {
  const auto dir = testing::ScratchDir("cli_bench");
  const auto csv = (dir / "b.csv").string();
  const auto r = RunCli({"bench", "--sizes", "10:3,20:4,40:5", "--seeds",
                         "0,1,2,3,4", "--out", csv});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = ReadCsv(Slurp(csv));
  ASSERT_EQ(rows.size(), 16u);
  std::vector<double> nm, seconds;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    nm.push_back(std::stod(rows[k][4]));
    seconds.push_back(std::stod(rows[k][6]));
  }
  EXPECT_GT(Spearman(nm, seconds), 0.8);
}

}  // namespace
}  // namespace pdmcf
