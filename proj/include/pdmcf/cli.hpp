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

// Command-line front end: generate, solve, warmstart, bench.
//
// Exit codes: 0 success, 2 usage error, 3 non-convergence (output files are
// still written), 4 I/O error. PDMCF_NUM_THREADS sets the worker count of
// the data-parallel kernels.

#ifndef PDMCF_CLI_HPP_
#define PDMCF_CLI_HPP_

#include <cstdint>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pdmcf/generator.hpp"
#include "pdmcf/graph.hpp"
#include "pdmcf/io.hpp"
#include "pdmcf/solver.hpp"

namespace pdmcf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitIo = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {

// Solver flags shared by solve, warmstart and bench.
struct SolverFlags {
  std::optional<double> epsilon;
  double rho = 1.9;
  double theta = 0.5;
  std::int64_t k_adapt = 100;
  std::int64_t k_check = 25;
  std::int64_t max_iters = 1'000'000;
  double omega0 = 1.0;
  std::int64_t freeze_after = -1;
  bool no_adapt = false;

  void Register(CLI::App& app) {
    app.add_option("--eps", epsilon,
                   "per-entry residual threshold (default 0.01/(n(n-1)))");
    app.add_option("--rho", rho, "over-relaxation in (0, 2)")
        ->capture_default_str();
    app.add_option("--theta", theta, "primal-weight exponent")
        ->capture_default_str();
    app.add_option("--k-adapt", k_adapt, "primal-weight update period")
        ->capture_default_str();
    app.add_option("--k-check", k_check, "residual check period")
        ->capture_default_str();
    app.add_option("--max-iters", max_iters, "iteration cap")
        ->capture_default_str();
    app.add_option("--omega0", omega0, "initial primal weight")
        ->capture_default_str();
    app.add_option("--freeze-after", freeze_after,
                   "stop adapting the primal weight after this iteration");
    app.add_flag("--no-adapt", no_adapt, "keep the primal weight fixed");
  }

  SolverConfig Config() const {
    SolverConfig config;
    config.epsilon = epsilon;
    config.rho = rho;
    config.theta = theta;
    config.k_adapt = k_adapt;
    config.k_check = k_check;
    config.max_iters = max_iters;
    config.omega0 = omega0;
    config.freeze_adaptation_after = freeze_after;
    config.adapt = !no_adapt;
    try {
      config.Validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return config;
  }
};

inline std::string Fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

inline std::string Sci(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

struct Loaded {
  ProblemInstance instance;
  std::optional<GeneratorInfo> info;
};

inline Loaded LoadInstance(const std::string& path) {
  const auto doc = pdmcf::internal::ParseFile(path);
  return {InstanceFromJson(doc), GeneratorInfoFromJson(doc)};
}

inline std::string QLabel(const std::optional<GeneratorInfo>& info) {
  return info ? std::to_string(info->q) : std::string("-");
}

// ----------------------------------------------------------------- generate

struct GenerateArgs {
  int n = 0;
  int q = 0;
  std::uint64_t seed = 0;
  std::string family = "log";
  double gamma = 0.5;
  std::string out;
};

inline void AddGenerate(CLI::App& app, GenerateArgs& a) {
  app.add_option("--n", a.n, "number of nodes (>= 2)")->required();
  app.add_option("--q", a.q, "nearest neighbors per point, 1 <= q < n")
      ->required();
  app.add_option("--seed", a.seed, "random seed")->capture_default_str();
  app.add_option("--family", a.family, "utility family")
      ->check(CLI::IsMember({"log", "power"}))
      ->capture_default_str();
  app.add_option("--gamma", a.gamma, "power utility exponent in (0, 1)")
      ->capture_default_str();
  app.add_option("--out", a.out, "instance file to write")->required();
}

inline int RunGenerate(const GenerateArgs& a, std::ostream& out) {
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (a.q < 1 || a.q >= a.n) throw UsageError("--q must lie in [1, n)");
  UtilityFamily family = UtilityFamily::Log();
  if (a.family == "power") {
    family = UtilityFamily::Power(a.gamma);
    try {
      family.Validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const ProblemInstance instance = GenerateInstance(a.n, a.q, a.seed, family);
  const GeneratorInfo info{a.q, a.seed};
  WriteInstance(a.out, instance, &info);
  out << "n=" << instance.n() << " m=" << instance.m()
      << " d_max=" << MaxDegree(instance.topology)
      << " eta=" << Sci(StepSizeEta(instance.topology)) << '\n';
  return kExitOk;
}

// -------------------------------------------------------------------- solve

struct SolveArgs {
  std::string instance;
  std::string solution;
  std::string trace;
  std::string warm_start;
  SolverFlags flags;
};

inline void AddSolve(CLI::App& app, SolveArgs& a) {
  app.add_option("--instance", a.instance, "instance file")->required();
  app.add_option("--solution", a.solution, "solution file to write");
  app.add_option("--trace", a.trace, "trace CSV to write");
  app.add_option("--warm-start", a.warm_start,
                 "warm-start file written by the warmstart command");
  a.flags.Register(app);
}

inline void PrintSummary(std::ostream& out, const ProblemInstance& instance,
                         const std::optional<GeneratorInfo>& info,
                         const Solution& sol) {
  const std::size_t n = instance.n();
  const std::size_t m = instance.m();
  out << "n=" << n << " q=" << QLabel(info) << " m=" << m << " nm=" << n * m
      << " iterations=" << sol.iterations << " seconds="
      << Fixed(sol.seconds, 3) << " converged=" << (sol.converged ? 1 : 0)
      << " residual=" << Sci(sol.final_residual)
      << " threshold=" << Sci(sol.threshold)
      << " utility=" << Fixed(sol.utility, 6) << '\n';
}

inline int RunSolve(const SolveArgs& a, std::ostream& out) {
  const SolverConfig config = a.flags.Config();
  const Loaded loaded = LoadInstance(a.instance);
  std::optional<WarmStart> warm;
  if (!a.warm_start.empty()) {
    warm = ReadWarmStart(a.warm_start);
    if (warm->flows.rows() != loaded.instance.n() ||
        warm->flows.cols() != loaded.instance.m()) {
      throw FormatError("warm start does not match the instance shape");
    }
  }
  const Solution sol = Solve(loaded.instance, config, warm);
  if (!a.solution.empty()) WriteSolution(a.solution, sol);
  if (!a.trace.empty()) WriteTraceCsv(a.trace, sol.trace);
  PrintSummary(out, loaded.instance, loaded.info, sol);
  return sol.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- warmstart

struct WarmStartArgs {
  std::string instance;
  double nu = 0.1;
  std::uint64_t seed = 0;
  std::string out;
  SolverFlags flags;
};

inline void AddWarmStart(CLI::App& app, WarmStartArgs& a) {
  app.add_option("--instance", a.instance, "instance file")->required();
  app.add_option("--nu", a.nu, "weight perturbation ratio in [0, 1)")
      ->capture_default_str();
  app.add_option("--seed", a.seed, "perturbation seed")
      ->capture_default_str();
  app.add_option("--out", a.out, "warm-start file to write");
  a.flags.Register(app);
}

inline int RunWarmStart(const WarmStartArgs& a, std::ostream& out) {
  if (!(a.nu >= 0.0 && a.nu < 1.0)) {
    throw UsageError("--nu must lie in [0, 1)");
  }
  const SolverConfig config = a.flags.Config();
  const Loaded loaded = LoadInstance(a.instance);
  const PerturbedWarmStart ws =
      WarmStartFromPerturbed(loaded.instance, a.nu, a.seed, config);
  if (!a.out.empty()) WriteWarmStart(a.out, ws.start);
  const Solution cold = Solve(loaded.instance, config);
  const Solution warm = Solve(loaded.instance, config, ws.start);
  out << "nu=" << a.nu << " omega_feas=" << Sci(ws.start.omega)
      << " feasibility_iterations=" << ws.feasibility_iterations
      << " cold_iterations=" << cold.iterations
      << " warm_iterations=" << warm.iterations
      << " cold_seconds=" << Fixed(cold.seconds, 3)
      << " warm_seconds=" << Fixed(warm.seconds, 3)
      << " cold_converged=" << (cold.converged ? 1 : 0)
      << " warm_converged=" << (warm.converged ? 1 : 0) << '\n';
  return cold.converged && warm.converged ? kExitOk : kExitNotConverged;
}

// -------------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::string> sizes;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string out;
  SolverFlags flags;
};

inline void AddBench(CLI::App& app, BenchArgs& a) {
  app.add_option("--sizes", a.sizes, "instance sizes as n:q, e.g. 100:10")
      ->required()
      ->delimiter(',');
  app.add_option("--seeds", a.seeds, "generator seeds")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--out", a.out, "CSV file to write (default: stdout)");
  a.flags.Register(app);
}

inline std::pair<int, int> ParseSize(const std::string& s) {
  const auto colon = s.find(':');
  std::size_t used_n = 0, used_q = 0;
  int n = 0, q = 0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    const std::string ns = s.substr(0, colon);
    const std::string qs = s.substr(colon + 1);
    n = std::stoi(ns, &used_n);
    q = std::stoi(qs, &used_q);
    if (used_n != ns.size() || used_q != qs.size()) {
      throw std::invalid_argument(s);
    }
  } catch (const std::exception&) {
    throw UsageError("bad size '" + s + "', expected n:q");
  }
  if (n < 2 || q < 1 || q >= n) {
    throw UsageError("bad size '" + s + "': need n >= 2 and 1 <= q < n");
  }
  return {n, q};
}

inline constexpr const char* kBenchHeader =
    "n,q,seed,m,nm,iterations,seconds,converged,final_residual,threshold,"
    "status";

inline int RunBench(const BenchArgs& a, std::ostream& out) {
  const SolverConfig config = a.flags.Config();
  std::vector<std::pair<int, int>> sizes;
  for (const auto& s : a.sizes) sizes.push_back(ParseSize(s));
  std::ostringstream csv;
  csv << kBenchHeader << '\n';
  bool all_converged = true;
  for (const auto& [n, q] : sizes) {
    for (const std::uint64_t seed : a.seeds) {
      std::ostringstream row;
      row << n << ',' << q << ',' << seed << ',';
      try {
        const ProblemInstance instance = GenerateInstance(n, q, seed);
        const Solution sol = Solve(instance, config);
        const std::size_t nm = instance.n() * instance.m();
        row << instance.m() << ',' << nm << ',' << sol.iterations << ','
            << Fixed(sol.seconds, 6) << ',' << (sol.converged ? 1 : 0) << ','
            << pdmcf::internal::FormatNumber(sol.final_residual) << ','
            << pdmcf::internal::FormatNumber(sol.threshold) << ','
            << (sol.converged ? "ok" : "not_converged");
        all_converged = all_converged && sol.converged;
      } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& c : msg) {
          if (c == ',' || c == '\n') c = ' ';
        }
        row << ",,,,0,,,error: " << msg;
        all_converged = false;
      }
      csv << row.str() << '\n';
    }
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    pdmcf::internal::WriteText(a.out, csv.str());
    out << "wrote " << sizes.size() * a.seeds.size() << " rows to " << a.out
        << '\n';
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace internal

// Parses and runs one command. Normal output goes to `out`, diagnostics to
// `err`. Returns the process exit code.
inline int Run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"All-pairs multicommodity flow solver", "pdmcf"};
  app.require_subcommand(1);
  internal::GenerateArgs gen;
  internal::SolveArgs solve;
  internal::WarmStartArgs warm;
  internal::BenchArgs bench;
  auto* gen_cmd = app.add_subcommand("generate", "write a random instance");
  internal::AddGenerate(*gen_cmd, gen);
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance");
  internal::AddSolve(*solve_cmd, solve);
  auto* warm_cmd = app.add_subcommand(
      "warmstart", "warm start from a perturbed problem; compare with cold");
  internal::AddWarmStart(*warm_cmd, warm);
  auto* bench_cmd =
      app.add_subcommand("bench", "solve generated instances over a sweep");
  internal::AddBench(*bench_cmd, bench);

  // CLI11 wants argv order with the program name removed, reversed.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return internal::RunGenerate(gen, out);
    if (*solve_cmd) return internal::RunSolve(solve, out);
    if (*warm_cmd) return internal::RunWarmStart(warm, out);
    if (*bench_cmd) return internal::RunBench(bench, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  }
  return kExitUsage;
}

inline int Run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return Run(args, out, err);
}

}  // namespace pdmcf::cli

#endif  // PDMCF_CLI_HPP_
