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

// File formats. Schemas are described in README.md.
//
// Instance, solution and warm-start files are JSON; numbers are printed with
// the shortest representation that reads back to the same double, so a write
// followed by a read is lossless. JSON has no infinities or NaNs; those are
// written as null and read back as +inf (residuals) or NaN (utilities).
// The trace is CSV with one row per residual check.

#ifndef PDMCF_IO_HPP_
#define PDMCF_IO_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdmcf/graph.hpp"
#include "pdmcf/instance.hpp"
#include "pdmcf/matrix.hpp"
#include "pdmcf/solver.hpp"
#include "pdmcf/utilities.hpp"

namespace pdmcf {

inline constexpr int kFormatVersion = 1;
inline constexpr double kSparseFlowThreshold = 1e-9;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The file could not be opened, read or written.
class FileError : public IoError {
 public:
  using IoError::IoError;
};

// The file was read but its contents are malformed or invalid.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

namespace internal {

using Json = nlohmann::ordered_json;

inline Json FiniteOrNull(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

inline double NumberOr(const Json& j, double fallback) {
  return j.is_null() ? fallback : j.get<double>();
}

inline Json MatrixRows(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double v : m.row(i)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix MatrixFromRows(const Json& rows, std::size_t n_rows,
                             std::size_t n_cols, const char* what) {
  if (!rows.is_array() || rows.size() != n_rows) {
    throw FormatError(std::string(what) + ": expected " +
                      std::to_string(n_rows) + " rows");
  }
  Matrix m(n_rows, n_cols);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != n_cols) {
      throw FormatError(std::string(what) + ": row " + std::to_string(i) +
                        " must have " + std::to_string(n_cols) + " entries");
    }
    for (std::size_t j = 0; j < n_cols; ++j) m(i, j) = row[j].get<double>();
  }
  return m;
}

// Objects are printed one member per line and arrays of arrays one inner
// array per line; everything else stays on one line. Keeps files diffable
// without one line per number.
inline void FormatValue(std::ostream& out, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  if (v.is_object() && !v.empty()) {
    out << "{\n";
    std::size_t k = 0;
    for (auto it = v.begin(); it != v.end(); ++it, ++k) {
      out << pad << Json(it.key()).dump() << ": ";
      FormatValue(out, it.value(), indent + 2);
      out << (k + 1 < v.size() ? ",\n" : "\n");
    }
    out << std::string(static_cast<std::size_t>(indent), ' ') << '}';
  } else if (v.is_array() && !v.empty() && v.front().is_array()) {
    out << "[\n";
    for (std::size_t r = 0; r < v.size(); ++r) {
      out << pad << v[r].dump() << (r + 1 < v.size() ? ",\n" : "\n");
    }
    out << std::string(static_cast<std::size_t>(indent), ' ') << ']';
  } else {
    out << v.dump();
  }
}

inline std::string FormatDocument(const Json& doc) {
  std::ostringstream out;
  FormatValue(out, doc, 0);
  out << '\n';
  return out.str();
}

inline Json ParseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw FileError("cannot read " + path);
  try {
    return Json::parse(buffer.str());
  } catch (const Json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw FileError("cannot write " + path);
}

inline void RequireVersion(const Json& doc) {
  if (!doc.is_object() || !doc.contains("version")) {
    throw FormatError("missing version field");
  }
  if (doc.at("version").get<int>() != kFormatVersion) {
    throw FormatError("unsupported version " + doc.at("version").dump());
  }
}

// Converts library and json exceptions raised while decoding into
// FormatError.
template <typename Fn>
auto Decode(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const IoError&) {
    throw;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw FormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

}  // namespace internal

// ---------------------------------------------------------------- instance

// Optional record of how an instance was generated; lets reports show q.
struct GeneratorInfo {
  int q = 0;
  std::uint64_t seed = 0;
};

inline nlohmann::ordered_json InstanceToJson(const ProblemInstance& instance,
                                     const GeneratorInfo* info = nullptr) {
  using internal::Json;
  const Topology& topo = instance.topology;
  Json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = topo.n();
  Json edges = Json::array();
  for (const Edge& e : topo.edges()) edges.push_back(Json::array({e.tail, e.head}));
  doc["edges"] = std::move(edges);
  doc["capacities"] = topo.capacities();
  Json utility;
  const UtilityFamily& family = instance.utility.family;
  utility["family"] = family.kind == UtilityKind::kLog ? "log" : "power";
  if (family.kind == UtilityKind::kPower) {
    utility["gamma"] = family.power_exponent;
  }
  utility["weights"] = internal::MatrixRows(instance.utility.weights);
  doc["utility"] = std::move(utility);
  if (info != nullptr) {
    doc["generator"] = {{"q", info->q}, {"seed", info->seed}};
  }
  return doc;
}

inline std::optional<GeneratorInfo> GeneratorInfoFromJson(
    const nlohmann::ordered_json& doc) {
  if (!doc.is_object() || !doc.contains("generator")) return std::nullopt;
  return internal::Decode([&] {
    const auto& g = doc.at("generator");
    return std::optional<GeneratorInfo>(
        GeneratorInfo{g.at("q").get<int>(), g.at("seed").get<std::uint64_t>()});
  });
}

inline ProblemInstance InstanceFromJson(const nlohmann::ordered_json& doc) {
  return internal::Decode([&] {
    internal::RequireVersion(doc);
    const int n = doc.at("n").get<int>();
    if (n < 2) throw FormatError("n must be at least 2");
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw FormatError("edges must be [tail, head] pairs");
      }
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    auto caps = doc.at("capacities").get<std::vector<double>>();
    const auto& u = doc.at("utility");
    const auto family_name = u.at("family").get<std::string>();
    UtilityFamily family;
    if (family_name == "log") {
      family = UtilityFamily::Log();
    } else if (family_name == "power") {
      family = UtilityFamily::Power(u.at("gamma").get<double>());
    } else {
      throw FormatError("unknown utility family '" + family_name + "'");
    }
    const auto un = static_cast<std::size_t>(n);
    Matrix weights = internal::MatrixFromRows(u.at("weights"), un, un,
                                              "utility.weights");
    ProblemInstance instance{Topology(n, std::move(edges), std::move(caps)),
                             UtilitySpec{family, std::move(weights)}};
    instance.Validate();
    return instance;
  });
}

inline std::string FormatInstance(const ProblemInstance& instance,
                                  const GeneratorInfo* info = nullptr) {
  return internal::FormatDocument(InstanceToJson(instance, info));
}

inline void WriteInstance(const std::string& path,
                          const ProblemInstance& instance,
                          const GeneratorInfo* info = nullptr) {
  internal::WriteText(path, FormatInstance(instance, info));
}

inline ProblemInstance ReadInstance(const std::string& path) {
  return InstanceFromJson(internal::ParseFile(path));
}

// ---------------------------------------------------------------- solution

// Flow entries with |value| <= kSparseFlowThreshold are dropped. Traffic and
// dual are stored densely. The trace goes to its own CSV file.
inline nlohmann::ordered_json SolutionToJson(const Solution& sol) {
  using internal::Json;
  Json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = sol.flows.rows();
  doc["m"] = sol.flows.cols();
  doc["converged"] = sol.converged;
  doc["iterations"] = sol.iterations;
  doc["final_residual"] = internal::FiniteOrNull(sol.final_residual);
  doc["threshold"] = sol.threshold;
  doc["utility"] = internal::FiniteOrNull(sol.utility);
  doc["omega"] = sol.omega;
  doc["seconds"] = sol.seconds;
  doc["flow_threshold"] = kSparseFlowThreshold;
  Json flows = Json::array();
  for (std::size_t i = 0; i < sol.flows.rows(); ++i) {
    for (std::size_t l = 0; l < sol.flows.cols(); ++l) {
      const double v = sol.flows(i, l);
      if (std::abs(v) > kSparseFlowThreshold) {
        flows.push_back(Json::array({i, l, v}));
      }
    }
  }
  doc["flows"] = std::move(flows);
  doc["traffic"] = internal::MatrixRows(sol.traffic);
  doc["dual"] = internal::MatrixRows(sol.dual);
  return doc;
}

inline Solution SolutionFromJson(const nlohmann::ordered_json& doc) {
  return internal::Decode([&] {
    internal::RequireVersion(doc);
    Solution sol;
    const auto n = doc.at("n").get<std::size_t>();
    const auto m = doc.at("m").get<std::size_t>();
    sol.converged = doc.at("converged").get<bool>();
    sol.iterations = doc.at("iterations").get<std::int64_t>();
    sol.final_residual = internal::NumberOr(
        doc.at("final_residual"), std::numeric_limits<double>::infinity());
    sol.threshold = doc.at("threshold").get<double>();
    sol.utility = internal::NumberOr(doc.at("utility"),
                                     std::numeric_limits<double>::quiet_NaN());
    sol.omega = doc.at("omega").get<double>();
    sol.seconds = doc.at("seconds").get<double>();
    sol.flows = Matrix(n, m);
    for (const auto& t : doc.at("flows")) {
      if (!t.is_array() || t.size() != 3) {
        throw FormatError("flows must be [destination, edge, value] triplets");
      }
      const auto i = t[0].get<std::size_t>();
      const auto l = t[1].get<std::size_t>();
      if (i >= n || l >= m) throw FormatError("flow index out of range");
      sol.flows(i, l) = t[2].get<double>();
    }
    sol.traffic = internal::MatrixFromRows(doc.at("traffic"), n, n, "traffic");
    sol.dual = internal::MatrixFromRows(doc.at("dual"), n, n, "dual");
    return sol;
  });
}

inline void WriteSolution(const std::string& path, const Solution& sol) {
  internal::WriteText(path, internal::FormatDocument(SolutionToJson(sol)));
}

inline Solution ReadSolution(const std::string& path) {
  return SolutionFromJson(internal::ParseFile(path));
}

// -------------------------------------------------------------- warm start

// Flows are stored densely and exactly: they seed F^{-1/2} directly.
inline nlohmann::ordered_json WarmStartToJson(const WarmStart& warm) {
  using internal::Json;
  Json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = warm.flows.rows();
  doc["m"] = warm.flows.cols();
  doc["omega"] = warm.omega;
  doc["flows"] = internal::MatrixRows(warm.flows);
  doc["dual"] = internal::MatrixRows(warm.dual);
  return doc;
}

inline WarmStart WarmStartFromJson(const nlohmann::ordered_json& doc) {
  return internal::Decode([&] {
    internal::RequireVersion(doc);
    const auto n = doc.at("n").get<std::size_t>();
    const auto m = doc.at("m").get<std::size_t>();
    WarmStart warm;
    warm.omega = doc.at("omega").get<double>();
    if (!(warm.omega > 0.0) || !std::isfinite(warm.omega)) {
      throw FormatError("omega must be positive");
    }
    warm.flows = internal::MatrixFromRows(doc.at("flows"), n, m, "flows");
    warm.dual = internal::MatrixFromRows(doc.at("dual"), n, n, "dual");
    return warm;
  });
}

inline void WriteWarmStart(const std::string& path, const WarmStart& warm) {
  internal::WriteText(path, internal::FormatDocument(WarmStartToJson(warm)));
}

inline WarmStart ReadWarmStart(const std::string& path) {
  return WarmStartFromJson(internal::ParseFile(path));
}

// ------------------------------------------------------------------- trace

inline constexpr const char* kTraceHeader =
    "iter,residual,infeasible_fraction,omega,utility";

namespace internal {

inline std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

inline double ParseNumber(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw FormatError("bad number '" + s + "'");
  }
  if (used != s.size()) throw FormatError("bad number '" + s + "'");
  return v;
}

}  // namespace internal

inline void WriteTraceCsv(std::ostream& out,
                          const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& t : trace) {
    out << t.iter << ',' << internal::FormatNumber(t.residual) << ','
        << internal::FormatNumber(t.infeasible_fraction) << ','
        << internal::FormatNumber(t.omega) << ','
        << internal::FormatNumber(t.utility) << '\n';
  }
}

inline void WriteTraceCsv(const std::string& path,
                          const std::vector<TraceRecord>& trace) {
  std::ostringstream text;
  WriteTraceCsv(text, trace);
  internal::WriteText(path, text.str());
}

inline std::vector<TraceRecord> ReadTraceCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw FormatError("trace: missing header");
  }
  std::vector<TraceRecord> trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    if (fields.size() != 5) throw FormatError("trace: expected 5 columns");
    TraceRecord t;
    t.iter = static_cast<std::int64_t>(internal::ParseNumber(fields[0]));
    t.residual = internal::ParseNumber(fields[1]);
    t.infeasible_fraction = internal::ParseNumber(fields[2]);
    t.omega = internal::ParseNumber(fields[3]);
    t.utility = internal::ParseNumber(fields[4]);
    trace.push_back(t);
  }
  return trace;
}

inline std::vector<TraceRecord> ReadTraceCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path);
  return ReadTraceCsv(in);
}

}  // namespace pdmcf

#endif  // PDMCF_IO_HPP_
