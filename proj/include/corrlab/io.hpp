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

#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "corrlab/expr.hpp"
#include "corrlab/geometry.hpp"
#include "corrlab/models.hpp"

namespace corrlab::io {

using completion::Correlator;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Correlator parsing
// ---------------------------------------------------------------------------

struct RawMatrix {
  int n = 0, m = 0;
  std::vector<double> entries;  // row-major
};

/// Inline bracketed rows with expression entries:
/// "[[1/sqrt(2), 1/sqrt(2)], [1/sqrt(2), -1/sqrt(2)]]".
inline RawMatrix parse_inline_matrix_raw(const std::string& text) {
  size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  auto expect = [&](char c) {
    skip();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "' in matrix literal");
    ++pos;
  };
  expect('[');
  std::vector<std::vector<double>> rows;
  for (;;) {
    expect('[');
    std::vector<double> row;
    for (;;) {
      skip();
      size_t start = pos;
      int depth = 0;
      while (pos < text.size()) {
        char c = text[pos];
        if (c == '(') ++depth;
        if (c == ')') {
          if (depth == 0) break;
          --depth;
        }
        if (depth == 0 && (c == ',' || c == ']')) break;
        ++pos;
      }
      std::string tok = text.substr(start, pos - start);
      if (tok.find_first_not_of(" \t") == std::string::npos)
        throw ParseError("empty entry in matrix literal");
      row.push_back(expr::eval(tok));
      skip();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      expect(']');
      break;
    }
    rows.push_back(std::move(row));
    skip();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      continue;
    }
    expect(']');
    break;
  }
  const int n = int(rows.size());
  const int m = int(rows[0].size());
  RawMatrix out{n, m, {}};
  for (const auto& r : rows) {
    if (int(r.size()) != m) throw ParseError("ragged rows in matrix literal");
    out.entries.insert(out.entries.end(), r.begin(), r.end());
  }
  return out;
}

inline Correlator parse_inline_matrix(const std::string& text) {
  RawMatrix r = parse_inline_matrix_raw(text);
  try {
    return Correlator(r.n, r.m, r.entries);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid correlator: ") + e.what());
  }
}

/// Whitespace matrix: one row per nonempty line, entries are expressions
/// without internal whitespace.
inline RawMatrix parse_whitespace_matrix_raw(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream ls(text);
  std::string line;
  while (std::getline(ls, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ts(line);
    std::vector<double> row;
    std::string tok;
    while (ts >> tok) row.push_back(expr::eval(tok));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix file");
  const int m = int(rows[0].size());
  RawMatrix out{int(rows.size()), m, {}};
  for (const auto& r : rows) {
    if (int(r.size()) != m) throw ParseError("ragged rows in matrix file");
    out.entries.insert(out.entries.end(), r.begin(), r.end());
  }
  return out;
}

inline Correlator parse_whitespace_matrix(const std::string& text) {
  RawMatrix r = parse_whitespace_matrix_raw(text);
  try {
    return Correlator(r.n, r.m, r.entries);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid correlator: ") + e.what());
  }
}

/// Machine record: {"n":..., "m":..., "c":[row-major entries]}.
inline Correlator parse_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad record: ") + e.what());
  }
  if (!j.contains("n") || !j.contains("m") || !j.contains("c"))
    throw ParseError("record needs fields n, m, c");
  int n = j["n"].get<int>(), m = j["m"].get<int>();
  std::vector<double> c = j["c"].get<std::vector<double>>();
  try {
    return Correlator(n, m, c);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid correlator record: ") + e.what());
  }
}

inline std::string to_record(const Correlator& c) {
  json j;
  j["n"] = c.n();
  j["m"] = c.m();
  j["c"] = c.raw();
  return j.dump();
}

/// Dispatch: named instance, inline literal, machine record, or a file path
/// (records / whitespace matrix).
inline Correlator parse_correlator_arg(const std::string& arg) {
  if (arg == "chsh" || arg == "mayers_yao" || arg == "tilted_example3" ||
      arg == "pr_box")
    return models::named(arg);
  std::string s = arg;
  size_t a = s.find_first_not_of(" \t\n");
  if (a == std::string::npos) throw ParseError("empty correlator argument");
  if (s[a] == '[') return parse_inline_matrix(s);
  if (s[a] == '{') return parse_record(s);
  std::ifstream f(arg);
  if (!f) throw ParseError("cannot open input '" + arg + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  std::string text = buf.str();
  size_t b = text.find_first_not_of(" \t\n\r");
  if (b != std::string::npos && text[b] == '{') {
    // first record of a record file
    std::istringstream ls(text);
    std::string line;
    while (std::getline(ls, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        return parse_record(line);
    throw ParseError("no records in '" + arg + "'");
  }
  return parse_whitespace_matrix(text);
}

/// Functional coefficients: inline literal, machine record, or file; entries
/// are unrestricted reals.
inline RawMatrix parse_matrix_arg_raw(const std::string& arg) {
  std::string s = arg;
  size_t a = s.find_first_not_of(" \t\n");
  if (a == std::string::npos) throw ParseError("empty matrix argument");
  if (s[a] == '[') return parse_inline_matrix_raw(s);
  if (s[a] == '{') {
    json j;
    try {
      j = json::parse(s);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what());
    }
    return RawMatrix{j["n"].get<int>(), j["m"].get<int>(),
                     j["c"].get<std::vector<double>>()};
  }
  std::ifstream f(arg);
  if (!f) throw ParseError("cannot open input '" + arg + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_whitespace_matrix_raw(buf.str());
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct AnalysisReport {
  Correlator input{1, 1};
  std::string membership_verdict;  // member | boundary | not-member
  double margin = 0.0;
  bool has_margin = false;
  std::optional<geometry::AnalyticMembership> analytic;
  std::optional<geometry::ExtremalityVerdict> extremality;
  std::optional<geometry::ExposednessVerdict> exposedness;
  std::optional<geometry::LocalityVerdict> locality;
  std::optional<bool> self_test;
  Tolerances tol;
  std::string method;  // analytic | sdp | both
  std::vector<StageTiming> timings;
};

inline json matrix_json(const SymMatrix& M) {
  json rows = json::array();
  for (int i = 0; i < M.dim(); ++i) {
    json r = json::array();
    for (int j = 0; j < M.dim(); ++j) r.push_back(M(i, j));
    rows.push_back(r);
  }
  return rows;
}

inline json correlator_json(const Correlator& c) {
  json j;
  j["n"] = c.n();
  j["m"] = c.m();
  j["c"] = c.raw();
  return j;
}

inline json report_json(const AnalysisReport& r) {
  json j;
  j["input"] = correlator_json(r.input);
  j["tolerances"] = {{"rank_rel", r.tol.rank_rel},
                     {"null_rel", r.tol.null_rel},
                     {"tight_abs", r.tol.tight_abs},
                     {"sdp_gap", r.tol.sdp_gap},
                     {"psd_abs", r.tol.psd_abs}};
  j["method"] = r.method;
  json mem;
  mem["verdict"] = r.membership_verdict;
  if (r.has_margin) mem["margin"] = r.margin;
  if (r.analytic) {
    json v = json::array();
    for (const auto& viol : r.analytic->violated)
      v.push_back({{"description", viol.describe()}, {"slack", viol.slack}});
    mem["violated"] = v;
  }
  j["membership"] = mem;
  if (r.extremality) {
    const auto& e = *r.extremality;
    json je;
    je["status"] = geometry::to_string(e.status);
    je["reason"] = geometry::to_string(e.reason);
    je["strict_complementarity"] = e.strict_complementarity;
    je["nondegeneracy_null_dim"] = e.nondegeneracy_null_dim;
    je["rank_C"] = e.evidence.rank_C;
    je["rank_completion"] = e.evidence.rank_completion;
    je["rank_hadamard"] = e.evidence.rank_hadamard;
    je["rank_dual"] = e.rank_Z;
    je["unique_completion"] = e.evidence.unique;
    if (e.evidence.completion) je["completion"] = matrix_json(*e.evidence.completion);
    if (e.evidence.dual_certificate)
      je["dual_certificate"] = matrix_json(*e.evidence.dual_certificate);
    j["extremality"] = je;
  }
  if (r.exposedness) {
    const auto& x = *r.exposedness;
    json jx;
    jx["status"] = geometry::to_string(x.status);
    jx["nondegeneracy_null_dim"] = x.nondegeneracy_null_dim;
    if (x.hyperplane) {
      auto hn = x.hyperplane->normalized();
      jx["hyperplane"] = {{"coeffs", x.hyperplane->coeffs},
                          {"offset", x.hyperplane->offset},
                          {"normalized_coeffs", hn.coeffs},
                          {"normalized_offset", hn.offset}};
    }
    j["exposedness"] = jx;
  }
  if (r.locality) {
    json jl;
    jl["local"] = r.locality->local;
    if (r.locality->local) {
      json w = json::array();
      std::vector<int> xs, ys;
      for (auto [idx, wt] : r.locality->weights) {
        geometry::decode_strategy(idx, r.input.n(), r.input.m(), xs, ys);
        w.push_back({{"x", xs}, {"y", ys}, {"weight", wt}});
      }
      jl["weights"] = w;
    }
    j["locality"] = jl;
  }
  if (r.self_test) j["self_test"] = *r.self_test;
  json t = json::array();
  for (const auto& s : r.timings)
    t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  j["timings"] = t;
  return j;
}

inline std::string matrix_text(const SymMatrix& M, const std::string& indent) {
  std::ostringstream os;
  for (int i = 0; i < M.dim(); ++i) {
    os << indent;
    for (int j = 0; j < M.dim(); ++j)
      os << (j ? " " : "") << fmt17(M(i, j));
    os << "\n";
  }
  return os.str();
}

inline std::string report_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "input: " << r.input.n() << "x" << r.input.m() << " [";
  for (size_t i = 0; i < r.input.raw().size(); ++i)
    os << (i ? ", " : "") << fmt17(r.input.raw()[i]);
  os << "]\n";
  os << "tolerances: rank_rel=" << fmt17(r.tol.rank_rel)
     << " null_rel=" << fmt17(r.tol.null_rel)
     << " tight_abs=" << fmt17(r.tol.tight_abs)
     << " sdp_gap=" << fmt17(r.tol.sdp_gap)
     << " psd_abs=" << fmt17(r.tol.psd_abs) << "\n";
  os << "membership (" << r.method << "): " << r.membership_verdict;
  if (r.has_margin) os << ", margin " << fmt17(r.margin);
  os << "\n";
  if (r.analytic && !r.analytic->violated.empty()) {
    os << "violated constraints:\n";
    for (const auto& v : r.analytic->violated)
      os << "  - " << v.describe() << "\n";
  }
  if (r.extremality) {
    const auto& e = *r.extremality;
    os << "extremality: " << geometry::to_string(e.status) << " ("
       << geometry::to_string(e.reason) << ")\n";
    os << "  unique completion: " << (e.evidence.unique ? "yes" : "no")
       << ", rank(C)=" << e.evidence.rank_C
       << ", rank(Chat)=" << e.evidence.rank_completion
       << ", rank(Chat o Chat)=" << e.evidence.rank_hadamard
       << ", rank(Z)=" << e.rank_Z << ", strict complementarity "
       << (e.strict_complementarity ? "yes" : "no")
       << ", nondegeneracy null dim " << e.nondegeneracy_null_dim << "\n";
    if (e.evidence.completion) {
      os << "  completion:\n" << matrix_text(*e.evidence.completion, "    ");
    }
    if (e.evidence.dual_certificate &&
        e.evidence.dual_certificate->max_abs() > 0) {
      os << "  dual certificate:\n"
         << matrix_text(*e.evidence.dual_certificate, "    ");
    }
  }
  if (r.exposedness) {
    const auto& x = *r.exposedness;
    os << "exposedness: " << geometry::to_string(x.status) << "\n";
    if (x.hyperplane) {
      auto hn = x.hyperplane->normalized();
      os << "  normalized hyperplane coeffs: [";
      for (size_t i = 0; i < hn.coeffs.size(); ++i)
        os << (i ? ", " : "") << fmt17(hn.coeffs[i]);
      os << "], offset " << fmt17(hn.offset) << "\n";
    }
  }
  if (r.locality) {
    os << "locality: " << (r.locality->local ? "local" : "not local") << "\n";
    if (r.locality->local) {
      std::vector<int> xs, ys;
      for (auto [idx, wt] : r.locality->weights) {
        geometry::decode_strategy(idx, r.input.n(), r.input.m(), xs, ys);
        os << "  weight " << fmt17(wt) << " on x=(";
        for (size_t i = 0; i < xs.size(); ++i)
          os << (i ? "," : "") << (xs[i] > 0 ? "+" : "-");
        os << ") y=(";
        for (size_t i = 0; i < ys.size(); ++i)
          os << (i ? "," : "") << (ys[i] > 0 ? "+" : "-");
        os << ")\n";
      }
    }
  }
  if (r.self_test)
    os << "self-test (singlet): " << (*r.self_test ? "true" : "false") << "\n";
  os << "timings:";
  for (const auto& t : r.timings)
    os << " " << t.stage << "=" << fmt17(t.seconds) << "s";
  os << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Tolerance profiles
// ---------------------------------------------------------------------------

/// CORRLAB_TOL_PROFILE={default, strict}; unknown values raise.
inline Tolerances tolerances_from_env() {
  const char* prof = std::getenv("CORRLAB_TOL_PROFILE");
  if (prof == nullptr || std::string(prof) == "default")
    return Tolerances::defaults();
  if (std::string(prof) == "strict") return Tolerances::strict();
  throw ParseError(std::string("unknown CORRLAB_TOL_PROFILE '") + prof + "'");
}

}  // namespace corrlab::io
