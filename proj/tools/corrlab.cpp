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

// corrlab: decide where a correlation matrix sits relative to the quantum
// set Cor(n,m) -- membership, extremality, exposedness, locality and the
// singlet self-test classification -- with machine-checkable certificates.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "corrlab/io.hpp"

namespace {

using namespace corrlab;
using completion::Correlator;
using io::AnalysisReport;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNotMember = 3;
constexpr int kExitSolver = 4;
constexpr int kExitIo = 5;

struct ToleranceFlags {
  double rank_tol = -1.0, tight_tol = -1.0, gap_tol = -1.0;

  Tolerances resolve() const {
    Tolerances t = io::tolerances_from_env();
    if (rank_tol > 0) t.rank_rel = rank_tol;
    if (tight_tol > 0) t.tight_abs = tight_tol;
    if (gap_tol > 0) t.sdp_gap = gap_tol;
    t.validate();
    return t;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--rank-tol", rank_tol, "override Tolerances.rank_rel");
    cmd->add_option("--tight-tol", tight_tol, "override Tolerances.tight_abs");
    cmd->add_option("--gap-tol", gap_tol, "override Tolerances.sdp_gap");
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int run_analyze(const std::string& input, const std::string& format,
                const std::string& method, const Tolerances& tol) {
  Correlator c = io::parse_correlator_arg(input);
  AnalysisReport rep;
  rep.input = c;
  rep.tol = tol;
  rep.method = method;

  bool member = false;
  {
    auto t0 = std::chrono::steady_clock::now();
    bool have_analytic = false;
    if (method != "sdp" && std::min(c.n(), c.m()) <= 2) {
      rep.analytic = geometry::membership_analytic(c, tol);
      have_analytic = true;
    }
    if (method != "analytic") {
      auto ms = geometry::membership_sdp(c, tol);
      member = ms.member;
      rep.margin = ms.margin;
      rep.has_margin = true;
      rep.membership_verdict = !ms.member               ? "not-member"
                               : std::abs(ms.margin) <= tol.psd_abs ? "boundary"
                                                                    : "member";
    } else {
      if (!have_analytic)
        throw WrongScenario("--method analytic requires min(n,m) <= 2");
      member = rep.analytic->member;
      rep.membership_verdict = member ? "member" : "not-member";
    }
    rep.timings.push_back({"membership", seconds_since(t0)});
  }

  if (member) {
    auto t0 = std::chrono::steady_clock::now();
    rep.extremality = geometry::is_extreme(c, tol);
    rep.timings.push_back({"extremality", seconds_since(t0)});

    if (rep.extremality->status == geometry::ExtremalityStatus::Extreme) {
      t0 = std::chrono::steady_clock::now();
      rep.exposedness = geometry::is_exposed(c, tol);
      rep.timings.push_back({"exposedness", seconds_since(t0)});
    }

    if (c.n() + c.m() <= 20) {
      t0 = std::chrono::steady_clock::now();
      rep.locality = geometry::is_local(c, tol);
      rep.timings.push_back({"locality", seconds_since(t0)});
    }

    if (c.n() == 2 && c.m() == 2) {
      t0 = std::chrono::steady_clock::now();
      rep.self_test = geometry::self_tests_singlet_2x2(c, tol);
      rep.timings.push_back({"self_test", seconds_since(t0)});
    }
  }

  if (format == "machine")
    std::cout << io::report_json(rep).dump() << "\n";
  else
    std::cout << io::report_text(rep);
  return member ? kExitOk : kExitNotMember;
}

int run_generate(long count, std::uint64_t seed, const std::string& out_path,
                 const Tolerances& tol) {
  std::ostream* os = &std::cout;
  std::ofstream f;
  if (!out_path.empty()) {
    f.open(out_path);
    if (!f) {
      std::cerr << "cannot open output '" << out_path << "'\n";
      return kExitIo;
    }
    os = &f;
  }
  models::RngStream rng(seed);
  for (long i = 0; i < count; ++i)
    *os << io::to_record(models::random_extremal_2x2(rng, tol)) << "\n";
  if (os->fail()) {
    std::cerr << "write failure\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_batch(const std::string& path, const std::string& mode,
              const std::string& format, const Tolerances& tol) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "cannot open input '" << path << "'\n";
    return kExitIo;
  }
  long n_extreme = 0, n_not_extreme = 0, n_inconclusive = 0;
  long n_exposed = 0, n_unknown = 0;
  long n_not_member = 0, n_malformed = 0, n_failed = 0;
  std::string line;
  long index = 0;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++index;
    Correlator c(1, 1);
    try {
      c = io::parse_record(line);
    } catch (const ParseError& e) {
      std::cerr << "record " << index << " skipped: " << e.what() << "\n";
      ++n_malformed;
      continue;
    }
    std::string verdict, detail;
    try {
      auto ext = geometry::is_extreme(c, tol);
      if (mode == "extremality") {
        verdict = geometry::to_string(ext.status);
        detail = geometry::to_string(ext.reason);
        if (ext.status == geometry::ExtremalityStatus::Extreme) ++n_extreme;
        else if (ext.status == geometry::ExtremalityStatus::NotExtreme) ++n_not_extreme;
        else ++n_inconclusive;
      } else {
        if (ext.status != geometry::ExtremalityStatus::Extreme) {
          verdict = "NotExtreme";
          ++n_not_extreme;
        } else {
          auto xp = geometry::is_exposed(c, tol);
          verdict = geometry::to_string(xp.status);
          if (xp.status == geometry::ExposednessStatus::Exposed) ++n_exposed;
          else ++n_unknown;
        }
      }
    } catch (const NotAMember&) {
      verdict = "NotAMember";
      ++n_not_member;
    } catch (const NumericalFailure& e) {
      verdict = "SolverFailure";
      detail = e.what();
      ++n_failed;
    }
    if (format == "machine") {
      io::json j;
      j["index"] = index;
      j["input"] = io::correlator_json(c);
      j["verdict"] = verdict;
      if (!detail.empty()) j["detail"] = detail;
      std::cout << j.dump() << "\n";
    } else {
      std::cout << index << ": " << verdict
                << (detail.empty() ? "" : " (" + detail + ")") << "\n";
    }
  }
  if (format == "machine") {
    io::json s;
    s["summary"] = true;
    s["mode"] = mode;
    if (mode == "extremality")
      s["counts"] = {{"Extreme", n_extreme},
                     {"NotExtreme", n_not_extreme},
                     {"Inconclusive", n_inconclusive}};
    else
      s["counts"] = {{"Exposed", n_exposed},
                     {"Unknown", n_unknown},
                     {"NotExtreme", n_not_extreme}};
    s["not_member"] = n_not_member;
    s["malformed"] = n_malformed;
    s["solver_failures"] = n_failed;
    std::cout << s.dump() << "\n";
  } else {
    std::cout << "summary (" << mode << "): ";
    if (mode == "extremality")
      std::cout << "Extreme " << n_extreme << ", NotExtreme " << n_not_extreme
                << ", Inconclusive " << n_inconclusive;
    else
      std::cout << "Exposed " << n_exposed << ", Unknown " << n_unknown
                << ", NotExtreme " << n_not_extreme;
    std::cout << ", NotAMember " << n_not_member << ", malformed "
              << n_malformed << ", solver failures " << n_failed << "\n";
  }
  return n_failed > 0 ? kExitSolver : kExitOk;
}

int run_support(const std::string& input, const std::string& format,
                const Tolerances& tol) {
  io::RawMatrix lam = io::parse_matrix_arg_raw(input);
  auto r = geometry::support_value(lam.n, lam.m, lam.entries, tol);
  if (format == "machine") {
    io::json j;
    j["value"] = r.value;
    j["argmax"] = io::correlator_json(r.argmax);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "support value: " << io::fmt17(r.value) << "\n";
    std::cout << "argmax:\n";
    for (int x = 0; x < r.argmax.n(); ++x) {
      std::cout << " ";
      for (int y = 0; y < r.argmax.m(); ++y)
        std::cout << " " << io::fmt17(r.argmax(x, y));
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int run_complete(const std::string& input, const std::string& format,
                 const Tolerances& tol) {
  Correlator c = io::parse_correlator_arg(input);
  auto fc = completion::find_completion(c, tol);
  std::optional<std::pair<double, double>> interval;
  if (c.n() == 2 && c.m() == 2)
    interval = completion::completion_interval_2x2(c, tol);
  if (format == "machine") {
    io::json j;
    j["member"] = fc.member;
    j["margin"] = fc.margin;
    if (fc.member) {
      j["unique"] = fc.unique;
      j["completion"] = io::matrix_json(*fc.completion);
      j["dual_certificate"] = io::matrix_json(*fc.dual_certificate);
      j["rank_completion"] = fc.rank_completion;
    }
    if (c.n() == 2 && c.m() == 2) {
      if (interval)
        j["interval_theta34"] = {interval->first, interval->second};
      else
        j["interval_theta34"] = nullptr;
    }
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "member: " << (fc.member ? "yes" : "no") << ", margin "
              << io::fmt17(fc.margin) << "\n";
    if (fc.member) {
      std::cout << "unique completion: " << (fc.unique ? "yes" : "no") << "\n";
      std::cout << "completion:\n" << io::matrix_text(*fc.completion, "  ");
    }
    if (c.n() == 2 && c.m() == 2) {
      if (interval)
        std::cout << "theta34 interval: [" << io::fmt17(interval->first)
                  << ", " << io::fmt17(interval->second) << "]\n";
      else
        std::cout << "theta34 interval: empty\n";
    }
  }
  return fc.member ? kExitOk : kExitNotMember;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrlab: geometry of the quantum correlator set Cor(n,m)"};
  app.require_subcommand(1);

  std::string input, format = "text", method = "both", mode = "extremality";
  std::string out_path, batch_path;
  long count = 0;
  std::uint64_t seed = 0;
  ToleranceFlags tf;

  auto* analyze = app.add_subcommand(
      "analyze", "full pipeline: membership, extremality, exposedness, "
                 "locality, self-test");
  analyze->add_option("input", input,
                      "named instance (chsh, mayers_yao, tilted_example3, "
                      "pr_box), inline [[...]], record {...}, or file path")
      ->required();
  analyze->add_option("--format", format, "text|machine")
      ->check(CLI::IsMember({"text", "machine"}));
  analyze->add_option("--method", method, "membership route: analytic|sdp|both")
      ->check(CLI::IsMember({"analytic", "sdp", "both"}));
  tf.attach(analyze);

  auto* generate = app.add_subcommand(
      "generate", "emit random extremal 2x2 correlators, one record per line");
  generate->add_option("--count", count, "number of instances")->required();
  generate->add_option("--seed", seed, "generator seed (default 0)");
  generate->add_option("--out", out_path, "output path (default stdout)");
  tf.attach(generate);

  auto* batch = app.add_subcommand("batch",
                                   "run a verdict over a file of records");
  batch->add_option("input", batch_path, "record file path")->required();
  batch->add_option("--mode", mode, "extremality|exposedness")
      ->check(CLI::IsMember({"extremality", "exposedness"}));
  batch->add_option("--format", format, "text|machine")
      ->check(CLI::IsMember({"text", "machine"}));
  tf.attach(batch);

  auto* support = app.add_subcommand(
      "support", "support function max <Lambda, C> over Cor(n,m)");
  support->add_option("input", input, "functional coefficients (matrix forms)")
      ->required();
  support->add_option("--format", format, "text|machine")
      ->check(CLI::IsMember({"text", "machine"}));
  tf.attach(support);

  auto* complete = app.add_subcommand(
      "complete", "PSD completion and the 2x2 chordal interval only");
  complete->add_option("input", input, "correlator (same forms as analyze)")
      ->required();
  complete->add_option("--format", format, "text|machine")
      ->check(CLI::IsMember({"text", "machine"}));
  tf.attach(complete);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitParse;
  }

  try {
    Tolerances tol = tf.resolve();
    if (app.got_subcommand(analyze)) return run_analyze(input, format, method, tol);
    if (app.got_subcommand(generate)) {
      if (count < 1) {
        std::cerr << "--count must be >= 1\n";
        return kExitParse;
      }
      return run_generate(count, seed, out_path, tol);
    }
    if (app.got_subcommand(batch)) return run_batch(batch_path, mode, format, tol);
    if (app.got_subcommand(support)) return run_support(input, format, tol);
    if (app.got_subcommand(complete)) return run_complete(input, format, tol);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const NumericalFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
