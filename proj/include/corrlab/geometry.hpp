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

#include <cstdint>
#include <sstream>

#include "corrlab/completion.hpp"

namespace corrlab::geometry {

using completion::Correlator;

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

struct InequalityViolation {
  enum class Kind { BoxLow, BoxHigh, CycleLow, CycleHigh };
  Kind kind;
  // box: (x, y) is the entry. cycle: columns (i, j) with the angle at (x, y)
  // negated; indices refer to the oriented frame (2-input party on rows).
  int x = -1, y = -1, i = -1, j = -1;
  double slack = 0.0;  // negative = amount of violation

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::BoxLow:
        os << "box theta(" << x + 1 << "," << y + 1 << ") >= 0";
        break;
      case Kind::BoxHigh:
        os << "box theta(" << x + 1 << "," << y + 1 << ") <= pi";
        break;
      case Kind::CycleLow:
        os << "cycle over columns {" << i + 1 << "," << j + 1
           << "}, negated theta(" << x + 1 << "," << y + 1 << "), >= 0 side";
        break;
      case Kind::CycleHigh:
        os << "cycle over columns {" << i + 1 << "," << j + 1
           << "}, negated theta(" << x + 1 << "," << y + 1 << "), <= 2pi side";
        break;
    }
    os << ", slack " << slack;
    return os.str();
  }
};

struct AnalyticMembership {
  bool member = false;
  bool transposed = false;  // true if the input was oriented by transposition
  std::vector<InequalityViolation> violated;
};

/// Tsirelson-Landau-Masanes style test: valid whenever min(n,m) <= 2. The
/// input is oriented so the party with at most two inputs indexes the rows;
/// membership holds iff every box and four-cycle bound does.
inline AnalyticMembership membership_analytic(const Correlator& c,
                                              const Tolerances& tol) {
  if (std::min(c.n(), c.m()) > 2)
    throw WrongScenario("analytic membership requires min(n,m) <= 2");
  AnalyticMembership out;
  Correlator M = c;
  if (c.n() > 2) {
    M = c.transposed();
    out.transposed = true;
  }
  const int rows = M.n(), cols = M.m();
  completion::AngleMatrix th = completion::angles(M);
  const double pi = std::acos(-1.0);

  for (int x = 0; x < rows; ++x)
    for (int y = 0; y < cols; ++y) {
      double t = th(x, y);
      if (t < -tol.tight_abs)
        out.violated.push_back(
            {InequalityViolation::Kind::BoxLow, x, y, -1, -1, t});
      if (t > pi + tol.tight_abs)
        out.violated.push_back(
            {InequalityViolation::Kind::BoxHigh, x, y, -1, -1, pi - t});
    }

  if (rows == 2) {
    for (int i = 0; i < cols; ++i)
      for (int j = i + 1; j < cols; ++j) {
        const double t[4] = {th(0, i), th(0, j), th(1, i), th(1, j)};
        const int px[4] = {0, 0, 1, 1};
        const int py[4] = {i, j, i, j};
        double total = t[0] + t[1] + t[2] + t[3];
        for (int d = 0; d < 4; ++d) {
          double s = total - 2.0 * t[d];
          if (s < -tol.tight_abs)
            out.violated.push_back(
                {InequalityViolation::Kind::CycleLow, px[d], py[d], i, j, s});
          if (s > 2 * pi + tol.tight_abs)
            out.violated.push_back({InequalityViolation::Kind::CycleHigh, px[d],
                                    py[d], i, j, 2 * pi - s});
        }
      }
  }
  out.member = out.violated.empty();
  return out;
}

struct SdpMembership {
  bool member = false;
  double margin = 0.0;
};

/// Membership with a signed margin: the optimal value of
/// max{t : X - tI >= 0, diag(X) = 1, cross block = C}.
inline SdpMembership membership_sdp(const Correlator& c, const Tolerances& tol) {
  auto sol = sdp::solve(completion::build_completion_sdp(c), tol);
  if (sol.status == sdp::SdpStatus::NumericalFailure)
    throw NumericalFailure("membership SDP did not converge");
  double margin = sol.feas_margin.value_or(-1.0);
  return {margin >= -tol.psd_abs, margin};
}

// ---------------------------------------------------------------------------
// Extremality (unique completion + Hadamard rank, with the
// strict-complementarity fallback)
// ---------------------------------------------------------------------------

enum class ExtremalityStatus { Extreme, NotExtreme, Inconclusive };
enum class ExtremalityReason {
  UniqueCompletionRankOk,
  RankConditionFailed,
  NonUniqueStrictComp,
  DegenerateNoStrictComp
};

inline const char* to_string(ExtremalityStatus s) {
  switch (s) {
    case ExtremalityStatus::Extreme: return "Extreme";
    case ExtremalityStatus::NotExtreme: return "NotExtreme";
    default: return "Inconclusive";
  }
}
inline const char* to_string(ExtremalityReason r) {
  switch (r) {
    case ExtremalityReason::UniqueCompletionRankOk: return "UniqueCompletionRankOk";
    case ExtremalityReason::RankConditionFailed: return "RankConditionFailed";
    case ExtremalityReason::NonUniqueStrictComp: return "NonUniqueStrictComp";
    default: return "DegenerateNoStrictComp";
  }
}

struct ExtremalityVerdict {
  ExtremalityStatus status = ExtremalityStatus::Inconclusive;
  ExtremalityReason reason = ExtremalityReason::DegenerateNoStrictComp;
  completion::CompletionResult evidence;
  bool strict_complementarity = false;
  int nondegeneracy_null_dim = 0;
  int rank_Z = 0;
};

inline ExtremalityVerdict is_extreme(const Correlator& c,
                                     const Tolerances& tol) {
  const int n = c.n(), m = c.m();
  ExtremalityVerdict v;
  v.evidence = completion::find_completion(c, tol);
  if (!v.evidence.member)
    throw NotAMember("is_extreme: correlator is not a member of Cor(n,m)");

  const SymMatrix& Z = *v.evidence.dual_certificate;
  auto nd = sdp::dual_nondegenerate(Z, completion::uniqueness_pattern(n, m), tol);
  v.nondegeneracy_null_dim = nd.null_dim;
  v.rank_Z = Z.max_abs() == 0.0 ? 0 : numerical_rank(Z, tol);
  int rX = v.evidence.rank_completion;
  v.strict_complementarity = rX + v.rank_Z == n + m;

  if (nd.nondegenerate) {
    bool rank_ok = v.evidence.rank_hadamard == rX * (rX + 1) / 2;
    v.status = rank_ok ? ExtremalityStatus::Extreme : ExtremalityStatus::NotExtreme;
    v.reason = rank_ok ? ExtremalityReason::UniqueCompletionRankOk
                       : ExtremalityReason::RankConditionFailed;
  } else if (v.strict_complementarity) {
    v.status = ExtremalityStatus::NotExtreme;
    v.reason = ExtremalityReason::NonUniqueStrictComp;
  } else {
    v.status = ExtremalityStatus::Inconclusive;
    v.reason = ExtremalityReason::DegenerateNoStrictComp;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Analytic extremality for 2x2 (tight-inequality counting)
// ---------------------------------------------------------------------------

struct Analytic2x2Verdict {
  bool extreme = false;
  int tight_cycles = 0;
  int tight_boxes = 0;
  int rank = 0;
};

inline Analytic2x2Verdict is_extreme_analytic_2x2(const Correlator& c,
                                                  const Tolerances& tol) {
  if (c.n() != 2 || c.m() != 2)
    throw WrongShape("is_extreme_analytic_2x2 requires a 2x2 correlator");
  if (!membership_analytic(c, tol).member)
    throw NotAMember("is_extreme_analytic_2x2: not a member");
  Analytic2x2Verdict v;
  v.rank = c.rank(tol);
  if (v.rank == 1) {
    bool pm1 = true;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        pm1 = pm1 && std::abs(std::abs(c(x, y)) - 1.0) <= tol.tight_abs;
    v.extreme = pm1;
    return v;
  }
  completion::AngleMatrix th = completion::angles(c);
  const double pi = std::acos(-1.0);
  const double t[4] = {th(0, 0), th(0, 1), th(1, 0), th(1, 1)};
  double total = t[0] + t[1] + t[2] + t[3];
  for (int d = 0; d < 4; ++d) {
    double s = total - 2.0 * t[d];
    if (std::abs(s) <= tol.tight_abs) ++v.tight_cycles;
    if (std::abs(s - 2 * pi) <= tol.tight_abs) ++v.tight_cycles;
  }
  for (int d = 0; d < 4; ++d) {
    if (std::abs(t[d]) <= tol.tight_abs) ++v.tight_boxes;
    if (std::abs(t[d] - pi) <= tol.tight_abs) ++v.tight_boxes;
  }
  v.extreme = v.rank == 2 && v.tight_cycles == 1 && v.tight_boxes <= 1;
  return v;
}

// ---------------------------------------------------------------------------
// Support function
// ---------------------------------------------------------------------------

struct SupportResult {
  double value = 0.0;
  Correlator argmax;
};

/// max sum_{xy} Lambda_xy c_xy over Cor(n,m), via the lifted SDP with unit
/// diagonal; argmax is the projection of the optimal X.
inline SupportResult support_value(int n, int m,
                                   const std::vector<double>& coeffs,
                                   const Tolerances& tol) {
  if (int(coeffs.size()) != n * m)
    throw WrongShape("support_value: coefficient count != n*m");
  for (double v : coeffs)
    if (!std::isfinite(v)) throw OutOfRange("support_value: non-finite entry");
  const int k = n + m;
  sdp::SdpProblem p;
  p.dim = k;
  p.objective = SymMatrix(k);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y)
      p.objective.set(x, n + y, coeffs[size_t(x) * m + y] / 2.0);
  for (int i = 0; i < k; ++i)
    p.constraints.emplace_back(completion::unit_sym(k, i, i), 1.0);
  // argmax accuracy in degenerate directions scales like sqrt(gap); push the
  // gap target well below the default so the maximizer is pinned
  auto sol = sdp::solve(p, tol, 0.0, 1e-13);
  if (sol.status != sdp::SdpStatus::Optimal)
    throw NumericalFailure("support SDP did not reach optimality");
  SupportResult r{sol.primal_obj, Correlator(n, m)};
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y)
      r.argmax.set(x, y, std::clamp(sol.X(x, n + y), -1.0, 1.0));
  return r;
}

// ---------------------------------------------------------------------------
// Exposedness (dual-certificate sufficient condition)
// ---------------------------------------------------------------------------

enum class ExposednessStatus { Exposed, Unknown };

inline const char* to_string(ExposednessStatus s) {
  return s == ExposednessStatus::Exposed ? "Exposed" : "Unknown";
}

struct Hyperplane {
  int n = 0, m = 0;
  std::vector<double> coeffs;  // Lambda, row-major n x m
  double offset = 0.0;

  /// Scale-free form: divide by max |coefficient|, sign fixed so the first
  /// nonzero coefficient is positive.
  Hyperplane normalized() const {
    Hyperplane h = *this;
    double mx = 0.0;
    for (double v : h.coeffs) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) return h;
    double sgn = 1.0;
    for (double v : h.coeffs)
      if (std::abs(v) > 1e-14 * mx) {
        sgn = v > 0 ? 1.0 : -1.0;
        break;
      }
    for (double& v : h.coeffs) v /= sgn * mx;
    h.offset /= sgn * mx;
    return h;
  }
};

struct ExposednessVerdict {
  ExposednessStatus status = ExposednessStatus::Unknown;
  std::optional<Hyperplane> hyperplane;
  std::vector<double> lambda_diag;
  std::vector<double> lambda_cross;
  int nondegeneracy_null_dim = 0;
};

/// Sufficient exposedness test at an extreme point: the supporting hyperplane
/// from the completion dual certificate, plus nondegeneracy of the
/// all-off-diagonal system. Throws NotExtremeInput unless is_extreme says
/// Extreme.
inline ExposednessVerdict is_exposed(const Correlator& c, const Tolerances& tol) {
  const int n = c.n(), m = c.m(), k = n + m;
  auto ext = is_extreme(c, tol);
  if (ext.status != ExtremalityStatus::Extreme)
    throw NotExtremeInput("is_exposed requires an extreme point");
  const auto& ev = ext.evidence;
  ExposednessVerdict v;
  v.lambda_diag = ev.lambda_diag;
  v.lambda_cross = ev.lambda_cross;
  Hyperplane h;
  h.n = n;
  h.m = m;
  h.coeffs.resize(size_t(n) * m);
  for (size_t i = 0; i < h.coeffs.size(); ++i) h.coeffs[i] = -ev.lambda_cross[i];
  h.offset = 0.0;
  for (double l : ev.lambda_diag) h.offset += l;
  v.hyperplane = h;
  auto nd = sdp::dual_nondegenerate(*ev.dual_certificate,
                                    completion::exposedness_pattern(k), tol);
  v.nondegeneracy_null_dim = nd.null_dim;
  v.status = nd.nondegenerate ? ExposednessStatus::Exposed
                              : ExposednessStatus::Unknown;
  return v;
}

// ---------------------------------------------------------------------------
// Locality (cut-polytope membership)
// ---------------------------------------------------------------------------

struct LocalityVerdict {
  bool local = false;
  double phase1_objective = 0.0;
  // weights over deterministic strategies, index encodes the sign patterns
  std::vector<std::pair<std::uint32_t, double>> weights;
};

/// Decode a strategy index into (x, y) sign vectors; x[0] is fixed to +1
/// (global sign symmetry).
inline void decode_strategy(std::uint32_t idx, int n, int m,
                            std::vector<int>& x, std::vector<int>& y) {
  x.assign(n, +1);
  y.assign(m, +1);
  for (int i = 1; i < n; ++i)
    if (idx & (1u << (i - 1))) x[i] = -1;
  for (int j = 0; j < m; ++j)
    if (idx & (1u << (n - 1 + j))) y[j] = -1;
}

/// Membership in the cut polytope: feasibility of C = sum mu_k D_k with
/// mu >= 0, sum mu = 1, via a phase-1 LP over all 2^(n+m-1) deterministic
/// correlators (mod global sign).
inline LocalityVerdict is_local(const Correlator& c, const Tolerances& tol) {
  const int n = c.n(), m = c.m();
  if (n + m > 20) throw TooLarge("is_local enumeration bound is n+m <= 20");
  const long NS = 1L << (n + m - 1);
  const int r = n * m + 1;
  const long N = NS + 2L * r;

  std::vector<double> rhs(r);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y) rhs[size_t(x) * m + y] = c(x, y);
  rhs[r - 1] = 1.0;

  std::vector<int> xs, ys;
  auto column = [&](long j, std::vector<double>& col) {
    col.assign(r, 0.0);
    if (j < NS) {
      decode_strategy(std::uint32_t(j), n, m, xs, ys);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < m; ++y)
          col[size_t(x) * m + y] = double(xs[x] * ys[y]);
      col[r - 1] = 1.0;
    } else {
      long a = j - NS;
      col[a % r] = a < r ? 1.0 : -1.0;
    }
  };
  std::vector<double> cost(N, 0.0);
  for (long j = NS; j < N; ++j) cost[j] = 1.0;

  auto lp = sdp::lp_solve(r, N, column, cost, rhs);
  if (!lp.optimal) throw NumericalFailure("locality LP did not converge");

  LocalityVerdict v;
  v.phase1_objective = lp.objective;
  v.local = lp.objective <= tol.psd_abs * (1.0 + std::abs(rhs[r - 1]));
  if (v.local) {
    double total = 0.0;
    for (long j = 0; j < NS; ++j)
      if (lp.x[j] > 1e-9) total += lp.x[j];
    for (long j = 0; j < NS; ++j)
      if (lp.x[j] > 1e-9)
        v.weights.emplace_back(std::uint32_t(j), lp.x[j] / total);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Self-test classification
// ---------------------------------------------------------------------------

/// Rank-2 extreme points of Cor(2,2) are exactly the correlators that
/// self-test the singlet.
inline bool self_tests_singlet_2x2(const Correlator& c, const Tolerances& tol) {
  if (c.n() != 2 || c.m() != 2)
    throw WrongShape("self_tests_singlet_2x2 requires a 2x2 correlator");
  if (c.rank(tol) != 2) return false;
  return is_extreme(c, tol).status == ExtremalityStatus::Extreme;
}

}  // namespace corrlab::geometry
