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

#include <optional>

#include "corrlab/sdp.hpp"

namespace corrlab::completion {

// ---------------------------------------------------------------------------
// Correlator and angle types
// ---------------------------------------------------------------------------

/// Candidate n x m correlation matrix, entries c_xy in [-1, 1].
class Correlator {
 public:
  Correlator(int n, int m) : n_(n), m_(m), c_(size_t(n) * m, 0.0) {
    if (n < 1 || m < 1) throw WrongShape("correlator needs n, m >= 1");
  }
  Correlator(int n, int m, std::vector<double> entries)
      : n_(n), m_(m), c_(std::move(entries)) {
    if (n < 1 || m < 1) throw WrongShape("correlator needs n, m >= 1");
    if (c_.size() != size_t(n) * m)
      throw WrongShape("correlator entry count != n*m");
    for (double v : c_)
      if (std::abs(v) > 1.0 + 1e-12)
        throw OutOfRange("correlator entry outside [-1, 1]");
  }

  int n() const { return n_; }
  int m() const { return m_; }
  double operator()(int x, int y) const { return c_[size_t(x) * m_ + y]; }
  void set(int x, int y, double v) { c_[size_t(x) * m_ + y] = v; }
  const std::vector<double>& raw() const { return c_; }

  Correlator transposed() const {
    Correlator t(m_, n_);
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < m_; ++y) t.set(y, x, (*this)(x, y));
    return t;
  }

  /// Sign-flip of one row (party A input) or one column (party B input); the
  /// switching symmetry of the cut polytope and of Cor(n,m).
  Correlator switched_row(int x) const {
    Correlator t(*this);
    for (int y = 0; y < m_; ++y) t.set(x, y, -(*this)(x, y));
    return t;
  }
  Correlator switched_col(int y) const {
    Correlator t(*this);
    for (int x = 0; x < n_; ++x) t.set(x, y, -(*this)(x, y));
    return t;
  }

  int rank(const Tolerances& tol) const {
    return numerical_rank_rect(n_, m_, c_, tol);
  }

 private:
  int n_, m_;
  std::vector<double> c_;
};

struct AngleMatrix {
  int n = 0, m = 0;
  std::vector<double> theta;  // row-major, radians in [0, pi]
  double operator()(int x, int y) const { return theta[size_t(x) * m + y]; }
};

/// theta_xy = arccos(c_xy), with clamping that absorbs roundoff up to 1e-10
/// past the ends of [-1, 1].
inline AngleMatrix angles(const Correlator& c) {
  AngleMatrix a{c.n(), c.m(), {}};
  a.theta.resize(size_t(c.n()) * c.m());
  for (int x = 0; x < c.n(); ++x)
    for (int y = 0; y < c.m(); ++y) {
      double v = c(x, y);
      if (std::abs(v) > 1.0 + 1e-10)
        throw OutOfRange("correlator entry too far outside [-1, 1]");
      v = std::clamp(v, -1.0, 1.0);
      a.theta[size_t(x) * c.m() + y] = std::acos(v);
    }
  return a;
}

// ---------------------------------------------------------------------------
// Completion SDP
// ---------------------------------------------------------------------------

/// Unit basis matrix E_ij = (e_i e_j' + e_j e_i')/2 (E_ii = e_i e_i').
inline SymMatrix unit_sym(int dim, int i, int j) {
  SymMatrix E(dim);
  E.set(i, j, i == j ? 1.0 : 0.5);
  return E;
}

/// Canonical completion SDP: <E_ii,X> = 1 (i in [n+m]) then
/// <E_{x,n+y},X> = c_xy, zero objective.
inline sdp::SdpProblem build_completion_sdp(const Correlator& c) {
  const int n = c.n(), m = c.m(), k = n + m;
  sdp::SdpProblem p;
  p.dim = k;
  p.objective = SymMatrix(k);
  for (int i = 0; i < k; ++i)
    p.constraints.emplace_back(unit_sym(k, i, i), 1.0);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y)
      p.constraints.emplace_back(unit_sym(k, x, n + y), c(x, y));
  return p;
}

/// Off-diagonal positions inside the two diagonal blocks of the (n,m)
/// partition: the free pattern of the uniqueness (dual nondegeneracy) system.
inline std::vector<std::pair<int, int>> uniqueness_pattern(int n, int m) {
  std::vector<std::pair<int, int>> pos;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pos.emplace_back(i, j);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pos.emplace_back(n + i, n + j);
  return pos;
}

/// All off-diagonal positions: the free pattern of the exposedness system.
inline std::vector<std::pair<int, int>> exposedness_pattern(int k) {
  std::vector<std::pair<int, int>> pos;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) pos.emplace_back(i, j);
  return pos;
}

struct CompletionResult {
  bool member = false;
  double margin = 0.0;  // signed feasibility margin (max-lambda_min form)
  std::optional<SymMatrix> completion;  // \hat{C}, order n+m
  bool unique = false;                  // meaningful only when member
  std::optional<SymMatrix> dual_certificate;  // Z* (maximally complementary)
  std::vector<double> lambda_diag;            // lambda_i, i in [n+m]
  std::vector<double> lambda_cross;           // lambda_xy, row-major n x m
  int rank_C = 0, rank_completion = 0, rank_hadamard = 0;
  sdp::SdpStatus solver_status = sdp::SdpStatus::NumericalFailure;
};

namespace detail {

/// Feasible interval of a single unspecified coordinate (i,j) of X with all
/// other entries held fixed; exact up to eigenvalue bisection.
inline std::pair<double, double> coordinate_interval(SymMatrix X, int i, int j,
                                                     double band) {
  const double v0 = X(i, j);
  auto lam_min = [&](double v) {
    X.set(i, j, v);
    return min_eigenvalue(X);
  };
  if (lam_min(v0) < -band) return {v0, v0};
  auto march = [&](double dir) {
    double step = 0.25, v = v0;
    while (step > 1e-15) {
      double cand = v + dir * step;
      if (std::abs(cand) <= 2.0 && lam_min(cand) >= -band)
        v = cand;
      else
        step *= 0.5;
    }
    return v;
  };
  return {march(-1.0), march(+1.0)};
}

}  // namespace detail

/// Chordal-graph interval for the unspecified Bob-Bob angle theta_34 of a 2x2
/// correlator (rows 1,2 = party A; columns 3,4 = party B). Returns nullopt
/// when empty (lo > hi + tight_abs), i.e. no PSD completion exists.
inline std::optional<std::pair<double, double>> completion_interval_2x2(
    const Correlator& c, const Tolerances& tol) {
  if (c.n() != 2 || c.m() != 2)
    throw WrongShape("completion_interval_2x2 requires a 2x2 correlator");
  AngleMatrix th = angles(c);
  const double pi = std::acos(-1.0);
  double lo = std::max(std::abs(th(0, 0) - th(0, 1)), std::abs(th(1, 0) - th(1, 1)));
  double hi = std::min(std::min(th(0, 0) + th(0, 1), th(1, 0) + th(1, 1)),
                       std::min(2 * pi - (th(0, 0) + th(0, 1)),
                                2 * pi - (th(1, 0) + th(1, 1))));
  if (lo > hi + tol.tight_abs) return std::nullopt;
  return std::make_pair(lo, hi);
}

/// Same interval for the Alice-Alice angle theta_12 (transposed roles).
inline std::optional<std::pair<double, double>> completion_interval_2x2_row(
    const Correlator& c, const Tolerances& tol) {
  return completion_interval_2x2(c.transposed(), tol);
}

/// E(K_3) in angle coordinates: PSD iff the four triangle bounds hold, with
/// singularity exactly at equality.
struct Psd3Report {
  bool psd = false;
  bool singular = false;
};

inline Psd3Report psd3_angles(double t1, double t2, double t3,
                              const Tolerances& tol) {
  const double pi = std::acos(-1.0);
  for (double t : {t1, t2, t3})
    if (t < -tol.tight_abs || t > pi + tol.tight_abs)
      throw OutOfRange("psd3_angles: angle outside [0, pi]");
  double s1 = t2 + t3 - t1;
  double s2 = t1 + t3 - t2;
  double s3 = t1 + t2 - t3;
  double s4 = 2 * pi - (t1 + t2 + t3);
  Psd3Report r;
  r.psd = s1 >= -tol.tight_abs && s2 >= -tol.tight_abs && s3 >= -tol.tight_abs &&
          s4 >= -tol.tight_abs;
  r.singular = r.psd && (std::abs(s1) <= tol.tight_abs || std::abs(s2) <= tol.tight_abs ||
                         std::abs(s3) <= tol.tight_abs || std::abs(s4) <= tol.tight_abs);
  return r;
}

/// SDP-free membership oracle for 2x2 via the chordal interval.
inline bool chordal_membership_2x2(const Correlator& c, const Tolerances& tol) {
  if (c.n() != 2 || c.m() != 2)
    throw WrongShape("chordal_membership_2x2 requires a 2x2 correlator");
  return completion_interval_2x2(c, tol).has_value();
}

/// Membership, completion, uniqueness and the dual certificate:
///  1. solve the completion SDP in margin form -> member + signed margin +
///     maximally complementary primal X;
///  2. renormalize diag(X) to 1 exactly, reset the cross block to C, and pin
///     unspecified in-block entries whose feasible intervals collapse
///     (closed-form chordal intervals for 2x2, coordinate bisection otherwise);
///  3. dual certificate: analytic center of {S >= 0 : N S N' vanishes on the
///     in-block off-diagonals, tr S = dim null}, N = nullspace of X, mapped
///     back through its (lambda_i, lambda_xy) multipliers;
///  4. uniqueness = dual nondegeneracy of Z* for the in-block pattern.
inline CompletionResult find_completion(const Correlator& c,
                                        const Tolerances& tol,
                                        double solver_start_scale = 0.0) {
  const int n = c.n(), m = c.m(), k = n + m;
  CompletionResult out;
  out.rank_C = c.rank(tol);

  auto sol = sdp::solve(build_completion_sdp(c), tol, solver_start_scale);
  out.solver_status = sol.status;
  if (sol.status == sdp::SdpStatus::NumericalFailure)
    throw NumericalFailure("completion SDP did not converge");
  out.margin = sol.feas_margin.value_or(-1.0);
  out.member = out.margin >= -tol.psd_abs;
  if (!out.member) return out;

  // normalize: unit diagonal exactly, cross block = input exactly
  SymMatrix X = sol.X;
  {
    std::vector<double> d(k);
    for (int i = 0; i < k; ++i) d[i] = std::sqrt(std::max(X(i, i), 1e-300));
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) X.set(i, j, X(i, j) / (d[i] * d[j]));
    for (int i = 0; i < k; ++i) X.set(i, i, 1.0);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < m; ++y)
        X.set(x, n + y, std::clamp(c(x, y), -1.0, 1.0));
  }

  // pin unspecified entries with collapsed feasible intervals
  if (n == 2 && m == 2) {
    auto col = completion_interval_2x2(c, tol);
    auto row = completion_interval_2x2_row(c, tol);
    if (col && col->second - col->first <= tol.tight_abs)
      X.set(2, 3, std::cos(0.5 * (col->first + col->second)));
    if (row && row->second - row->first <= tol.tight_abs)
      X.set(0, 1, std::cos(0.5 * (row->first + row->second)));
  } else {
    auto pos = uniqueness_pattern(n, m);
    const double band = 1e-11 * std::max(1.0, X.max_abs());
    for (int pass = 0; pass < 5; ++pass) {
      double moved = 0.0;
      for (auto [i, j] : pos) {
        auto [lo, hi] = detail::coordinate_interval(X, i, j, band);
        if (hi - lo < 1e-5) {
          double mid = 0.5 * (lo + hi);
          moved = std::max(moved, std::abs(X(i, j) - mid));
          X.set(i, j, mid);
        }
      }
      if (moved < 1e-13) break;
    }
  }

  out.completion = X;
  out.rank_completion = numerical_rank(X, tol);
  out.rank_hadamard = numerical_rank(hadamard(X, X), tol);

  // dual certificate on the nullspace face
  SymMatrix Z(k);
  auto N = nullspace_basis(X, tol);
  const int q = int(N.size());
  if (out.margin <= tol.psd_abs && q > 0) {
    sdp::SdpProblem inner;
    inner.dim = q;
    inner.objective = SymMatrix(q);
    for (auto [a, bidx] : uniqueness_pattern(n, m)) {
      SymMatrix P(q);
      for (int u = 0; u < q; ++u)
        for (int v = u; v < q; ++v)
          P.set(u, v, 0.5 * (N[u][a] * N[v][bidx] + N[v][a] * N[u][bidx]));
      inner.constraints.emplace_back(P, 0.0);
    }
    inner.constraints.emplace_back(SymMatrix::identity(q), double(q));
    auto si = sdp::solve(inner, tol);
    if (si.status == sdp::SdpStatus::Optimal &&
        si.feas_margin.value_or(-1.0) >= -1e-9) {
      // Zr = N S N' ; re-express exactly through the dual multipliers
      SymMatrix S = si.X;
      for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
          bool keep = (i == j) || (i < n && j >= n);
          if (!keep) continue;
          double v = 0.0;
          for (int u = 0; u < q; ++u)
            for (int w = 0; w < q; ++w) v += N[u][i] * S(u, w) * N[w][j];
          Z.set(i, j, v);
        }
    }
  }
  out.dual_certificate = Z;
  out.lambda_diag.resize(k);
  for (int i = 0; i < k; ++i) out.lambda_diag[i] = Z(i, i);
  out.lambda_cross.resize(size_t(n) * m);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y)
      out.lambda_cross[size_t(x) * m + y] = 2.0 * Z(x, n + y);

  out.unique =
      sdp::dual_nondegenerate(Z, uniqueness_pattern(n, m), tol).nondegenerate;
  return out;
}

}  // namespace corrlab::completion
