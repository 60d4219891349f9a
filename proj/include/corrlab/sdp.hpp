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

#include <functional>
#include <optional>
#include <utility>

#include "corrlab/linalg.hpp"

namespace corrlab::sdp {

// ---------------------------------------------------------------------------
// Problem / solution types
// ---------------------------------------------------------------------------

/// Canonical primal form:  sup <C,X>  s.t.  <A_i,X> = b_i,  X >= 0.
/// Dual:                   inf b'y    s.t.  sum_i y_i A_i - C = Z >= 0.
struct SdpProblem {
  int dim = 0;
  SymMatrix objective;                              // C
  std::vector<std::pair<SymMatrix, double>> constraints;  // (A_i, b_i)

  void validate() const {
    if (dim < 1) throw DimensionMismatch("SdpProblem.dim must be >= 1");
    if (constraints.empty())
      throw InvariantViolation("SdpProblem needs at least one constraint");
    if (objective.dim() != dim)
      throw DimensionMismatch("objective order != dim");
    for (const auto& [A, b] : constraints)
      if (A.dim() != dim) throw DimensionMismatch("constraint order != dim");
  }
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, NumericalFailure };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SdpStatus::DualInfeasible: return "DualInfeasible";
    default: return "NumericalFailure";
  }
}

struct IterStat {
  double primal_obj, dual_obj, primal_residual, dual_residual, mu;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  SymMatrix X, Z;
  std::vector<double> y;
  double primal_obj = 0, dual_obj = 0, gap = 0;
  double primal_residual = 0, dual_residual = 0;
  int iterations = 0;
  /// Optimal value of max{t : X - tI >= 0, <A_i,X> = b_i}; set for
  /// feasibility-form problems (zero objective). Negative iff infeasible.
  std::optional<double> feas_margin;
  std::vector<IterStat> trace;
};

// ---------------------------------------------------------------------------
// Solve audit (opt-in, thread-local; used by the acceptance suite)
// ---------------------------------------------------------------------------

struct AuditEntry {
  SdpStatus status;
  double gap, primal_residual, dual_residual, primal_obj;
};

class SolveAudit {
 public:
  static void begin() { store().clear(); enabled() = true; }
  static std::vector<AuditEntry> end() {
    enabled() = false;
    auto out = store();
    store().clear();
    return out;
  }
  static void record(const SdpSolution& s) {
    if (enabled())
      store().push_back({s.status, s.gap, s.primal_residual, s.dual_residual,
                         s.primal_obj});
  }

 private:
  static bool& enabled() {
    thread_local bool e = false;
    return e;
  }
  static std::vector<AuditEntry>& store() {
    thread_local std::vector<AuditEntry> v;
    return v;
  }
};

// ---------------------------------------------------------------------------
// Internal: NT-scaled predictor-corrector path following
// ---------------------------------------------------------------------------

namespace detail {

using corrlab::detail::Vec;
using corrlab::detail::mat_mul;
using corrlab::detail::symmetrize;
using corrlab::detail::to_sym;

// eigendecomposition of a symmetric raw matrix
inline void eig_raw(const Vec& A, int n, std::vector<double>& vals, Vec& vecs) {
  SymMatrix S = to_sym(A, n);
  auto e = eig_sym(S);
  vals = e.values;
  vecs.assign(size_t(n) * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) vecs[size_t(i) * n + j] = e.vectors[j][i];
}

// Q f(diag) Q' for eigen pair
inline Vec eig_apply(const std::vector<double>& vals, const Vec& Q, int n,
                     const std::function<double(double)>& f) {
  Vec R(size_t(n) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    double fk = f(vals[k]);
    if (fk == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      double qik = Q[size_t(i) * n + k] * fk;
      if (qik == 0.0) continue;
      for (int j = 0; j < n; ++j) R[size_t(i) * n + j] += qik * Q[size_t(j) * n + k];
    }
  }
  return R;
}

struct ScaledPair {
  Vec half, inv_half;  // M^(1/2), M^(-1/2) with relative eigenvalue floor
};

inline ScaledPair psd_sqrt_pair(const Vec& A, int n) {
  std::vector<double> vals;
  Vec Q;
  eig_raw(A, n, vals, Q);
  double mx = 1e-300;
  for (double v : vals) mx = std::max(mx, v);
  double floor = mx * 1e-15;
  ScaledPair p;
  p.half = eig_apply(vals, Q, n,
                     [&](double v) { return std::sqrt(std::max(v, floor)); });
  p.inv_half = eig_apply(vals, Q, n, [&](double v) {
    return 1.0 / std::sqrt(std::max(v, floor));
  });
  return p;
}

inline Vec inv_psd(const Vec& A, int n) {
  std::vector<double> vals;
  Vec Q;
  eig_raw(A, n, vals, Q);
  double mx = 1e-300;
  for (double v : vals) mx = std::max(mx, v);
  double floor = mx * 1e-16;
  return eig_apply(vals, Q, n,
                   [&](double v) { return 1.0 / std::max(v, floor); });
}

// NT scaling point W: W Z W = X
inline Vec nt_scaling(const Vec& X, const Vec& Z, int n) {
  ScaledPair xs = psd_sqrt_pair(X, n);
  Vec T = symmetrize(mat_mul(mat_mul(xs.half, Z, n), xs.half, n), n);
  std::vector<double> tv;
  Vec TQ;
  eig_raw(T, n, tv, TQ);
  double mx = 1e-300;
  for (double v : tv) mx = std::max(mx, v);
  double floor = mx * 1e-15;
  Vec Tm = eig_apply(tv, TQ, n, [&](double v) {
    return 1.0 / std::sqrt(std::max(v, floor));
  });
  return symmetrize(mat_mul(mat_mul(xs.half, Tm, n), xs.half, n), n);
}

// largest step fraction: max alpha in (0,1] with M + alpha*dM >= 0, times frac
inline double max_step(const Vec& M, const Vec& dM, int n, double frac) {
  double nd = 0.0;
  for (double v : dM) nd = std::max(nd, std::abs(v));
  if (nd == 0.0) return 1.0;
  if (!std::isfinite(nd)) return 0.0;
  ScaledPair p = psd_sqrt_pair(M, n);
  Vec S = symmetrize(mat_mul(mat_mul(p.inv_half, dM, n), p.inv_half, n), n);
  auto vals = eig_sym_values(to_sym(S, n));
  double lmin = vals.back();
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, frac * (-1.0 / lmin));
}

// least-squares solve of a symmetric PSD system via eigen pseudo-inverse,
// with one residual-refinement pass
class PinvSolver {
 public:
  PinvSolver(const std::vector<double>& M, int n) : n_(n) {
    SymMatrix S(std::max(n, 1));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) S.set(i, j, M[size_t(i) * n + j]);
    eig_ = eig_sym(S);
    mx_ = 1e-300;
    for (double v : eig_.values) mx_ = std::max(mx_, std::abs(v));
    M_ = M;
  }

  std::vector<double> apply(const std::vector<double>& h) const {
    std::vector<double> out(n_, 0.0);
    accumulate(h, out);
    // one refinement pass against the stored matrix
    std::vector<double> r(n_);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += M_[size_t(i) * n_ + j] * out[j];
      r[i] = h[i] - s;
    }
    accumulate(r, out);
    return out;
  }

 private:
  void accumulate(const std::vector<double>& h, std::vector<double>& out) const {
    for (int k = 0; k < n_; ++k) {
      if (eig_.values[k] <= 1e-14 * mx_) continue;
      double c = 0.0;
      for (int i = 0; i < n_; ++i) c += eig_.vectors[k][i] * h[i];
      c /= eig_.values[k];
      for (int i = 0; i < n_; ++i) out[i] += c * eig_.vectors[k][i];
    }
  }

  int n_;
  double mx_;
  EigResult eig_;
  std::vector<double> M_;
};

inline std::vector<double> pinv_solve(const std::vector<double>& M, int n,
                                      const std::vector<double>& h) {
  return PinvSolver(M, n).apply(h);
}

struct PlainResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  Vec X, Z;
  std::vector<double> y;
  int iterations = 0;
  std::vector<IterStat> trace;
};

inline PlainResult solve_plain(const Vec& C, const std::vector<Vec>& As,
                               const std::vector<double>& b, int n,
                               const Tolerances& tol, int max_iter = 200,
                               double frac = 0.98, double start_scale = 0.0,
                               double gap_target = 0.0,
                               double accept_relgap = 0.0) {
  const int ell = int(As.size());
  double bmax = 0.0, cmax = 0.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  for (double v : C) cmax = std::max(cmax, std::abs(v));
  const double scale_p = 1.0 + bmax;
  const double scale_d = 1.0 + cmax;
  const double bignum = 1e9 * scale_p;
  const double res_tol = 1e-10;
  const double gap_tol =
      gap_target > 0.0 ? gap_target : std::min(1e-10, tol.sdp_gap);

  Vec X(size_t(n) * n, 0.0), Z(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    X[size_t(i) * n + i] = start_scale > 0.0 ? start_scale : scale_p;
    Z[size_t(i) * n + i] = scale_d;
  }
  std::vector<double> y(ell, 0.0);

  auto Aop = [&](const Vec& M) {
    std::vector<double> r(ell);
    for (int i = 0; i < ell; ++i) {
      double s = 0.0;
      const Vec& A = As[i];
      for (size_t k = 0; k < A.size(); ++k) s += A[k] * M[k];
      r[i] = s;
    }
    return r;
  };
  auto Aadj = [&](const std::vector<double>& v) {
    Vec R(size_t(n) * n, 0.0);
    for (int i = 0; i < ell; ++i) {
      if (v[i] == 0.0) continue;
      const Vec& A = As[i];
      for (size_t k = 0; k < A.size(); ++k) R[k] += v[i] * A[k];
    }
    return R;
  };
  auto inner = [&](const Vec& A, const Vec& B) {
    double s = 0.0;
    for (size_t k = 0; k < A.size(); ++k) s += A[k] * B[k];
    return s;
  };
  auto maxabs = [](const Vec& A) {
    double s = 0.0;
    for (double v : A) s = std::max(s, std::abs(v));
    return s;
  };

  // constraint Gram, fixed across iterations: restores exact primal
  // feasibility once the iterate is close (min-norm correction)
  std::vector<double> gram(size_t(ell) * ell, 0.0);
  for (int i = 0; i < ell; ++i)
    for (int j = i; j < ell; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < As[i].size(); ++k) s += As[i][k] * As[j][k];
      gram[size_t(i) * ell + j] = gram[size_t(j) * ell + i] = s;
    }
  PinvSolver gram_pinv(gram, ell);
  auto restore_feasibility = [&](Vec& Xc) {
    auto AX = Aop(Xc);
    std::vector<double> rp(ell);
    double pres = 0.0;
    for (int i = 0; i < ell; ++i) {
      rp[i] = b[i] - AX[i];
      pres = std::max(pres, std::abs(rp[i]));
    }
    if (pres > 1e-6 * scale_p || pres <= 1e-10 * scale_p) return;
    auto w = gram_pinv.apply(rp);
    Vec Xn = Xc;
    for (int i = 0; i < ell; ++i) {
      if (w[i] == 0.0) continue;
      for (size_t k = 0; k < As[i].size(); ++k) Xn[k] += w[i] * As[i][k];
    }
    // keep the iterate inside the cone: the correction must not cross it
    auto vals = eig_sym_values(to_sym(Xn, n));
    if (vals.back() > 0.0) Xc = std::move(Xn);
  };

  PlainResult best;
  double best_score = 1e300;
  PlainResult out;
  out.status = SdpStatus::NumericalFailure;

  int it = 0;
  for (; it < max_iter; ++it) {
    auto AX = Aop(X);
    std::vector<double> rp(ell);
    for (int i = 0; i < ell; ++i) rp[i] = b[i] - AX[i];
    Vec Rd = Aadj(y);
    for (size_t k = 0; k < Rd.size(); ++k) Rd[k] = C[k] + Z[k] - Rd[k];
    double pobj = inner(C, X);
    double dobj = 0.0;
    for (int i = 0; i < ell; ++i) dobj += b[i] * y[i];
    double gap = std::abs(inner(X, Z));
    double mu = inner(X, Z) / n;
    double pres = 0.0;
    for (double v : rp) pres = std::max(pres, std::abs(v));
    double dres = maxabs(Rd);
    double relgap = gap / (1.0 + std::abs(pobj));
    out.trace.push_back({pobj, dobj, pres, dres, mu});

    double score = std::max({pres / scale_p, dres / scale_d, relgap});
    if (score < best_score) {
      best_score = score;
      best.X = X;
      best.Z = Z;
      best.y = y;
    }
    if (pres < res_tol * scale_p && dres < res_tol * scale_d &&
        relgap < gap_tol) {
      out.status = SdpStatus::Optimal;
      break;
    }
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    if (dobj < -bignum && dres < 1e-7 * (1.0 + ymax)) {
      out.status = SdpStatus::PrimalInfeasible;
      break;
    }
    if (pobj > bignum && pres < 1e-7 * (1.0 + maxabs(X))) {
      out.status = SdpStatus::DualInfeasible;
      break;
    }

    Vec W = nt_scaling(X, Z, n);
    Vec Zi = inv_psd(Z, n);
    std::vector<Vec> G(ell);
    for (int i = 0; i < ell; ++i)
      G[i] = symmetrize(mat_mul(mat_mul(W, As[i], n), W, n), n);
    std::vector<double> M(size_t(ell) * ell, 0.0);
    for (int i = 0; i < ell; ++i)
      for (int j = i; j < ell; ++j) {
        double v = inner(As[i], G[j]);
        M[size_t(i) * ell + j] = v;
        M[size_t(j) * ell + i] = v;
      }
    auto AZi = Aop(Zi);
    Vec WRdW = symmetrize(mat_mul(mat_mul(W, Rd, n), W, n), n);
    auto AWRdW = Aop(WRdW);

    auto newton = [&](double sigma_mu, Vec& dX, std::vector<double>& dy,
                      Vec& dZ) {
      std::vector<double> h(ell);
      for (int i = 0; i < ell; ++i)
        h[i] = sigma_mu * AZi[i] - AX[i] - rp[i] + AWRdW[i];
      dy = pinv_solve(M, ell, h);
      dZ = Aadj(dy);
      for (size_t k = 0; k < dZ.size(); ++k) dZ[k] -= Rd[k];
      Vec WdZW = symmetrize(mat_mul(mat_mul(W, dZ, n), W, n), n);
      dX.assign(size_t(n) * n, 0.0);
      for (size_t k = 0; k < dX.size(); ++k)
        dX[k] = sigma_mu * Zi[k] - X[k] - WdZW[k];
    };

    Vec dXa, dZa;
    std::vector<double> dya;
    newton(0.0, dXa, dya, dZa);
    double apa = max_step(X, dXa, n, frac);
    double ada = max_step(Z, dZa, n, frac);
    Vec Xa = X, Za = Z;
    for (size_t k = 0; k < Xa.size(); ++k) {
      Xa[k] += apa * dXa[k];
      Za[k] += ada * dZa[k];
    }
    double mu_aff = inner(Xa, Za) / n;
    double ratio = mu_aff / std::max(mu, 1e-300);
    double sigma = std::min(1.0, std::max(ratio * ratio * ratio, 1e-12));

    Vec dX, dZ;
    std::vector<double> dy;
    newton(sigma * mu, dX, dy, dZ);
    bool ok = false;
    Vec Xn, Zn;
    std::vector<double> yn;
    for (int bt = 0; bt < 8; ++bt) {
      double ap = max_step(X, dX, n, frac);
      double ad = max_step(Z, dZ, n, frac);
      Xn = X;
      Zn = Z;
      yn = y;
      for (size_t k = 0; k < Xn.size(); ++k) {
        Xn[k] += ap * dX[k];
        Zn[k] += ad * dZ[k];
      }
      for (int i = 0; i < ell; ++i) yn[i] += ad * dy[i];
      double mun = inner(Xn, Zn) / n;
      if (std::isfinite(mun) && mun > 0.0 && mun <= 10.0 * mu + 1e-300) {
        ok = true;
        break;
      }
      for (auto& v : dX) v *= 0.3;
      for (auto& v : dZ) v *= 0.3;
      for (auto& v : dy) v *= 0.3;
    }
    if (!ok) break;  // stalled
    X = std::move(Xn);
    Z = std::move(Zn);
    y = std::move(yn);
    restore_feasibility(X);
  }
  out.iterations = it;

  if (out.status != SdpStatus::Optimal &&
      out.status != SdpStatus::PrimalInfeasible &&
      out.status != SdpStatus::DualInfeasible) {
    // classify divergence before falling back to the best iterate
    double pobj_last = inner(C, X);
    double dobj_last = 0.0;
    for (int i = 0; i < ell; ++i) dobj_last += b[i] * y[i];
    auto AXl = Aop(X);
    double pres_last = 0.0;
    for (int i = 0; i < ell; ++i)
      pres_last = std::max(pres_last, std::abs(b[i] - AXl[i]));
    Vec Rdl = Aadj(y);
    for (size_t k = 0; k < Rdl.size(); ++k) Rdl[k] = C[k] + Z[k] - Rdl[k];
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    if (pobj_last > 1e6 * scale_p && pres_last < 1e-6 * scale_p) {
      out.status = SdpStatus::DualInfeasible;
      out.X = X;
      out.Z = Z;
      out.y = y;
      return out;
    }
    if (dobj_last < -1e6 * scale_p && maxabs(Rdl) < 1e-6 * (1.0 + ymax)) {
      out.status = SdpStatus::PrimalInfeasible;
      out.X = X;
      out.Z = Z;
      out.y = y;
      return out;
    }
    // fall back to the best iterate; accept if it meets the contract
    X = best.X;
    Z = best.Z;
    y = best.y;
    auto AX = Aop(X);
    double pres = 0.0;
    for (int i = 0; i < ell; ++i) pres = std::max(pres, std::abs(b[i] - AX[i]));
    Vec Rd = Aadj(y);
    for (size_t k = 0; k < Rd.size(); ++k) Rd[k] = C[k] + Z[k] - Rd[k];
    double relgap =
        std::abs(inner(X, Z)) / (1.0 + std::abs(inner(C, X)));
    double accept = accept_relgap > 0.0 ? accept_relgap : tol.sdp_gap;
    if (pres <= 1e-9 * scale_p && maxabs(Rd) <= 1e-9 * scale_d &&
        relgap <= accept)
      out.status = SdpStatus::Optimal;
  }
  out.X = X;
  out.Z = Z;
  out.y = y;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public solve
// ---------------------------------------------------------------------------

/// Interior-point solve of the canonical pair (P)/(D). Deterministic: fixed
/// iteration order, no randomization. Feasibility problems (zero objective)
/// are solved in margin form (max t with X >= tI) so that the returned pair
/// is maximally complementary and feas_margin carries the signed membership
/// margin; the trivial Z = 0 is returned only when the dual optimal set is
/// actually {0} (margin > psd_abs).
inline SdpSolution solve(const SdpProblem& p, const Tolerances& tol,
                         double start_scale = 0.0, double gap_target = 0.0) {
  p.validate();
  tol.validate();
  const int n = p.dim;
  const int ell = int(p.constraints.size());

  std::vector<corrlab::detail::Vec> As(ell);
  std::vector<double> b(ell);
  for (int i = 0; i < ell; ++i) {
    As[i] = p.constraints[i].first.raw();
    b[i] = p.constraints[i].second;
  }
  corrlab::detail::Vec C = p.objective.raw();

  bool feasibility = p.objective.max_abs() == 0.0;
  int pivot = -1;
  if (feasibility) {
    double bestt = 0.0;
    for (int i = 0; i < ell; ++i) {
      double tr = p.constraints[i].first.trace();
      if (std::abs(tr) > bestt + 1e-300 && std::abs(tr) > 1e-12) {
        bestt = std::abs(tr);
        pivot = i;
      }
    }
  }

  SdpSolution sol;
  if (feasibility && pivot >= 0) {
    // eliminate t = (b_p - <A_p, Y>)/tr(A_p); X = Y + t I
    double tp = p.constraints[pivot].first.trace();
    std::vector<corrlab::detail::Vec> As2;
    std::vector<double> b2;
    std::vector<int> orig;
    for (int i = 0; i < ell; ++i) {
      if (i == pivot) continue;
      double kappa = p.constraints[i].first.trace() / tp;
      corrlab::detail::Vec A = As[i];
      for (size_t k = 0; k < A.size(); ++k) A[k] -= kappa * As[pivot][k];
      As2.push_back(std::move(A));
      b2.push_back(b[i] - kappa * b[pivot]);
      orig.push_back(i);
    }
    corrlab::detail::Vec C2(size_t(n) * n);
    for (size_t k = 0; k < C2.size(); ++k) C2[k] = -As[pivot][k] / tp;

    auto r = detail::solve_plain(C2, As2, b2, n, tol, 200, 0.98, start_scale,
                                 gap_target, 10.0 * tol.sdp_gap);
    double pobj2 = 0.0;
    for (size_t k = 0; k < C2.size(); ++k) pobj2 += C2[k] * r.X[k];
    double t = pobj2 + b[pivot] / tp;

    corrlab::detail::Vec X = r.X;
    for (int i = 0; i < n; ++i) X[size_t(i) * n + i] += t;
    std::vector<double> y(ell, 0.0);
    double acc = 0.0;
    for (size_t j = 0; j < orig.size(); ++j) {
      y[orig[j]] = r.y[j];
      acc += r.y[j] * p.constraints[orig[j]].first.trace();
    }
    y[pivot] = (1.0 - acc) / tp;

    sol.feas_margin = t;
    sol.iterations = r.iterations;
    sol.trace = std::move(r.trace);
    sol.X = corrlab::detail::to_sym(X, n);

    if (r.status != SdpStatus::Optimal) {
      sol.status = SdpStatus::NumericalFailure;
      sol.Z = corrlab::detail::to_sym(r.Z, n);
      sol.y = y;
    } else if (t < -tol.psd_abs) {
      // infeasible: y is a dual improving ray (A*(y) = Z >= 0, b'y = t < 0)
      sol.status = SdpStatus::PrimalInfeasible;
      sol.Z = corrlab::detail::to_sym(r.Z, n);
      sol.y = y;
    } else if (t > tol.psd_abs) {
      // interior: the only dual optimal solution of the original is Z = 0
      sol.status = SdpStatus::Optimal;
      sol.Z = SymMatrix(n);
      sol.y.assign(ell, 0.0);
    } else {
      // boundary: keep the maximally complementary pair; dual rays are
      // scale-free, so shrink until the reported gap honors the contract
      double gap_now = 0.0;
      for (size_t kk = 0; kk < X.size(); ++kk) gap_now += X[kk] * r.Z[kk];
      gap_now = std::abs(gap_now);
      double s = std::min(1.0, 0.5 * tol.sdp_gap / std::max(gap_now, 1e-300));
      sol.status = SdpStatus::Optimal;
      corrlab::detail::Vec Zs = r.Z;
      for (auto& v : Zs) v *= s;
      for (auto& v : y) v *= s;
      sol.Z = corrlab::detail::to_sym(Zs, n);
      sol.y = y;
    }
  } else {
    auto r = detail::solve_plain(C, As, b, n, tol, 200, 0.98, start_scale,
                                 gap_target);
    sol.status = r.status;
    sol.X = corrlab::detail::to_sym(r.X, n);
    sol.Z = corrlab::detail::to_sym(r.Z, n);
    sol.y = std::move(r.y);
    sol.iterations = r.iterations;
    sol.trace = std::move(r.trace);
  }

  // final certificates
  sol.primal_obj = p.objective.inner(sol.X);
  sol.dual_obj = 0.0;
  for (int i = 0; i < ell; ++i) sol.dual_obj += b[i] * sol.y[i];
  sol.gap = std::abs(sol.X.inner(sol.Z));
  double pres = 0.0;
  for (int i = 0; i < ell; ++i)
    pres = std::max(pres, std::abs(p.constraints[i].first.inner(sol.X) - b[i]));
  sol.primal_residual = pres;
  SymMatrix R(n);
  for (int i = 0; i < ell; ++i)
    if (sol.y[i] != 0.0) R = R.plus(p.constraints[i].first, sol.y[i]);
  R = R.plus(p.objective, -1.0).plus(sol.Z, -1.0);
  sol.dual_residual = R.max_abs();

  SolveAudit::record(sol);
  return sol;
}

// ---------------------------------------------------------------------------
// Duality certificate report
// ---------------------------------------------------------------------------

struct PairReport {
  bool weak_duality_ok = false;
  bool feasible_primal = false;
  bool feasible_dual = false;
  double complementarity_gap = 0.0;
};

inline PairReport check_pair(const SdpProblem& p, const SymMatrix& X,
                             const std::vector<double>& y, const SymMatrix& Z,
                             const Tolerances& tol) {
  p.validate();
  if (X.dim() != p.dim || Z.dim() != p.dim || int(y.size()) != int(p.constraints.size()))
    throw DimensionMismatch("check_pair: dims disagree");
  PairReport rep;
  double pres = 0.0;
  for (const auto& [A, b] : p.constraints)
    pres = std::max(pres, std::abs(A.inner(X) - b));
  double xmin = min_eigenvalue(X);
  rep.feasible_primal =
      pres <= 1e-8 && xmin >= -tol.psd_abs * std::max(1.0, X.max_abs());
  SymMatrix R(p.dim);
  for (size_t i = 0; i < y.size(); ++i)
    if (y[i] != 0.0) R = R.plus(p.constraints[i].first, y[i]);
  R = R.plus(p.objective, -1.0).plus(Z, -1.0);
  double zmin = min_eigenvalue(Z);
  rep.feasible_dual = R.max_abs() <= 1e-8 &&
                      zmin >= -tol.psd_abs * std::max(1.0, Z.max_abs());
  double pobj = p.objective.inner(X);
  double dobj = 0.0;
  for (size_t i = 0; i < y.size(); ++i) dobj += p.constraints[i].second * y[i];
  rep.weak_duality_ok = pobj <= dobj + 10.0 * tol.sdp_gap;
  rep.complementarity_gap = X.inner(Z);
  return rep;
}

// ---------------------------------------------------------------------------
// Dual nondegeneracy
// ---------------------------------------------------------------------------

struct NondegeneracyReport {
  bool nondegenerate = false;
  int null_dim = 0;
};

/// Nullspace dimension of M |-> M Z over symmetric M supported on the given
/// off-diagonal pattern (all other entries, and every diagonal, fixed at 0).
/// Pattern = in-block off-diagonals realizes the uniqueness system; pattern =
/// all off-diagonals realizes the exposedness system.
inline NondegeneracyReport dual_nondegenerate(
    const SymMatrix& Z, const std::vector<std::pair<int, int>>& free_pattern,
    const Tolerances& tol) {
  const int k = Z.dim();
  const int p = int(free_pattern.size());
  if (p == 0) return {true, 0};
  for (auto [i, j] : free_pattern)
    if (i < 0 || j < 0 || i >= k || j >= k || i == j)
      throw OutOfRange("free_pattern entries must be off-diagonal index pairs");

  // columns: vec(B_ij Z), B_ij = e_i e_j' + e_j e_i'
  std::vector<std::vector<double>> cols(p, std::vector<double>(size_t(k) * k, 0.0));
  for (int c = 0; c < p; ++c) {
    auto [i, j] = free_pattern[c];
    for (int t = 0; t < k; ++t) {
      cols[c][size_t(i) * k + t] += Z(j, t);
      cols[c][size_t(j) * k + t] += Z(i, t);
    }
  }
  // singular values via the p x p Gram matrix
  SymMatrix G(p);
  for (int a = 0; a < p; ++a)
    for (int bb = a; bb < p; ++bb) {
      double s = 0.0;
      for (size_t t = 0; t < cols[a].size(); ++t) s += cols[a][t] * cols[bb][t];
      G.set(a, bb, s);
    }
  auto vals = eig_sym_values(G);
  double mx = 0.0;
  for (double v : vals) mx = std::max(mx, std::abs(v));
  if (mx <= 0.0) return {false, p};
  int nd = 0;
  for (double v : vals) {
    double sv = std::sqrt(std::max(v, 0.0));
    if (sv <= tol.null_rel * std::sqrt(mx)) ++nd;
  }
  return {nd == 0, nd};
}

// ---------------------------------------------------------------------------
// Small dense LP (phase-1 style), columns generated on demand
// ---------------------------------------------------------------------------

struct LpSolution {
  bool optimal = false;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

/// min c'x s.t. A x = b, x >= 0, A given by a column oracle (m rows, ncols
/// columns). Must be primal feasible and bounded (phase-1 problems are).
inline LpSolution lp_solve(int m, long ncols,
                           const std::function<void(long, std::vector<double>&)>& column,
                           const std::vector<double>& c,
                           const std::vector<double>& b,
                           int max_iter = 100) {
  const long N = ncols;
  double bscale = 1.0, cscale = 1.0;
  for (double v : b) bscale = std::max(bscale, std::abs(v));
  for (double v : c) cscale = std::max(cscale, std::abs(v));

  std::vector<double> x(N, bscale), s(N, cscale), y(m, 0.0);
  std::vector<double> col(m);

  auto Amul = [&](const std::vector<double>& v) {  // A v
    std::vector<double> r(m, 0.0);
    for (long j = 0; j < N; ++j) {
      if (v[j] == 0.0) continue;
      column(j, col);
      for (int i = 0; i < m; ++i) r[i] += v[j] * col[i];
    }
    return r;
  };
  auto ATmul = [&](const std::vector<double>& w) {  // A' w
    std::vector<double> r(N, 0.0);
    for (long j = 0; j < N; ++j) {
      column(j, col);
      double sum = 0.0;
      for (int i = 0; i < m; ++i) sum += col[i] * w[i];
      r[j] = sum;
    }
    return r;
  };

  LpSolution out;
  int it = 0;
  for (; it < max_iter; ++it) {
    auto Ax = Amul(x);
    std::vector<double> rb(m), rc(N);
    for (int i = 0; i < m; ++i) rb[i] = b[i] - Ax[i];
    auto ATy = ATmul(y);
    for (long j = 0; j < N; ++j) rc[j] = c[j] - ATy[j] - s[j];
    double mu = 0.0;
    for (long j = 0; j < N; ++j) mu += x[j] * s[j];
    mu /= double(N);
    double pobj = 0.0;
    for (long j = 0; j < N; ++j) pobj += c[j] * x[j];
    double pres = 0.0, dres = 0.0;
    for (double v : rb) pres = std::max(pres, std::abs(v));
    for (double v : rc) dres = std::max(dres, std::abs(v));
    if (pres <= 1e-9 * bscale && dres <= 1e-9 * cscale &&
        mu * N <= 1e-10 * (1.0 + std::abs(pobj))) {
      out.optimal = true;
      break;
    }

    // normal equations M = A D A', D = diag(x/s)
    std::vector<double> M(size_t(m) * m, 0.0);
    for (long j = 0; j < N; ++j) {
      column(j, col);
      double d = x[j] / s[j];
      for (int i = 0; i < m; ++i) {
        if (col[i] == 0.0) continue;
        double di = d * col[i];
        for (int k2 = i; k2 < m; ++k2) M[size_t(i) * m + k2] += di * col[k2];
      }
    }
    for (int i = 0; i < m; ++i)
      for (int k2 = 0; k2 < i; ++k2) M[size_t(i) * m + k2] = M[size_t(k2) * m + i];

    auto solve_newton = [&](const std::vector<double>& tau_over_s,
                            std::vector<double>& dx, std::vector<double>& dy,
                            std::vector<double>& ds) {
      // M dy = b + A(D rc) - A(tau/s)
      std::vector<double> w(N);
      for (long j = 0; j < N; ++j)
        w[j] = (x[j] / s[j]) * rc[j] - tau_over_s[j];
      auto Aw = Amul(w);
      std::vector<double> rhs(m);
      for (int i = 0; i < m; ++i) rhs[i] = b[i] + Aw[i];
      dy = detail::pinv_solve(M, m, rhs);
      auto ATdy = ATmul(dy);
      ds.resize(N);
      dx.resize(N);
      for (long j = 0; j < N; ++j) {
        ds[j] = rc[j] - ATdy[j];
        dx[j] = tau_over_s[j] - x[j] - (x[j] / s[j]) * ds[j];
      }
    };
    auto step_len = [&](const std::vector<double>& v,
                        const std::vector<double>& dv) {
      double a = 1.0;
      for (long j = 0; j < N; ++j)
        if (dv[j] < 0.0) a = std::min(a, -0.98 * v[j] / dv[j]);
      return a;
    };

    std::vector<double> zero_tau(N, 0.0), dxa, dya, dsa;
    solve_newton(zero_tau, dxa, dya, dsa);
    double apa = step_len(x, dxa), ada = step_len(s, dsa);
    double mu_aff = 0.0;
    for (long j = 0; j < N; ++j)
      mu_aff += (x[j] + apa * dxa[j]) * (s[j] + ada * dsa[j]);
    mu_aff /= double(N);
    double ratio = mu_aff / std::max(mu, 1e-300);
    double sigma = std::min(1.0, std::max(ratio * ratio * ratio, 1e-12));

    std::vector<double> tau(N), dx, dy, ds;
    for (long j = 0; j < N; ++j)
      tau[j] = (sigma * mu - dxa[j] * dsa[j]) / s[j];
    solve_newton(tau, dx, dy, ds);
    double ap = step_len(x, dx), ad = step_len(s, ds);
    for (long j = 0; j < N; ++j) {
      x[j] += ap * dx[j];
      s[j] += ad * ds[j];
    }
    for (int i = 0; i < m; ++i) y[i] += ad * dy[i];
  }
  out.iterations = it;
  out.x = std::move(x);
  double pobj = 0.0;
  for (long j = 0; j < N; ++j) pobj += c[j] * out.x[j];
  out.objective = pobj;
  return out;
}

}  // namespace corrlab::sdp
