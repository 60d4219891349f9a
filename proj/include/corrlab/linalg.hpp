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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrlab {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class IndefiniteMatrix : public Error {
 public:
  using Error::Error;
};
class OutOfRange : public Error {
 public:
  using Error::Error;
};
class WrongShape : public Error {
 public:
  using Error::Error;
};
class WrongScenario : public Error {
 public:
  using Error::Error;
};
class NotAMember : public Error {
 public:
  using Error::Error;
};
class NotExtremeInput : public Error {
 public:
  using Error::Error;
};
class SignalingInput : public Error {
 public:
  using Error::Error;
};
class InvariantViolation : public Error {
 public:
  using Error::Error;
};
class UnknownName : public Error {
 public:
  using Error::Error;
};
class TooLarge : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

/// Numerical thresholds shared by every decision procedure. All relative
/// thresholds are dimensionless; tight_abs is in radians.
struct Tolerances {
  double rank_rel = 1e-7;   // eigenvalue cutoff for numerical rank
  double null_rel = 1e-8;   // singular-value cutoff for nullspace dimensions
  double tight_abs = 1e-7;  // tightness of box/cycle inequalities (radians)
  double sdp_gap = 1e-9;    // duality-gap target
  double psd_abs = 1e-8;    // minimum-eigenvalue slack for PSD verdicts

  static Tolerances defaults() { return {}; }
  static Tolerances strict() { return {1e-8, 1e-9, 1e-8, 1e-10, 1e-9}; }

  void validate() const {
    if (!(rank_rel > 0 && null_rel > 0 && tight_abs > 0 && sdp_gap > 0 &&
          psd_abs > 0))
      throw InvariantViolation("tolerances must be strictly positive");
    if (!(rank_rel < 1)) throw InvariantViolation("rank_rel must be < 1");
  }
};

// ---------------------------------------------------------------------------
// Dense symmetric matrices
// ---------------------------------------------------------------------------

/// Dense real symmetric matrix. Storage keeps (i,j) and (j,i) as the same
/// written value, so symmetry holds exactly.
class SymMatrix {
 public:
  SymMatrix() : dim_(0) {}
  explicit SymMatrix(int dim) : dim_(dim), a_(size_t(dim) * dim, 0.0) {
    if (dim < 1) throw DimensionMismatch("SymMatrix dim must be >= 1");
  }

  static SymMatrix identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
  }

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return a_[size_t(i) * dim_ + j]; }

  void set(int i, int j, double v) {
    a_[size_t(i) * dim_ + j] = v;
    a_[size_t(j) * dim_ + i] = v;
  }

  void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  /// Trace inner product <A, B>.
  double inner(const SymMatrix& o) const {
    require_same_dim(o);
    double s = 0.0;
    for (size_t k = 0; k < a_.size(); ++k) s += a_[k] * o.a_[k];
    return s;
  }

  SymMatrix scaled(double s) const {
    SymMatrix r(*this);
    for (double& v : r.a_) v *= s;
    return r;
  }

  SymMatrix plus(const SymMatrix& o, double coeff = 1.0) const {
    require_same_dim(o);
    SymMatrix r(*this);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] += coeff * o.a_[k];
    return r;
  }

  bool operator==(const SymMatrix& o) const {
    return dim_ == o.dim_ && a_ == o.a_;
  }

  const std::vector<double>& raw() const { return a_; }

 private:
  void require_same_dim(const SymMatrix& o) const {
    if (dim_ != o.dim_) throw DimensionMismatch("symmetric matrix dims differ");
  }
  int dim_;
  std::vector<double> a_;
};

/// Dense complex Hermitian matrix; set() writes the conjugate mirror entry.
class HermMatrix {
 public:
  using cplx = std::complex<double>;

  HermMatrix() : dim_(0) {}
  explicit HermMatrix(int dim) : dim_(dim), a_(size_t(dim) * dim, cplx(0, 0)) {
    if (dim < 1) throw DimensionMismatch("HermMatrix dim must be >= 1");
  }

  static HermMatrix identity(int dim) {
    HermMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
  }

  int dim() const { return dim_; }

  cplx operator()(int i, int j) const { return a_[size_t(i) * dim_ + j]; }

  void set(int i, int j, cplx v) {
    if (i == j) v = cplx(v.real(), 0.0);
    a_[size_t(i) * dim_ + j] = v;
    a_[size_t(j) * dim_ + i] = std::conj(v);
  }

  cplx trace() const {
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

 private:
  int dim_;
  std::vector<cplx> a_;
};

// ---------------------------------------------------------------------------
// Internal dense kernels
// ---------------------------------------------------------------------------

namespace detail {

using Vec = std::vector<double>;

// row-major n x n product
inline Vec mat_mul(const Vec& A, const Vec& B, int n) {
  Vec C(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double aik = A[size_t(i) * n + k];
      if (aik == 0.0) continue;
      const double* brow = &B[size_t(k) * n];
      double* crow = &C[size_t(i) * n];
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  return C;
}

inline Vec symmetrize(const Vec& A, int n) {
  Vec S(size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S[size_t(i) * n + j] =
          0.5 * (A[size_t(i) * n + j] + A[size_t(j) * n + i]);
  return S;
}

inline SymMatrix to_sym(const Vec& A, int n) {
  SymMatrix S(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      S.set(i, j, 0.5 * (A[size_t(i) * n + j] + A[size_t(j) * n + i]));
  return S;
}

inline Vec from_sym(const SymMatrix& S) { return S.raw(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues sorted descending; vectors[j] is the unit eigenvector paired
/// with values[j].
struct EigResult {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

inline EigResult eig_sym(const SymMatrix& M) {
  const int n = M.dim();
  detail::Vec A = M.raw();
  detail::Vec V(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) V[size_t(i) * n + i] = 1.0;

  double norm = 0.0;
  for (double v : A) norm = std::max(norm, std::abs(v));
  const double stop = std::max(norm, 1e-300) * 1e-15;

  const int max_sweeps = 64;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q)
        off = std::max(off, std::abs(A[size_t(p) * n + q]));
    if (off <= stop) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = A[size_t(p) * n + q];
        if (std::abs(apq) <= stop * 1e-2) continue;
        double app = A[size_t(p) * n + p];
        double aqq = A[size_t(q) * n + q];
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        // rows/columns p and q of A
        for (int k = 0; k < n; ++k) {
          double akp = A[size_t(k) * n + p];
          double akq = A[size_t(k) * n + q];
          A[size_t(k) * n + p] = c * akp - s * akq;
          A[size_t(k) * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A[size_t(p) * n + k];
          double aqk = A[size_t(q) * n + k];
          A[size_t(p) * n + k] = c * apk - s * aqk;
          A[size_t(q) * n + k] = s * apk + c * aqk;
        }
        A[size_t(p) * n + q] = 0.0;
        A[size_t(q) * n + p] = 0.0;
        for (int k = 0; k < n; ++k) {
          double vkp = V[size_t(k) * n + p];
          double vkq = V[size_t(k) * n + q];
          V[size_t(k) * n + p] = c * vkp - s * vkq;
          V[size_t(k) * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps)
    throw NumericalFailure("jacobi eigendecomposition did not converge");

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return A[size_t(a) * n + a] > A[size_t(b) * n + b];
  });

  EigResult r;
  r.values.resize(n);
  r.vectors.assign(n, std::vector<double>(n));
  for (int j = 0; j < n; ++j) {
    r.values[j] = A[size_t(idx[j]) * n + idx[j]];
    for (int i = 0; i < n; ++i) r.vectors[j][i] = V[size_t(i) * n + idx[j]];
  }
  return r;
}

inline std::vector<double> eig_sym_values(const SymMatrix& M) {
  return eig_sym(M).values;
}

inline double min_eigenvalue(const SymMatrix& M) {
  auto v = eig_sym_values(M);
  return v.back();
}

// ---------------------------------------------------------------------------
// Rank / nullspace / Gram
// ---------------------------------------------------------------------------

inline int numerical_rank(const SymMatrix& M, const Tolerances& tol) {
  auto vals = eig_sym_values(M);
  double mx = 0.0;
  for (double v : vals) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return 0;
  int r = 0;
  for (double v : vals)
    if (std::abs(v) > tol.rank_rel * mx) ++r;
  return r;
}

inline std::vector<std::vector<double>> nullspace_basis(const SymMatrix& M,
                                                        const Tolerances& tol) {
  auto eig = eig_sym(M);
  double mx = 0.0;
  for (double v : eig.values) mx = std::max(mx, std::abs(v));
  std::vector<std::vector<double>> basis;
  for (size_t j = 0; j < eig.values.size(); ++j) {
    if (mx == 0.0 || std::abs(eig.values[j]) <= tol.rank_rel * mx)
      basis.push_back(eig.vectors[j]);
  }
  return basis;
}

/// Vectors x_1..x_dim in R^rank with <x_i, x_j> == M_ij. Requires M PSD
/// within psd_abs.
inline std::vector<std::vector<double>> gram_factor(const SymMatrix& M,
                                                    const Tolerances& tol) {
  auto eig = eig_sym(M);
  double mx = 0.0;
  for (double v : eig.values) mx = std::max(mx, std::abs(v));
  if (!eig.values.empty() && eig.values.back() < -tol.psd_abs * std::max(mx, 1.0))
    throw IndefiniteMatrix("gram_factor: matrix is not PSD within psd_abs");
  int r = 0;
  for (double v : eig.values)
    if (mx > 0.0 && std::abs(v) > tol.rank_rel * mx) ++r;
  const int n = M.dim();
  std::vector<std::vector<double>> xs(n, std::vector<double>(r, 0.0));
  for (int j = 0; j < r; ++j) {
    double s = std::sqrt(std::max(eig.values[j], 0.0));
    for (int i = 0; i < n; ++i) xs[i][j] = s * eig.vectors[j][i];
  }
  return xs;
}

inline SymMatrix hadamard(const SymMatrix& M, const SymMatrix& N) {
  if (M.dim() != N.dim())
    throw DimensionMismatch("hadamard: dims differ");
  SymMatrix R(M.dim());
  for (int i = 0; i < M.dim(); ++i)
    for (int j = i; j < M.dim(); ++j) R.set(i, j, M(i, j) * N(i, j));
  return R;
}

/// Rank of a rectangular block via its symmetric embedding [[0,C],[C^T,0]],
/// whose spectrum is {+-sigma_i, 0...}; consistent with numerical_rank
/// thresholds.
inline int numerical_rank_rect(int n, int m,
                               const std::vector<double>& entries,
                               const Tolerances& tol) {
  SymMatrix E(n + m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) E.set(i, n + j, entries[size_t(i) * m + j]);
  return numerical_rank(E, tol) / 2;
}

// ---------------------------------------------------------------------------
// Hermitian helpers (models layer)
// ---------------------------------------------------------------------------

/// Eigenvalues of a Hermitian matrix, descending, via the real embedding
/// [[Re, -Im], [Im, Re]] whose spectrum doubles each eigenvalue.
inline std::vector<double> eig_herm_values(const HermMatrix& H) {
  const int n = H.dim();
  SymMatrix E(2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto v = H(i, j);
      E.set(i, j, v.real());
      E.set(n + i, n + j, v.real());
      if (i != j) {
        E.set(n + i, j, v.imag());
        E.set(i, n + j, -v.imag());
      }
    }
  auto vals = eig_sym_values(E);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = 0.5 * (vals[2 * i] + vals[2 * i + 1]);
  return out;
}

inline HermMatrix kron(const HermMatrix& A, const HermMatrix& B) {
  const int na = A.dim(), nb = B.dim();
  HermMatrix K(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l)
          K.set(i * nb + k, j * nb + l, A(i, j) * B(k, l));
  return K;
}

/// tr(A B) for Hermitian A, B (a complex number; real when both Hermitian
/// commute appropriately -- the imaginary part is returned for residue checks).
inline std::complex<double> trace_product(const HermMatrix& A,
                                          const HermMatrix& B) {
  if (A.dim() != B.dim()) throw DimensionMismatch("trace_product dims differ");
  std::complex<double> t = 0.0;
  for (int i = 0; i < A.dim(); ++i)
    for (int k = 0; k < A.dim(); ++k) t += A(i, k) * B(k, i);
  return t;
}

}  // namespace corrlab
