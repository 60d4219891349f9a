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

// Shared test constants: the published completions, dual certificates and
// exposing functionals for the CHSH, Mayers-Yao and tilted instances.

#pragma once

#include <vector>

#include "corrlab/linalg.hpp"

namespace fixtures {

inline const double kSqrt2 = std::sqrt(2.0);
inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline corrlab::SymMatrix sym_from(int dim, const std::vector<double>& rows) {
  corrlab::SymMatrix M(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) M.set(i, j, rows[size_t(i) * dim + j]);
  return M;
}

inline double max_diff(const corrlab::SymMatrix& A, const corrlab::SymMatrix& B) {
  double d = 0.0;
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j)
      d = std::max(d, std::abs(A(i, j) - B(i, j)));
  return d;
}

// unique PSD completion of the CHSH correlator (a = b = 0)
inline corrlab::SymMatrix chsh_completion() {
  const double s = kInvSqrt2;
  return sym_from(4, {1, 0, s, s,
                      0, 1, s, -s,
                      s, s, 1, 0,
                      s, -s, 0, 1});
}

// dual certificate v1 v1' + v2 v2' exposing CHSH
inline corrlab::SymMatrix chsh_dual() {
  const double s = kInvSqrt2;
  return sym_from(4, {1, 0, -s, -s,
                      0, 1, -s, s,
                      -s, -s, 1, 0,
                      -s, s, 0, 1});
}

inline std::vector<std::vector<double>> chsh_nullspace() {
  const double s = kInvSqrt2;
  return {{s, s, -1, 0}, {s, -s, 0, -1}};
}

// unique PSD completion of the Mayers-Yao correlator: two copies of the
// 3x3 block stacked so every (i, j) entry equals block(i mod 3, j mod 3)
inline corrlab::SymMatrix my_completion() {
  const double s = kInvSqrt2;
  const double blk[3][3] = {{1, 0, s}, {0, 1, s}, {s, s, 1}};
  corrlab::SymMatrix M(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) M.set(i, j, blk[i % 3][j % 3]);
  return M;
}

inline std::vector<std::vector<double>> my_nullspace() {
  const double r = kSqrt2;
  return {{-1, -1, -1, 1, 1, 1},
          {-1, 1, 0, 1, -1, 0},
          {1, 1, -r, 1, 1, -r},
          {1, 1, -1, -1, -1, 1}};
}

// Z* = 2sqrt2 v1v1' + (3sqrt2+1) v2v2' + v3v3' + sqrt2 v4v4'
inline corrlab::SymMatrix my_dual() {
  auto vs = my_nullspace();
  std::vector<double> coeff = {2 * kSqrt2, 3 * kSqrt2 + 1, 1.0, kSqrt2};
  corrlab::SymMatrix Z(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += coeff[k] * vs[k][i] * vs[k][j];
      Z.set(i, j, v);
    }
  return Z;
}

// exposing functional for Mayers-Yao (hyperplane coefficients -lambda_xy)
inline std::vector<double> my_functional() {
  const double r = kSqrt2;
  return {12 * r, -4, 4 * r,
          -4, 12 * r, 4 * r,
          4 * r, 4 * r, 6 * r - 4};
}

inline double my_offset() { return 6.0 * (5.0 * kSqrt2 + 2.0); }

// unique PSD completion of (1/2)[[1,1],[1,-2]]
inline corrlab::SymMatrix ex3_completion() {
  return sym_from(4, {1, -0.5, 0.5, 0.5,
                      -0.5, 1, 0.5, -1,
                      0.5, 0.5, 1, -0.5,
                      0.5, -1, -0.5, 1});
}

// do the given orthonormal-ish vectors span the same space as the reference?
inline bool same_span(const std::vector<std::vector<double>>& basis,
                      const std::vector<std::vector<double>>& reference,
                      double tol_val) {
  if (basis.empty() && reference.empty()) return true;
  if (basis.empty() || reference.empty()) return basis.size() == reference.size();
  const int k = int(basis[0].size());
  auto projector = [&](const std::vector<std::vector<double>>& vs) {
    // orthonormalize by Gram-Schmidt, then P = sum u u'
    std::vector<std::vector<double>> u;
    for (auto v : vs) {
      for (const auto& w : u) {
        double d = 0.0;
        for (int i = 0; i < k; ++i) d += v[i] * w[i];
        for (int i = 0; i < k; ++i) v[i] -= d * w[i];
      }
      double nrm = 0.0;
      for (int i = 0; i < k; ++i) nrm += v[i] * v[i];
      nrm = std::sqrt(nrm);
      if (nrm < 1e-12) continue;
      for (int i = 0; i < k; ++i) v[i] /= nrm;
      u.push_back(v);
    }
    std::vector<double> P(size_t(k) * k, 0.0);
    for (const auto& w : u)
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) P[size_t(i) * k + j] += w[i] * w[j];
    return P;
  };
  auto Pa = projector(basis), Pb = projector(reference);
  double d = 0.0;
  for (size_t i = 0; i < Pa.size(); ++i) d = std::max(d, std::abs(Pa[i] - Pb[i]));
  return d <= tol_val;
}

}  // namespace fixtures
