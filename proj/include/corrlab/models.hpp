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

#include <random>

#include "corrlab/completion.hpp"

namespace corrlab::models {

using completion::Correlator;

// ---------------------------------------------------------------------------
// Behaviors
// ---------------------------------------------------------------------------

/// Full two-outcome behavior p(a,b|x,y), outcomes indexed 0 -> +1, 1 -> -1.
class Behavior {
 public:
  Behavior(int n, int m) : n_(n), m_(m), p_(size_t(n) * m * 4, 0.0) {
    if (n < 1 || m < 1) throw WrongShape("behavior needs n, m >= 1");
  }

  int n() const { return n_; }
  int m() const { return m_; }

  double p(int a_idx, int b_idx, int x, int y) const {
    return p_[offset(a_idx, b_idx, x, y)];
  }
  void set_p(int a_idx, int b_idx, int x, int y, double v) {
    p_[offset(a_idx, b_idx, x, y)] = v;
  }

  static int outcome(int idx) { return idx == 0 ? +1 : -1; }

  /// Nonnegativity and normalization, within 1e-10.
  void validate_distribution() const {
    for (double v : p_)
      if (v < -1e-10) throw InvariantViolation("behavior has negative entries");
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < m_; ++y) {
        double s = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) s += p(a, b, x, y);
        if (std::abs(s - 1.0) > 1e-10)
          throw InvariantViolation("behavior is not normalized");
      }
  }

  /// Full invariant: distribution plus no-signaling within 1e-10.
  void validate() const {
    validate_distribution();
    for (int x = 0; x < n_; ++x)
      for (int a = 0; a < 2; ++a)
        for (int y = 1; y < m_; ++y)
          if (std::abs(marginal_A(a, x, y) - marginal_A(a, x, 0)) > 1e-10)
            throw InvariantViolation("behavior signals (A marginal)");
    for (int y = 0; y < m_; ++y)
      for (int b = 0; b < 2; ++b)
        for (int x = 1; x < n_; ++x)
          if (std::abs(marginal_B(b, x, y) - marginal_B(b, 0, y)) > 1e-10)
            throw InvariantViolation("behavior signals (B marginal)");
  }

  double marginal_A(int a_idx, int x, int y) const {
    return p(a_idx, 0, x, y) + p(a_idx, 1, x, y);
  }
  double marginal_B(int b_idx, int x, int y) const {
    return p(0, b_idx, x, y) + p(1, b_idx, x, y);
  }

 private:
  size_t offset(int a, int b, int x, int y) const {
    return ((size_t(x) * m_ + y) * 2 + a) * 2 + b;
  }
  int n_, m_;
  std::vector<double> p_;
};

struct FullCorrelator {
  std::vector<double> c_x;  // Alice marginals
  std::vector<double> c_y;  // Bob marginals
  Correlator C;
};

/// The affine bijection from behaviors to (c_x, c_y, c_xy). Marginals are
/// computed from the first setting of the other party and cross-checked
/// against all settings (SignalingInput beyond 1e-8).
inline FullCorrelator behavior_to_correlator(const Behavior& b) {
  b.validate_distribution();
  const int n = b.n(), m = b.m();
  FullCorrelator out{std::vector<double>(n), std::vector<double>(m),
                     Correlator(n, m)};
  for (int x = 0; x < n; ++x) {
    double ref = 0.0;
    for (int y = 0; y < m; ++y) {
      double cx = 0.0;
      for (int a = 0; a < 2; ++a)
        cx += Behavior::outcome(a) * b.marginal_A(a, x, y);
      if (y == 0)
        ref = cx;
      else if (std::abs(cx - ref) > 1e-8)
        throw SignalingInput("Alice marginal depends on Bob's setting");
    }
    out.c_x[x] = ref;
  }
  for (int y = 0; y < m; ++y) {
    double ref = 0.0;
    for (int x = 0; x < n; ++x) {
      double cy = 0.0;
      for (int bb = 0; bb < 2; ++bb)
        cy += Behavior::outcome(bb) * b.marginal_B(bb, x, y);
      if (x == 0)
        ref = cy;
      else if (std::abs(cy - ref) > 1e-8)
        throw SignalingInput("Bob marginal depends on Alice's setting");
    }
    out.c_y[y] = ref;
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y) {
      double cxy = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          cxy += Behavior::outcome(a) * Behavior::outcome(bb) * b.p(a, bb, x, y);
      out.C.set(x, y, std::clamp(cxy, -1.0, 1.0));
    }
  return out;
}

/// Inverse of the bijection for given full-correlator data.
inline Behavior behavior_from_correlators(const std::vector<double>& c_x,
                                          const std::vector<double>& c_y,
                                          const Correlator& C) {
  const int n = C.n(), m = C.m();
  Behavior b(n, m);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
          double av = Behavior::outcome(a), bv = Behavior::outcome(bb);
          b.set_p(a, bb, x, y,
                  (1.0 + av * c_x[x] + bv * c_y[y] + av * bv * C(x, y)) / 4.0);
        }
  return b;
}

// ---------------------------------------------------------------------------
// Quantum realizations
// ---------------------------------------------------------------------------

struct Realization {
  int dimA = 0, dimB = 0;
  HermMatrix state;                    // density matrix on dimA*dimB
  std::vector<HermMatrix> obsA;        // +-1-bounded observables
  std::vector<HermMatrix> obsB;

  void validate() const {
    if (state.dim() != dimA * dimB)
      throw InvariantViolation("state dimension != dimA*dimB");
    if (std::abs(state.trace().real() - 1.0) > 1e-10 ||
        std::abs(state.trace().imag()) > 1e-12)
      throw InvariantViolation("state trace != 1");
    auto sv = eig_herm_values(state);
    if (sv.back() < -1e-10) throw InvariantViolation("state is not PSD");
    auto check_obs = [](const HermMatrix& O, int d) {
      if (O.dim() != d) throw InvariantViolation("observable dimension mismatch");
      auto ev = eig_herm_values(O);
      if (ev.front() > 1.0 + 1e-9 || ev.back() < -1.0 - 1e-9)
        throw InvariantViolation("observable spectrum outside [-1, 1]");
    };
    for (const auto& A : obsA) check_obs(A, dimA);
    for (const auto& B : obsB) check_obs(B, dimB);
  }
};

/// c_xy = Re tr(rho (A_x (x) B_y)); the imaginary residue must stay below
/// 1e-10 by Hermiticity.
inline Correlator realization_to_correlator(const Realization& r) {
  r.validate();
  const int n = int(r.obsA.size()), m = int(r.obsB.size());
  if (n < 1 || m < 1) throw InvariantViolation("realization needs observables");
  Correlator C(n, m);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y) {
      auto K = kron(r.obsA[x], r.obsB[y]);
      auto t = trace_product(r.state, K);
      if (std::abs(t.imag()) > 1e-10)
        throw InvariantViolation("correlator has imaginary residue");
      C.set(x, y, std::clamp(t.real(), -1.0, 1.0));
    }
  return C;
}

/// Qubit +-1 observable from a Bloch direction (exact two-outcome spectrum
/// for unit directions).
inline HermMatrix qubit_observable(double nx, double ny, double nz) {
  double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
  if (std::abs(norm - 1.0) > 1e-12) {
    nx /= norm;
    ny /= norm;
    nz /= norm;
  }
  HermMatrix O(2);
  O.set(0, 0, nz);
  O.set(1, 1, -nz);
  O.set(0, 1, std::complex<double>(nx, -ny));
  return O;
}

/// Two-qubit singlet density matrix |psi-><psi-|.
inline HermMatrix singlet_state() {
  HermMatrix rho(4);
  // |psi-> = (|01> - |10>)/sqrt(2): support on indices 1, 2
  rho.set(1, 1, 0.5);
  rho.set(2, 2, 0.5);
  rho.set(1, 2, -0.5);
  return rho;
}

// ---------------------------------------------------------------------------
// Named instances
// ---------------------------------------------------------------------------

inline Correlator chsh() {
  const double s = 1.0 / std::sqrt(2.0);
  return Correlator(2, 2, {s, s, s, -s});
}

inline Correlator mayers_yao() {
  const double s = 1.0 / std::sqrt(2.0);
  return Correlator(3, 3, {1, 0, s, 0, 1, s, s, s, 1});
}

inline Correlator tilted_example3() {
  return Correlator(2, 2, {0.5, 0.5, 0.5, -1.0});
}

inline Correlator pr_box() { return Correlator(2, 2, {1, 1, 1, -1}); }

/// Deterministic correlator x y' for sign vectors x, y.
inline Correlator deterministic(const std::vector<int>& x,
                                const std::vector<int>& y) {
  const int n = int(x.size()), m = int(y.size());
  if (n < 1 || m < 1) throw WrongShape("deterministic needs sign vectors");
  Correlator C(n, m);
  for (int i = 0; i < n; ++i) {
    if (x[i] != 1 && x[i] != -1) throw OutOfRange("signs must be +-1");
    for (int j = 0; j < m; ++j) {
      if (y[j] != 1 && y[j] != -1) throw OutOfRange("signs must be +-1");
      C.set(i, j, double(x[i] * y[j]));
    }
  }
  return C;
}

inline Correlator named(const std::string& name) {
  if (name == "chsh") return chsh();
  if (name == "mayers_yao") return mayers_yao();
  if (name == "tilted_example3") return tilted_example3();
  if (name == "pr_box") return pr_box();
  throw UnknownName("unknown correlator name: " + name);
}

// ---------------------------------------------------------------------------
// Random extremal generator
// ---------------------------------------------------------------------------

/// Deterministic 64-bit stream (std::mt19937_64, bit-stable per the C++
/// standard). Each uniform draw consumes exactly one engine output, mapped to
/// [0,1) through the top 53 bits; zero draws are redrawn so open intervals
/// stay open.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    for (;;) {
      double u = double(eng_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

 private:
  std::mt19937_64 eng_;
};

/// Accept/reject mapping for the extremal generator: phi = t1+t2+t3 is the
/// fourth angle when phi < pi or 2pi < phi < 3pi (tight_abs exclusion bands);
/// the correlator is cos(t1, t2, t3, phi) arranged as (c13, c14, c23, c24).
inline std::optional<Correlator> extremal_from_angles(double t1, double t2,
                                                      double t3,
                                                      const Tolerances& tol) {
  const double pi = std::acos(-1.0);
  double phi = t1 + t2 + t3;
  bool accept = phi < pi - tol.tight_abs ||
                (phi > 2 * pi + tol.tight_abs && phi < 3 * pi - tol.tight_abs);
  if (!accept) return std::nullopt;
  return Correlator(2, 2,
                    {std::cos(t1), std::cos(t2), std::cos(t3), std::cos(phi)});
}

/// Random rank-2 extreme point of Cor(2,2): three angles uniform in (0,pi),
/// pushed through extremal_from_angles. Three draws per attempt; rejection
/// repeats until acceptance.
inline Correlator random_extremal_2x2(RngStream& rng, const Tolerances& tol) {
  const double pi = std::acos(-1.0);
  for (;;) {
    double t1 = rng.uniform01() * pi;
    double t2 = rng.uniform01() * pi;
    double t3 = rng.uniform01() * pi;
    if (auto c = extremal_from_angles(t1, t2, t3, tol)) return *c;
  }
}

inline Correlator random_extremal_2x2(std::uint64_t seed, const Tolerances& tol) {
  RngStream rng(seed);
  return random_extremal_2x2(rng, tol);
}

}  // namespace corrlab::models
