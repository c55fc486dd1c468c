// Copyright 2026 The pgnc Authors
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

#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "pgnc/device.hpp"
#include "pgnc/types.hpp"

namespace pgnc {

// Basis ordering is the row-major tensor product with qubit 1 outer and
// qubit 2 inner: full-space index x = n_levels * n1 + n2.
inline std::array<int, 4> computational_indices(int n_levels) {
  return {0, 1, n_levels, n_levels + 1};
}

// Single-transmon lowering operator, b[n-1, n] = sqrt(n).
inline CMatrix lowering_operator(int n_levels) {
  CMatrix b = CMatrix::Zero(n_levels, n_levels);
  for (int n = 1; n < n_levels; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// All operators lifted to the two-qubit space, dimension n_levels^2.
struct OperatorSet {
  CMatrix b1, b2;          // lowering operators
  CMatrix n1, n2;          // number operators
  CMatrix h1I, h1Q;        // drive generators, qubit 1
  CMatrix h2I, h2Q;        // drive generators, qubit 2
  CMatrix n1n2;            // coupling generator
  CMatrix p_comp;          // projector onto {|00>,|01>,|10>,|11>}
  CMatrix h0;              // drift (anharmonic ladder terms)
  int n_levels = 0;

  int dim() const { return n_levels * n_levels; }

  // Control generator for waveform channel a in the order
  // [Omega_x1, Omega_y1, Omega_x2, Omega_y2, delta_1, delta_2, J_zz].
  const CMatrix& channel_generator(int a) const {
    switch (a) {
      case 0: return h1I;
      case 1: return h1Q;
      case 2: return h2I;
      case 3: return h2Q;
      case 4: return n1;
      case 5: return n2;
      case 6: return n1n2;
      default: throw std::out_of_range("channel_generator: bad channel");
    }
  }
};

inline OperatorSet build_operators(const DeviceModel& model) {
  if (model.n_levels < 2)
    throw std::invalid_argument("build_operators: n_levels must be >= 2");
  const int nl = model.n_levels;
  const CMatrix b = lowering_operator(nl);
  const CMatrix id = CMatrix::Identity(nl, nl);

  OperatorSet ops;
  ops.n_levels = nl;
  ops.b1 = kron(b, id);
  ops.b2 = kron(id, b);
  ops.n1 = ops.b1.adjoint() * ops.b1;
  ops.n2 = ops.b2.adjoint() * ops.b2;
  ops.h1I = 0.5 * (ops.b1 + ops.b1.adjoint());
  ops.h1Q = (ops.b1.adjoint() - ops.b1) / Complex(0.0, 2.0);
  ops.h2I = 0.5 * (ops.b2 + ops.b2.adjoint());
  ops.h2Q = (ops.b2.adjoint() - ops.b2) / Complex(0.0, 2.0);
  ops.n1n2 = ops.n1 * ops.n2;

  const int dim = nl * nl;
  ops.p_comp = CMatrix::Zero(dim, dim);
  for (int x : computational_indices(nl)) ops.p_comp(x, x) = 1.0;

  ops.h0 = CMatrix::Zero(dim, dim);
  for (int i = 0; i < nl; ++i) {
    for (int j = 0; j < nl; ++j) {
      const int x = nl * i + j;
      ops.h0(x, x) = 0.5 * model.alpha_1 * i * (i - 1) +
                     0.5 * model.alpha_2 * j * (j - 1);
    }
  }
  return ops;
}

// The four Lindblad channels: amplitude damping sqrt(1/T1_q) b_q and pure
// dephasing sqrt(gamma_phi_q) n_q, with the clamp gamma >= 0.
inline std::vector<CMatrix> build_jump_operators(const DeviceModel& model) {
  if (!(model.t1_1 > 0.0) || !(model.t1_2 > 0.0) || !(model.t2_1 > 0.0) ||
      !(model.t2_2 > 0.0))
    throw std::invalid_argument("build_jump_operators: T1/T2 must be positive");
  const OperatorSet ops = build_operators(model);
  std::vector<CMatrix> jumps;
  jumps.push_back(std::sqrt(1.0 / model.t1_1) * ops.b1);
  jumps.push_back(std::sqrt(1.0 / model.t1_2) * ops.b2);
  jumps.push_back(std::sqrt(dephasing_rate(model.t1_1, model.t2_1)) * ops.n1);
  jumps.push_back(std::sqrt(dephasing_rate(model.t1_2, model.t2_2)) * ops.n2);
  return jumps;
}

// Canonical embedding of a two-qubit amplitude vector into the truncated
// space: amplitude at qubit index 2*a+b lands at full-space index nl*a+b.
inline CVector embed_state(const Vector<Complex, 4>& psi4, int n_levels) {
  if (n_levels < 2) throw std::invalid_argument("embed_state: n_levels must be >= 2");
  CVector out = CVector::Zero(n_levels * n_levels);
  const auto idx = computational_indices(n_levels);
  for (int m = 0; m < 4; ++m) out(idx[m]) = psi4(m);
  return out;
}

// Restriction inverse of embed_state.
inline Vector<Complex, 4> restrict_state(const CVector& psi, int n_levels) {
  Vector<Complex, 4> out;
  const auto idx = computational_indices(n_levels);
  for (int m = 0; m < 4; ++m) out(m) = psi(idx[m]);
  return out;
}

}  // namespace pgnc
