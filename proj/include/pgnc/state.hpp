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

#include <stdexcept>

#include "pgnc/rng.hpp"
#include "pgnc/types.hpp"

namespace pgnc {

// Density matrix with construction-time sanity checks. Propagation works on
// the raw matrix; this wrapper guards the public entry points.
struct QuantumState {
  CMatrix rho;

  static QuantumState from_density(CMatrix m) {
    QuantumState s{std::move(m)};
    s.validate();
    return s;
  }

  // Outer product |psi><psi|, built so the result is Hermitian to the bit.
  static QuantumState from_pure(const CVector& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("QuantumState: pure state must be normalized");
    QuantumState s;
    s.rho = psi * psi.adjoint();
    return s;
  }

  void validate() const {
    if (rho.rows() != rho.cols())
      throw std::invalid_argument("QuantumState: density matrix must be square");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho.trace().imag()) > 1e-10)
      throw std::invalid_argument("QuantumState: trace must be 1");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("QuantumState: density matrix must be Hermitian");
  }

  double purity() const { return rho.squaredNorm(); }
};

// Haar-uniform pure state on the two-qubit space: normalized standard complex
// Gaussian 4-vector. Deterministic for a fixed stream.
inline Vector<Complex, 4> haar_random_two_qubit_state(RngStream& rng) {
  Vector<Complex, 4> psi;
  for (int i = 0; i < 4; ++i) psi(i) = rng.gaussian_complex();
  psi /= psi.norm();
  return psi;
}

}  // namespace pgnc
