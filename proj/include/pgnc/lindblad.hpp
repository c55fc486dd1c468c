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
#include <vector>

#include "pgnc/types.hpp"

namespace pgnc {

// Lindblad right-hand side,
//   -i [H, rho] + sum_k ( L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho} ).
// Reference form used by tests and by callers that hold explicit jump
// operator matrices; the propagation engine evaluates the same expression
// through a rate-structured fast path.
inline CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h,
                            const std::vector<CMatrix>& jumps) {
  if (rho.rows() != rho.cols() || h.rows() != h.cols() || rho.rows() != h.rows())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  CMatrix out = -kI * (h * rho - rho * h);
  for (const CMatrix& l : jumps) {
    if (l.rows() != rho.rows() || l.cols() != rho.cols())
      throw std::invalid_argument("lindblad_rhs: jump operator dimension mismatch");
    const CMatrix ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

}  // namespace pgnc
