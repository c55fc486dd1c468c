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

#include <cmath>
#include <stdexcept>
#include <string>

#include "pgnc/types.hpp"

namespace pgnc {

// Static two-transmon device description. Angular rates in rad/ns, times in
// ns. omega_1/omega_2 are reference metadata: the rotating frame removes them
// from the drift Hamiltonian, so nothing downstream reads them.
struct DeviceModel {
  double omega_1 = mhz_to_radns(4380.0);
  double omega_2 = mhz_to_radns(4614.0);
  double alpha_1 = mhz_to_radns(-240.0);
  double alpha_2 = mhz_to_radns(-243.0);
  double t1_1 = 70000.0;
  double t1_2 = 70000.0;
  double t2_1 = 80000.0;
  double t2_2 = 80000.0;
  int n_levels = 3;
  double gate_time = 50.0;
  int n_steps = 50;

  int dim() const { return n_levels * n_levels; }
  double dt() const { return gate_time / static_cast<double>(n_steps); }

  void validate() const {
    if (!(alpha_1 < 0.0) || !(alpha_2 < 0.0))
      throw std::invalid_argument("device: anharmonicities must be negative");
    if (n_levels < 3)
      throw std::invalid_argument("device: n_levels must be >= 3");
    if (n_steps < 1) throw std::invalid_argument("device: n_steps must be >= 1");
    if (!(gate_time > 0.0))
      throw std::invalid_argument("device: gate_time must be positive");
    // +inf is allowed and means the channel is switched off.
    if (!(t1_1 > 0.0) || !(t1_2 > 0.0) || !(t2_1 > 0.0) || !(t2_2 > 0.0))
      throw std::invalid_argument("device: T1/T2 times must be positive");
  }
};

// Pure-dephasing rate with the complete-positivity clamp.
inline double dephasing_rate(double t1, double t2) {
  return std::max(0.0, 1.0 / t2 - 1.0 / (2.0 * t1));
}

}  // namespace pgnc
