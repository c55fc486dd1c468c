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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgnc/controller.hpp"
#include "pgnc/operators.hpp"
#include "pgnc/state.hpp"
#include "pgnc/types.hpp"

namespace pgnc {

// Controlled-Z on the computational two-qubit space.
inline Vector<Complex, 4> apply_cz(const Vector<Complex, 4>& psi) {
  Vector<Complex, 4> out = psi;
  out(3) = -out(3);
  return out;
}

enum class StateTag { kProduct, kHaar };

struct EnsembleState {
  Vector<Complex, 4> psi;    // two-qubit input amplitudes
  CVector target;            // embedded CZ target in the truncated space
  StateTag tag = StateTag::kProduct;
};

struct StateEnsemble {
  std::vector<EnsembleState> states;
  int n_levels = 3;

  int size() const { return static_cast<int>(states.size()); }
};

// The 16 products of single-qubit {|0>, |1>, |+>, |->} plus n_haar Haar
// draws, with targets U_tar = CZ applied then embedded.
inline StateEnsemble build_ensemble(RngStream& rng, int n_haar, int n_levels) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Vector<Complex, 2> basis[4] = {
      {1.0, 0.0}, {0.0, 1.0}, {inv_sqrt2, inv_sqrt2}, {inv_sqrt2, -inv_sqrt2}};
  StateEnsemble ens;
  ens.n_levels = n_levels;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Vector<Complex, 4> psi;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) psi(2 * i + j) = basis[a](i) * basis[b](j);
      ens.states.push_back(
          {psi, embed_state(apply_cz(psi), n_levels), StateTag::kProduct});
    }
  }
  for (int h = 0; h < n_haar; ++h) {
    const Vector<Complex, 4> psi = haar_random_two_qubit_state(rng);
    ens.states.push_back(
        {psi, embed_state(apply_cz(psi), n_levels), StateTag::kHaar});
  }
  return ens;
}

// Sample fidelity <target| rho |target>. The raw value feeds gradients;
// clamping to [0, 1] is a reporting concern.
inline double state_fidelity(const CMatrix& rho_final, const CVector& target) {
  if (rho_final.rows() != target.size())
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  return (target.adjoint() * rho_final * target).value().real();
}

inline double avg_fidelity(const std::vector<double>& fids) {
  if (fids.empty()) throw std::invalid_argument("avg_fidelity: empty list");
  return std::accumulate(fids.begin(), fids.end(), 0.0) /
         static_cast<double>(fids.size());
}

// Mean population left outside the computational subspace.
inline double leakage(const std::vector<CMatrix>& rhos_final,
                      const CMatrix& p_comp) {
  if (rhos_final.empty()) throw std::invalid_argument("leakage: empty list");
  double total = 0.0;
  for (const CMatrix& rho : rhos_final)
    total += 1.0 - (p_comp * rho).trace().real();
  return total / static_cast<double>(rhos_final.size());
}

// H1-type penalty on the sampled waveform, first-order differences on the
// uniform grid: (1/T) sum_k ||u_{k+1} - u_k||^2 / dt.
inline double smoothness(const WaveformGrid& wave, double gate_time) {
  const int n = wave.n_steps();
  if (n < 2) throw std::invalid_argument("smoothness: need at least 2 steps");
  const double dt = gate_time / static_cast<double>(n);
  double acc = 0.0;
  for (int k = 0; k + 1 < n; ++k)
    acc += (wave.u.col(k + 1) - wave.u.col(k)).squaredNorm();
  return acc / (gate_time * dt);
}

enum class AggregateMode { kMean, kMax, kCvar };

struct ObjectiveWeights {
  double w_leak = 0.05;
  double w_smooth = 0.01;
  AggregateMode mode = AggregateMode::kMean;
  double cvar_alpha = 0.25;

  void validate() const {
    if (w_leak < 0.0 || w_smooth < 0.0)
      throw std::invalid_argument("objective: weights must be non-negative");
    if (mode == AggregateMode::kCvar &&
        !(cvar_alpha > 0.0 && cvar_alpha <= 1.0))
      throw std::invalid_argument("objective: cvar_alpha must be in (0, 1]");
  }
};

inline double per_condition_objective(double avg_f, double leak, double smooth,
                                      const ObjectiveWeights& w) {
  return (1.0 - avg_f) + w.w_leak * leak + w.w_smooth * smooth;
}

// mean, max, or CVaR_alpha = mean of the ceil(alpha S) largest values.
inline double aggregate(std::vector<double> js, AggregateMode mode,
                        double cvar_alpha = 0.25) {
  if (js.empty()) throw std::invalid_argument("aggregate: empty list");
  switch (mode) {
    case AggregateMode::kMean:
      return std::accumulate(js.begin(), js.end(), 0.0) /
             static_cast<double>(js.size());
    case AggregateMode::kMax:
      return *std::max_element(js.begin(), js.end());
    case AggregateMode::kCvar: {
      if (!(cvar_alpha > 0.0 && cvar_alpha <= 1.0))
        throw std::invalid_argument("aggregate: cvar_alpha must be in (0, 1]");
      const auto s = static_cast<double>(js.size());
      const int worst = static_cast<int>(std::ceil(cvar_alpha * s));
      std::sort(js.begin(), js.end(), std::greater<double>());
      return std::accumulate(js.begin(), js.begin() + worst, 0.0) / worst;
    }
  }
  throw std::logic_error("aggregate: unknown mode");
}

// Per-condition evaluation record plus distribution summaries.
struct EvalReport {
  ConditionVector condition;
  std::vector<double> fidelities;  // clamped to [0, 1] for reporting
  double avg_f = 0.0;
  double std_f = 0.0;
  double min_f = 0.0;
  double p5_f = 0.0;
  double leak = 0.0;
  double smooth = 0.0;
  double objective = 0.0;
  std::uint64_t ensemble_hash = 0;
};

}  // namespace pgnc
