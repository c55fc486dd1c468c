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

#include "pgnc/controller.hpp"
#include "pgnc/crosstalk.hpp"
#include "pgnc/types.hpp"

namespace pgnc {

// Static piecewise waveform baseline: one pre-saturation node per channel per
// control step, placed at the step midpoints and linearly interpolated in
// between. Nodes map to physical amplitudes through the shared flattop
// envelope and the same tanh saturation the neural generator uses, so both
// parameterizations are feasible by construction.
struct GrapeParams {
  Matrix<double, 7, Eigen::Dynamic> nodes;
  ConditionVector trained_condition;

  int n_steps() const { return static_cast<int>(nodes.cols()); }

  RVector flatten() const {
    return Eigen::Map<const RVector>(nodes.data(), nodes.size());
  }
  void unflatten(const RVector& flat) {
    if (flat.size() != nodes.size())
      throw std::invalid_argument("grape params: flat size mismatch");
    Eigen::Map<RVector>(nodes.data(), nodes.size()) = flat;
  }
};

// Pre-saturation node value at time t, linear between midpoint nodes and
// clamped to the end nodes outside them.
inline double grape_node_at(const GrapeParams& p, int channel, double t,
                            double gate_time) {
  const int n = p.n_steps();
  const double dt = gate_time / n;
  const double pos = t / dt - 0.5;
  if (pos <= 0.0) return p.nodes(channel, 0);
  if (pos >= n - 1) return p.nodes(channel, n - 1);
  const int k = static_cast<int>(pos);
  const double frac = pos - k;
  return (1.0 - frac) * p.nodes(channel, k) + frac * p.nodes(channel, k + 1);
}

inline WaveformGrid grape_waveforms(const GrapeParams& p,
                                    const ControllerConfig& cfg,
                                    double gate_time) {
  const int n = p.n_steps();
  const Vector<double, 7> bounds = cfg.channel_bounds();
  WaveformGrid grid;
  grid.gate_time = gate_time;
  grid.env_steepness = cfg.env_steepness;
  grid.u.resize(7, n);
  grid.t_grid.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * gate_time / n;
    grid.t_grid(k) = t;
    const double env = flattop_env(t, gate_time, cfg.env_steepness);
    for (int ch = 0; ch < 7; ++ch)
      grid.u(ch, k) = bounds(ch) * env * std::tanh(p.nodes(ch, k));
  }
  return grid;
}

}  // namespace pgnc
