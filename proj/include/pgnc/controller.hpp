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

#include "pgnc/crosstalk.hpp"
#include "pgnc/rng.hpp"
#include "pgnc/types.hpp"

namespace pgnc {

// Waveform channel order shared across the project.
enum WaveChannel {
  kOmegaX1 = 0,
  kOmegaY1 = 1,
  kOmegaX2 = 2,
  kOmegaY2 = 3,
  kDelta1 = 4,
  kDelta2 = 5,
  kJzz = 6,
};

struct ControllerConfig {
  int k_harmonics = 4;
  int hidden_1 = 64;
  int hidden_2 = 64;
  double env_steepness = 40.0;
  double omega_max = mhz_to_radns(30.0);
  double delta_max = mhz_to_radns(30.0);
  double j_max = mhz_to_radns(15.0);

  int feature_dim() const { return 1 + 2 * k_harmonics + 3; }

  // Saturation bound per waveform channel.
  Vector<double, 7> channel_bounds() const {
    Vector<double, 7> b;
    b << omega_max, omega_max, omega_max, omega_max, delta_max, delta_max, j_max;
    return b;
  }

  void validate() const {
    if (k_harmonics < 1)
      throw std::invalid_argument("controller: k_harmonics must be >= 1");
    if (hidden_1 < 1 || hidden_2 < 1)
      throw std::invalid_argument("controller: hidden sizes must be >= 1");
    if (!(env_steepness > 0.0))
      throw std::invalid_argument("controller: env_steepness must be positive");
    if (!(omega_max > 0.0) || !(delta_max > 0.0) || !(j_max > 0.0))
      throw std::invalid_argument("controller: amplitude bounds must be positive");
  }
};

// Trainable weights of the two-hidden-layer generator network,
// feature_dim -> hidden_1 -> hidden_2 -> 7 latents.
struct ControllerParams {
  RMatrix w1, w2, w3;
  RVector b1, b2, b3;

  Eigen::Index count() const {
    return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
  }

  // Flat layout [w1, b1, w2, b2, w3, b3], matrices column-major. The same
  // layout is used by the gradient engine and the checkpoint container.
  RVector flatten() const {
    RVector out(count());
    Eigen::Index at = 0;
    auto put = [&](const auto& m) {
      out.segment(at, m.size()) = Eigen::Map<const RVector>(m.data(), m.size());
      at += m.size();
    };
    put(w1); put(b1); put(w2); put(b2); put(w3); put(b3);
    return out;
  }

  void unflatten(const RVector& flat) {
    if (flat.size() != count())
      throw std::invalid_argument("controller params: flat size mismatch");
    Eigen::Index at = 0;
    auto get = [&](auto& m) {
      Eigen::Map<RVector>(m.data(), m.size()) = flat.segment(at, m.size());
      at += m.size();
    };
    get(w1); get(b1); get(w2); get(b2); get(w3); get(b3);
  }

  static ControllerParams zeros(const ControllerConfig& cfg) {
    ControllerParams p;
    p.w1 = RMatrix::Zero(cfg.hidden_1, cfg.feature_dim());
    p.b1 = RVector::Zero(cfg.hidden_1);
    p.w2 = RMatrix::Zero(cfg.hidden_2, cfg.hidden_1);
    p.b2 = RVector::Zero(cfg.hidden_2);
    p.w3 = RMatrix::Zero(7, cfg.hidden_2);
    p.b3 = RVector::Zero(7);
    return p;
  }
};

// The 7 physical control channels sampled on the gate grid. env_steepness and
// gate_time travel with the grid because the propagation engine evaluates the
// shared flattop envelope at sub-step times for the bleed-through term.
struct WaveformGrid {
  Matrix<double, 7, Eigen::Dynamic> u;  // channel x step, rad/ns
  RVector t_grid;                       // step midpoints, ns
  double gate_time = 0.0;
  double env_steepness = 40.0;

  int n_steps() const { return static_cast<int>(u.cols()); }
};

// Analytic flattop window: exact zeros at t = 0 and t = T, plateau near 1.
inline double flattop_env(double t, double gate_time, double s) {
  const double a = std::tanh(s * t / (4.0 * gate_time));
  const double b = std::tanh(s * (t - gate_time) / (4.0 * gate_time));
  return (a - b) / std::tanh(s / 4.0) - 1.0;
}

// Feature embedding [tau, {sin 2pi k tau, cos 2pi k tau}_k, c_I, c_Q, c_f].
inline RVector fourier_features(double t, const ConditionVector& c,
                                const ControllerConfig& cfg, double gate_time) {
  const double tau = t / gate_time;
  RVector phi(cfg.feature_dim());
  phi(0) = tau;
  for (int k = 1; k <= cfg.k_harmonics; ++k) {
    phi(2 * k - 1) = std::sin(kTwoPi * k * tau);
    phi(2 * k) = std::cos(kTwoPi * k * tau);
  }
  phi(cfg.feature_dim() - 3) = c.c_i;
  phi(cfg.feature_dim() - 2) = c.c_q;
  phi(cfg.feature_dim() - 1) = c.c_f;
  return phi;
}

// Latent order produced by the network:
// [p_x1, p_y1, p_d1, p_x2, p_y2, p_d2, p_J].
inline constexpr int kLatentOfChannel[7] = {0, 1, 3, 4, 2, 5, 6};

inline Vector<double, 7> mlp_forward(const ControllerParams& theta,
                                     const RVector& phi) {
  if (theta.w1.cols() != phi.size())
    throw std::invalid_argument("mlp_forward: feature size mismatch");
  const RVector h1 = (theta.w1 * phi + theta.b1).array().tanh();
  const RVector h2 = (theta.w2 * h1 + theta.b2).array().tanh();
  return theta.w3 * h2 + theta.b3;
}

// Channel-wise bound * env * tanh saturation, reordering the latent layout to
// the waveform layout.
inline Vector<double, 7> latent_to_physical(const Vector<double, 7>& p,
                                            double env_val,
                                            const ControllerConfig& cfg) {
  const Vector<double, 7> bounds = cfg.channel_bounds();
  Vector<double, 7> u;
  for (int ch = 0; ch < 7; ++ch)
    u(ch) = bounds(ch) * env_val * std::tanh(p(kLatentOfChannel[ch]));
  return u;
}

// Full generator pipeline evaluated at the step midpoints t_k = (k+1/2) T/N.
inline WaveformGrid sample_waveforms(const ControllerParams& theta,
                                     const ConditionVector& c,
                                     const ControllerConfig& cfg,
                                     double gate_time, int n_steps) {
  if (n_steps < 1)
    throw std::invalid_argument("sample_waveforms: n_steps must be >= 1");
  WaveformGrid grid;
  grid.gate_time = gate_time;
  grid.env_steepness = cfg.env_steepness;
  grid.u.resize(7, n_steps);
  grid.t_grid.resize(n_steps);
  for (int k = 0; k < n_steps; ++k) {
    const double t = (k + 0.5) * gate_time / n_steps;
    grid.t_grid(k) = t;
    const RVector phi = fourier_features(t, c, cfg, gate_time);
    const Vector<double, 7> p = mlp_forward(theta, phi);
    grid.u.col(k) = latent_to_physical(p, flattop_env(t, gate_time, cfg.env_steepness), cfg);
  }
  return grid;
}

// Uniform init with per-layer scale 1/sqrt(fan_in); biases zero.
inline ControllerParams init_params(RngStream& rng, const ControllerConfig& cfg) {
  ControllerParams p = ControllerParams::zeros(cfg);
  auto fill = [&](RMatrix& w) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    // Column-major traversal so the draw order matches the flat layout.
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        w(i, j) = rng.uniform(-scale, scale);
  };
  fill(p.w1);
  fill(p.w2);
  fill(p.w3);
  return p;
}

}  // namespace pgnc
