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

#include "pgnc/operators.hpp"
#include "pgnc/types.hpp"

namespace pgnc {

// Dimensionless crosstalk-condition vector c = [c_I, c_Q, c_f].
struct ConditionVector {
  double c_i = 0.0;
  double c_q = 0.0;
  double c_f = 0.0;

  Vector<double, 3> vec() const { return {c_i, c_q, c_f}; }

  bool admissible() const {
    return std::abs(c_i) <= 1.0 && std::abs(c_q) <= 1.0 && std::abs(c_f) <= 1.0;
  }

  void require_admissible() const {
    if (!admissible())
      throw std::invalid_argument("condition: components must lie in [-1, 1]");
  }

  bool operator==(const ConditionVector&) const = default;
};

// First-order sensitivities of the effective control parameters plus the
// bleed-through and coupler-shift coefficients. Frequencies in rad/ns.
struct CrosstalkParams {
  double r0 = 0.05;                               // nominal cross-drive ratio
  Vector<double, 3> g_j = {0.0, 0.0, mhz_to_radns(2.0)};
  Vector<double, 3> g_r = {0.0, 0.0, 0.2};
  Vector<double, 3> g_d1 = {mhz_to_radns(3.0), 0.0, mhz_to_radns(-0.5)};
  Vector<double, 3> g_d2 = {0.0, mhz_to_radns(3.0), mhz_to_radns(-0.5)};
  Matrix<double, 4, 3> d_mat = default_d_mat();
  Vector<double, 3> kappa = {0.0, 0.0, mhz_to_radns(-20.0)};
  double eps_1 = 0.05;
  double eps_2 = 0.05;

  // c_I injects on both I channels, c_Q on both Q channels; scale 2pi*1 MHz.
  static Matrix<double, 4, 3> default_d_mat() {
    Matrix<double, 4, 3> d;
    const double d0 = mhz_to_radns(1.0);
    d << d0, 0.0, 0.0,
         0.0, d0, 0.0,
         d0, 0.0, 0.0,
         0.0, d0, 0.0;
    return d;
  }

  // r_eff must stay inside (-1, 1) over the whole admissible condition box;
  // by linearity it is enough to check the corners of [-1, 1]^3.
  void validate() const {
    for (int s = 0; s < 8; ++s) {
      const Vector<double, 3> corner{s & 1 ? 1.0 : -1.0, s & 2 ? 1.0 : -1.0,
                                     s & 4 ? 1.0 : -1.0};
      const double r = r0 + g_r.dot(corner);
      if (std::abs(r) >= 1.0)
        throw std::invalid_argument(
            "crosstalk: r_eff leaves (-1, 1) on the admissible condition box");
    }
  }
};

struct ConditionBias {
  double jzz_eff = 0.0;
  double r_eff = 0.0;
  double dd1 = 0.0;
  double dd2 = 0.0;
};

// Affine condition-to-parameter map b(c) = b0 + G c.
inline ConditionBias condition_bias(const CrosstalkParams& xt, double jzz_t,
                                    const ConditionVector& c) {
  c.require_admissible();
  const Vector<double, 3> v = c.vec();
  return {jzz_t + xt.g_j.dot(v), xt.r0 + xt.g_r.dot(v), xt.g_d1.dot(v),
          xt.g_d2.dot(v)};
}

// Like-quadrature drive mixing, ordering [Omega_x1, Omega_y1, Omega_x2,
// Omega_y2]. Symmetric leakage r12 = r21 = r is hard-wired.
inline Matrix<double, 4, 4> mixing_matrix(double r_eff) {
  if (std::abs(r_eff) >= 1.0)
    throw std::invalid_argument("mixing_matrix: |r_eff| must be < 1");
  Matrix<double, 4, 4> m = Matrix<double, 4, 4>::Identity();
  m(0, 2) = m(2, 0) = r_eff;
  m(1, 3) = m(3, 1) = r_eff;
  return m;
}

// Condition-modulated narrowband injection on the four drive channels,
// DeltaOmega(t; c) = D c * env(t) * sin(kappa^T c * t).
inline Vector<double, 4> bleedthrough(double t, const ConditionVector& c,
                                      const CrosstalkParams& xt, double env_val) {
  const Vector<double, 3> v = c.vec();
  const double df = xt.kappa.dot(v);
  return (xt.d_mat * v) * (env_val * std::sin(df * t));
}

// Parasitic Z shifts tracking the activated coupling waveform.
inline std::pair<double, double> coupler_zshift(double jzz_t,
                                                const CrosstalkParams& xt) {
  return {xt.eps_1 * jzz_t, xt.eps_2 * jzz_t};
}

// The condition-augmented control parameters as an affine map on the raw
// waveform sample u (channel order [Ox1, Oy1, Ox2, Oy2, d1, d2, Jzz]):
//   v(t) = lin * u + offset + bleed_amp_padded * env(t) * sin(bleed_freq * t).
// Everything except the sinusoid factor is fixed per condition, so one
// instance serves a whole propagation.
struct EffectiveControlMap {
  Matrix<double, 7, 7> lin = Matrix<double, 7, 7>::Identity();
  Vector<double, 7> offset = Vector<double, 7>::Zero();
  Vector<double, 4> bleed_amp = Vector<double, 4>::Zero();
  double bleed_freq = 0.0;

  EffectiveControlMap() = default;

  EffectiveControlMap(const CrosstalkParams& xt, const ConditionVector& c) {
    c.require_admissible();
    const ConditionBias bias = condition_bias(xt, 0.0, c);
    lin.setZero();
    lin.topLeftCorner<4, 4>() = mixing_matrix(bias.r_eff);
    lin(4, 4) = 1.0;
    lin(4, 6) = xt.eps_1;
    lin(5, 5) = 1.0;
    lin(5, 6) = xt.eps_2;
    lin(6, 6) = 1.0;
    offset << 0.0, 0.0, 0.0, 0.0, bias.dd1, bias.dd2, bias.jzz_eff;
    bleed_amp = xt.d_mat * c.vec();
    bleed_freq = xt.kappa.dot(c.vec());
  }

  double bleed_scale(double t, double env_val) const {
    return env_val * std::sin(bleed_freq * t);
  }

  Vector<double, 7> effective(const Vector<double, 7>& u, double t,
                              double env_val) const {
    Vector<double, 7> v = lin * u + offset;
    v.head<4>() += bleed_amp * bleed_scale(t, env_val);
    return v;
  }
};

// Full condition-augmented Hamiltonian at time t for one waveform sample.
inline CMatrix assemble_hamiltonian(double t, const Vector<double, 7>& u_step,
                                    const ConditionVector& c,
                                    const OperatorSet& ops,
                                    const CrosstalkParams& xt, double env_val) {
  const EffectiveControlMap map(xt, c);
  const Vector<double, 7> v = map.effective(u_step, t, env_val);
  CMatrix h = ops.h0;
  for (int a = 0; a < 7; ++a) h += v(a) * ops.channel_generator(a);
  return h;
}

}  // namespace pgnc
