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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pgnc/controller.hpp"
#include "pgnc/crosstalk.hpp"
#include "pgnc/rng.hpp"

using namespace pgnc;

namespace {
const DeviceModel kModel{};
const OperatorSet kOps = build_operators(kModel);
}  // namespace

TEST_CASE("condition bias is the affine map b0 + G c") {
  const CrosstalkParams xt;

  SUBCASE("nominal condition returns b0") {
    const auto b = condition_bias(xt, 0.123, {0.0, 0.0, 0.0});
    CHECK(b.jzz_eff == 0.123);
    CHECK(b.r_eff == xt.r0);
    CHECK(b.dd1 == 0.0);
    CHECK(b.dd2 == 0.0);
  }

  SUBCASE("r_eff cancellation from the stated sensitivities") {
    // g_r = (0, 0, 0.2), c_f = -0.25, r0 = 0.05 -> r_eff = 0.
    const auto b = condition_bias(xt, 0.0, {0.0, 0.0, -0.25});
    CHECK(b.r_eff == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("detuning bias unit conversion") {
    // g_d1/2pi = (3, 0, -0.5) MHz at c = (0.25, 0, 0): 2pi * 0.75e-3 rad/ns.
    const auto b = condition_bias(xt, 0.0, {0.25, 0.0, 0.0});
    CHECK(b.dd1 == doctest::Approx(4.712388980384690e-3).epsilon(1e-12));
    CHECK(b.dd2 == 0.0);
  }

  SUBCASE("inadmissible condition rejected") {
    CHECK_THROWS(condition_bias(xt, 0.0, {1.5, 0.0, 0.0}));
  }

  SUBCASE("exact affinity: f(c1+c2) - f(c1) - f(c2) + f(0) = 0") {
    RngStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const ConditionVector c1{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                               rng.uniform(-0.5, 0.5)};
      const ConditionVector c2{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                               rng.uniform(-0.5, 0.5)};
      const ConditionVector sum{c1.c_i + c2.c_i, c1.c_q + c2.c_q,
                                c1.c_f + c2.c_f};
      const auto bs = condition_bias(xt, 0.3, sum);
      const auto b1 = condition_bias(xt, 0.3, c1);
      const auto b2 = condition_bias(xt, 0.3, c2);
      const auto b0 = condition_bias(xt, 0.3, {0.0, 0.0, 0.0});
      CHECK(std::abs(bs.jzz_eff - b1.jzz_eff - b2.jzz_eff + b0.jzz_eff) < 1e-15);
      CHECK(std::abs(bs.r_eff - b1.r_eff - b2.r_eff + b0.r_eff) < 1e-15);
      CHECK(std::abs(bs.dd1 - b1.dd1 - b2.dd1 + b0.dd1) < 1e-15);
      CHECK(std::abs(bs.dd2 - b1.dd2 - b2.dd2 + b0.dd2) < 1e-15);
    }
  }
}

TEST_CASE("mixing matrix") {
  CHECK((mixing_matrix(0.0) - Matrix<double, 4, 4>::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  const auto m = mixing_matrix(0.05);
  const Vector<double, 4> e1{1.0, 0.0, 0.0, 0.0};
  const Vector<double, 4> mixed = m * e1;
  CHECK(mixed(0) == 1.0);
  CHECK(mixed(2) == 0.05);
  CHECK(mixed(1) == 0.0);

  // Symmetric drives are an eigenvector with eigenvalue 1 + r.
  const Vector<double, 4> sym{0.3, -0.7, 0.3, -0.7};
  CHECK(((m * sym) - 1.05 * sym).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS(mixing_matrix(1.0));
  CHECK_THROWS(mixing_matrix(-1.2));
}

TEST_CASE("crosstalk params validation covers the condition box corners") {
  CrosstalkParams xt;
  xt.g_r = {0.5, 0.5, 0.5};  // corner gives |0.05 + 1.5| >= 1
  CHECK_THROWS(xt.validate());
}

TEST_CASE("bleed-through injection") {
  const CrosstalkParams xt;

  SUBCASE("vanishes at the nominal condition") {
    for (double t : {0.0, 13.0, 50.0})
      CHECK(bleedthrough(t, {0.0, 0.0, 0.0}, xt, 1.0).cwiseAbs().maxCoeff() ==
            0.0);
  }

  SUBCASE("vanishes at the envelope endpoints") {
    const ConditionVector c{0.25, 0.25, -0.25};
    for (double t : {0.0, 50.0}) {
      const double env = flattop_env(t, 50.0, 40.0);
      CHECK(bleedthrough(t, c, xt, env).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("offset frequency from kappa") {
    // kappa/2pi = (0, 0, -20) MHz at c_f = -0.25: 2pi * 5 MHz.
    const ConditionVector c{0.0, 0.0, -0.25};
    const double df = xt.kappa.dot(c.vec());
    CHECK(df == doctest::Approx(0.031415926535897932).epsilon(1e-14));
  }
}

TEST_CASE("coupler z-shift") {
  CrosstalkParams xt;
  CHECK(coupler_zshift(0.0, xt) == std::pair{0.0, 0.0});
  xt.eps_1 = xt.eps_2 = 0.0;
  CHECK(coupler_zshift(0.5, xt) == std::pair{0.0, 0.0});
  xt.eps_1 = 0.05;
  CHECK(coupler_zshift(0.0628, xt).first == doctest::Approx(3.14e-3).epsilon(1e-3));
}

TEST_CASE("assembled Hamiltonian") {
  const CrosstalkParams xt;
  const ConditionVector c0{0.0, 0.0, 0.0};

  SUBCASE("zero controls at the nominal condition give the drift") {
    const Vector<double, 7> u = Vector<double, 7>::Zero();
    const CMatrix h = assemble_hamiltonian(10.0, u, c0, kOps, xt, 1.0);
    CHECK((h - kOps.h0).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("switch-off reduces bit-exactly to the bare control model") {
    CrosstalkParams off;
    off.r0 = 0.0;
    off.eps_1 = off.eps_2 = 0.0;
    RngStream rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      Vector<double, 7> u;
      for (int a = 0; a < 7; ++a) u(a) = rng.uniform(-0.1, 0.1);
      const CMatrix h = assemble_hamiltonian(7.7, u, c0, kOps, off, 0.9);
      CMatrix bare = kOps.h0;
      for (int a = 0; a < 7; ++a) bare += u(a) * kOps.channel_generator(a);
      CHECK((h - bare).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("condition-biased coupling coefficient") {
    // g_j/2pi = (0, 0, 2) MHz at c_f = -0.25 shifts J by -2pi * 0.5e-3.
    Vector<double, 7> u = Vector<double, 7>::Zero();
    u(6) = 0.05;
    const ConditionVector c{0.0, 0.0, -0.25};
    const CMatrix h = assemble_hamiltonian(0.0, u, c, kOps, xt, 0.0);
    // |11> sits at index 4; n1 n2 is 1 there and the detuning biases add on.
    const auto bias = condition_bias(xt, u(6), c);
    const double expected = bias.jzz_eff + bias.dd1 + bias.dd2 +
                            coupler_zshift(u(6), xt).first +
                            coupler_zshift(u(6), xt).second;
    CHECK(h(4, 4).real() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(bias.jzz_eff == doctest::Approx(0.046858407346410207).epsilon(1e-12));
  }

  SUBCASE("Hermitian for random admissible inputs") {
    RngStream rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      Vector<double, 7> u;
      for (int a = 0; a < 7; ++a) u(a) = rng.uniform(-0.2, 0.2);
      const ConditionVector c{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                              rng.uniform(-1.0, 1.0)};
      const CMatrix h = assemble_hamiltonian(rng.uniform(0.0, 50.0), u, c, kOps,
                                             xt, rng.uniform(0.0, 1.0));
      CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("effective control map matches the op-by-op assembly") {
  const CrosstalkParams xt;
  RngStream rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const ConditionVector c{rng.uniform(0.0, 0.25), rng.uniform(0.0, 0.25),
                            rng.uniform(-0.25, 0.0)};
    Vector<double, 7> u;
    for (int a = 0; a < 7; ++a) u(a) = rng.uniform(-0.2, 0.2);
    const double t = rng.uniform(0.0, 50.0);
    const double env = flattop_env(t, 50.0, 40.0);

    const EffectiveControlMap map(xt, c);
    const Vector<double, 7> v = map.effective(u, t, env);

    const auto bias = condition_bias(xt, u(6), c);
    const auto [z1, z2] = coupler_zshift(u(6), xt);
    const Vector<double, 4> omega_eff =
        mixing_matrix(bias.r_eff) * u.head<4>() + bleedthrough(t, c, xt, env);
    CHECK((v.head<4>() - omega_eff).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(v(4) == doctest::Approx(u(4) + bias.dd1 + z1).epsilon(1e-15));
    CHECK(v(5) == doctest::Approx(u(5) + bias.dd2 + z2).epsilon(1e-15));
    CHECK(v(6) == doctest::Approx(bias.jzz_eff).epsilon(1e-15));
  }
}
