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

#include <cmath>

#include "pgnc/objectives.hpp"

using namespace pgnc;

TEST_CASE("ensemble construction") {
  RngStream rng(1);
  const auto ens = build_ensemble(rng, 0, 3);
  CHECK(ens.size() == 16);

  // |++> is state index 2*4 + 2; CZ|++> = (1,1,1,-1)/2.
  const auto& pp = ens.states[10];
  CHECK(pp.psi(0).real() == doctest::Approx(0.5));
  const CVector tar = pp.target;
  CHECK(tar(0).real() == doctest::Approx(0.5));
  CHECK(tar(1).real() == doctest::Approx(0.5));
  CHECK(tar(3).real() == doctest::Approx(0.5));
  CHECK(tar(4).real() == doctest::Approx(-0.5));
  CHECK(std::abs(tar(2)) + std::abs(tar(5)) == 0.0);

  // Computational basis states map to themselves with a sign on |11> only;
  // they sit at ensemble indices 4a + b.
  const int comp_idx[4] = {0, 1, 4, 5};
  for (int m = 0; m < 4; ++m) {
    const auto& st = ens.states[comp_idx[m]];  // |00>, |01>, |10>, |11>
    const double sign = (m == 3) ? -1.0 : 1.0;
    CHECK((st.target - sign * embed_state(st.psi, 3)).cwiseAbs().maxCoeff() ==
          0.0);
  }

  RngStream rng2(1);
  const auto with_haar = build_ensemble(rng2, 4, 3);
  CHECK(with_haar.size() == 20);
  CHECK(with_haar.states[16].tag == StateTag::kHaar);
  CHECK(with_haar.states[3].tag == StateTag::kProduct);
}

TEST_CASE("state fidelity") {
  RngStream rng(2);
  const auto psi = haar_random_two_qubit_state(rng);
  const CVector tar = embed_state(psi, 3);

  SUBCASE("pure target state") {
    const CMatrix rho = tar * tar.adjoint();
    CHECK(state_fidelity(rho, tar) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("maximally mixed on the computational subspace") {
    CMatrix rho = CMatrix::Zero(9, 9);
    for (int x : computational_indices(3)) rho(x, x) = 0.25;
    CHECK(state_fidelity(rho, tar) == doctest::Approx(0.25).epsilon(1e-14));
  }

  SUBCASE("orthogonal state") {
    CVector other = CVector::Zero(9);
    other(2) = 1.0;  // |02>, outside the computational subspace
    const CMatrix rho = other * other.adjoint();
    CHECK(state_fidelity(rho, tar) == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS(state_fidelity(CMatrix::Zero(4, 4), tar));
  }
}

TEST_CASE("average fidelity") {
  CHECK(avg_fidelity({1.0, 1.0, 1.0}) == 1.0);
  CHECK(avg_fidelity({0.9, 1.0}) == doctest::Approx(0.95));
  CHECK(avg_fidelity({0.7, 0.7, 0.7, 0.7}) == doctest::Approx(0.7));
  CHECK_THROWS(avg_fidelity({}));
}

TEST_CASE("leakage") {
  const auto ops = build_operators(DeviceModel{});

  SUBCASE("inside the computational subspace") {
    CMatrix rho = CMatrix::Zero(9, 9);
    rho(0, 0) = 0.5;
    rho(4, 4) = 0.5;
    CHECK(leakage({rho}, ops.p_comp) == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("fully leaked state") {
    CMatrix rho = CMatrix::Zero(9, 9);
    rho(6, 6) = 1.0;  // |2> x |0>
    CHECK(leakage({rho}, ops.p_comp) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("half leaked") {
    CMatrix rho = CMatrix::Zero(9, 9);
    rho(0, 0) = 0.5;
    rho(8, 8) = 0.5;
    CHECK(leakage({rho}, ops.p_comp) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("smoothness") {
  WaveformGrid w;
  w.gate_time = 50.0;
  const int n = 50;
  w.u = Matrix<double, 7, Eigen::Dynamic>::Zero(7, n);
  w.t_grid = RVector::LinSpaced(n, 0.5, 49.5);

  SUBCASE("constant waveform") {
    w.u.setConstant(0.3);
    CHECK(smoothness(w, 50.0) == 0.0);
  }

  SUBCASE("alternating single channel closed form") {
    const double a = 0.02;
    for (int k = 0; k < n; ++k) w.u(0, k) = (k % 2 == 0) ? a : -a;
    const double dt = 50.0 / n;
    const double expected = (n - 1) * (2 * a) * (2 * a) / (50.0 * dt);
    CHECK(smoothness(w, 50.0) == doctest::Approx(expected).epsilon(1e-14));
  }

  SUBCASE("quadratic scaling") {
    RngStream rng(4);
    for (int k = 0; k < n; ++k)
      for (int ch = 0; ch < 7; ++ch) w.u(ch, k) = rng.gaussian();
    const double s1 = smoothness(w, 50.0);
    w.u *= 3.0;
    CHECK(smoothness(w, 50.0) == doctest::Approx(9.0 * s1).epsilon(1e-12));
  }

  SUBCASE("needs two steps") {
    WaveformGrid tiny;
    tiny.gate_time = 1.0;
    tiny.u = Matrix<double, 7, Eigen::Dynamic>::Zero(7, 1);
    CHECK_THROWS(smoothness(tiny, 1.0));
  }
}

TEST_CASE("per-condition objective") {
  const ObjectiveWeights w;
  CHECK(per_condition_objective(1.0, 0.0, 0.0, w) == 0.0);
  CHECK(per_condition_objective(0.99, 0.01, 0.0, w) ==
        doctest::Approx(0.01 + 0.0005).epsilon(1e-14));
  ObjectiveWeights off;
  off.w_leak = off.w_smooth = 0.0;
  CHECK(per_condition_objective(0.9, 0.5, 123.0, off) ==
        doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("aggregation") {
  CHECK(aggregate({0.1, 0.3}, AggregateMode::kMean) == doctest::Approx(0.2));
  CHECK(aggregate({0.1, 0.3}, AggregateMode::kMax) == 0.3);
  CHECK(aggregate({0.1, 0.2, 0.3, 0.4}, AggregateMode::kCvar, 0.5) ==
        doctest::Approx(0.35));
  CHECK(aggregate({0.5}, AggregateMode::kCvar, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS(aggregate({}, AggregateMode::kMean));
  CHECK_THROWS(aggregate({0.1}, AggregateMode::kCvar, 0.0));

  SUBCASE("ordering mean <= cvar <= max") {
    RngStream rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> js;
      const int n = 1 + static_cast<int>(rng.uniform() * 12);
      for (int i = 0; i < n; ++i) js.push_back(rng.uniform());
      const double alpha = rng.uniform_pos();
      const double mean = aggregate(js, AggregateMode::kMean);
      const double cvar = aggregate(js, AggregateMode::kCvar, alpha);
      const double mx = aggregate(js, AggregateMode::kMax);
      CHECK(mean <= cvar + 1e-15);
      CHECK(cvar <= mx + 1e-15);
    }
  }
}

TEST_CASE("gentler envelope edges lower the smoothness penalty") {
  ControllerConfig steep;
  ControllerConfig gentle;
  gentle.env_steepness = 20.0;
  for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
    RngStream ra(seed), rb(seed);
    const auto ta = init_params(ra, steep);
    const auto tb = init_params(rb, gentle);
    const auto wa = sample_waveforms(ta, {0.1, 0.1, -0.1}, steep, 50.0, 50);
    const auto wb = sample_waveforms(tb, {0.1, 0.1, -0.1}, gentle, 50.0, 50);
    CHECK(std::isfinite(smoothness(wa, 50.0)));
    CHECK(smoothness(wb, 50.0) < smoothness(wa, 50.0));
  }
}

TEST_CASE("objective monotonicity") {
  const ObjectiveWeights w;
  RngStream rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const double f = rng.uniform(), leak = rng.uniform(), sm = rng.uniform();
    const double base = per_condition_objective(f, leak, sm, w);
    CHECK(per_condition_objective(f + 0.01, leak, sm, w) < base);
    CHECK(per_condition_objective(f, leak + 0.01, sm, w) > base);
    CHECK(per_condition_objective(f, leak, sm + 0.01, w) > base);
  }
}
