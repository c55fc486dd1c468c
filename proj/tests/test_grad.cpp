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
#include <limits>

#include "pgnc/grad.hpp"

using namespace pgnc;

namespace {

// Small instance so the finite-difference oracle stays cheap. The gate time
// shrinks with the step count so the RK4 sub-interval keeps its production
// duration (2.5 ns sub-steps would sit outside the RK4 stability region for
// this drift).
Problem small_problem() {
  Problem prob;
  prob.device.n_steps = 10;
  prob.device.gate_time = 10.0;
  prob.substeps = 2;
  return prob;
}

StateEnsemble small_ensemble(std::uint64_t seed, int n_states) {
  RngStream rng(seed);
  StateEnsemble ens;
  ens.n_levels = 3;
  for (int i = 0; i < n_states; ++i) {
    const auto psi = haar_random_two_qubit_state(rng);
    ens.states.push_back({psi, embed_state(apply_cz(psi), 3), StateTag::kHaar});
  }
  return ens;
}

struct FdCheck {
  int checked = 0;
  double worst_rel = 0.0;
};

FdCheck compare_grads(const RVector& analytic, const RVector& fd,
                      const std::vector<int>& coords) {
  FdCheck out;
  for (int i : coords) {
    const double a = analytic(i);
    const double f = fd(i);
    if (std::max(std::abs(a), std::abs(f)) <= 1e-8) continue;
    out.worst_rel = std::max(
        out.worst_rel, std::abs(a - f) / std::max(std::abs(a), std::abs(f)));
    ++out.checked;
  }
  return out;
}

}  // namespace

TEST_CASE("finite differences on a quadratic are second-order accurate") {
  // f(x) = ||x||^2 has gradient 2x; the central-difference error on smooth
  // functions shrinks ~4x when the step is halved.
  auto f = [](const RVector& x) { return x.squaredNorm(); };
  RngStream rng(9);
  RVector x(5);
  for (int i = 0; i < 5; ++i) x(i) = rng.gaussian();
  auto fd = [&](double h) {
    RVector g(5);
    for (int i = 0; i < 5; ++i) {
      RVector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      g(i) = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
  };
  CHECK((fd(1e-5) - 2.0 * x).cwiseAbs().maxCoeff() < 1e-9);

  auto g3 = [&](const RVector& v) { return v.array().cube().sum(); };
  auto fd3 = [&](double h) {
    RVector xp = x, xm = x;
    xp(0) += h;
    xm(0) -= h;
    return (g3(xp) - g3(xm)) / (2 * h) - 3.0 * x(0) * x(0);
  };
  const double e1 = std::abs(fd3(1e-3));
  const double e2 = std::abs(fd3(5e-4));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("adjoint gradient matches central differences (pgnc)") {
  const Problem prob = small_problem();
  const auto ens = small_ensemble(77, 4);
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    RngStream rng(seed);
    auto theta = init_params(rng, prob.controller);
    const ConditionVector c{rng.uniform(0.0, 0.25), rng.uniform(0.0, 0.25),
                            rng.uniform(-0.25, 0.0)};
    const std::vector<ConditionVector> conds{c};
    const auto res = loss_and_grad(theta, conds, ens, prob);
    CHECK(res.value == loss_only(theta, conds, ens, prob));  // same code path

    std::vector<int> coords;
    RngStream pick(seed + 1000);
    for (int i = 0; i < 20; ++i)
      coords.push_back(static_cast<int>(pick.uniform() * theta.count()));
    const RVector fd = finite_diff_grad(theta, conds, ens, prob, 1e-5, &coords);
    const FdCheck chk = compare_grads(res.grad, fd, coords);
    CHECK(chk.checked > 0);
    CHECK(chk.worst_rel < 1e-4);
  }
}

TEST_CASE("adjoint gradient matches central differences (grape)") {
  const Problem prob = small_problem();
  const auto ens = small_ensemble(78, 3);
  RngStream rng(21);
  GrapeParams params;
  params.nodes.resize(7, prob.device.n_steps);
  for (int k = 0; k < prob.device.n_steps; ++k)
    for (int ch = 0; ch < 7; ++ch) params.nodes(ch, k) = rng.uniform(-0.1, 0.1);
  params.trained_condition = {0.1, 0.0, -0.1};
  const std::vector<ConditionVector> conds{params.trained_condition};

  const auto res = grape_loss_and_grad(params, conds, ens, prob);
  CHECK(res.value == grape_loss_only(params, conds, ens, prob));
  std::vector<int> coords;
  for (int i = 0; i < 70; i += 3) coords.push_back(i);
  const RVector fd = grape_finite_diff_grad(params, conds, ens, prob, 1e-5, &coords);
  const FdCheck chk = compare_grads(res.grad, fd, coords);
  CHECK(chk.checked > 0);
  CHECK(chk.worst_rel < 1e-4);
}

TEST_CASE("gradient is stationary at the exact CZ optimum") {
  // Closed system, zero drives, any J_zz waveform whose integral is pi gives
  // exactly CZ (H commutes with itself at all times), so a constant interior
  // node value with the right saturated integral is a global maximum of the
  // average fidelity and every node gradient must vanish there.
  Problem prob;
  prob.device.t1_1 = prob.device.t1_2 = prob.device.t2_1 = prob.device.t2_2 =
      std::numeric_limits<double>::infinity();
  prob.xtalk.r0 = 0.0;
  prob.xtalk.eps_1 = prob.xtalk.eps_2 = 0.0;
  prob.weights.w_leak = 0.0;
  prob.weights.w_smooth = 0.0;
  prob.substeps = 4;

  const int n = prob.device.n_steps;
  const double dt = prob.device.gate_time / n;
  double env_sum = 0.0;
  for (int k = 0; k < n; ++k)
    env_sum += flattop_env((k + 0.5) * dt, prob.device.gate_time,
                           prob.controller.env_steepness);
  const double sat = M_PI / (prob.controller.j_max * env_sum * dt);
  REQUIRE(std::abs(sat) < 1.0);
  GrapeParams params;
  params.nodes = Matrix<double, 7, Eigen::Dynamic>::Zero(7, n);
  params.nodes.row(kJzz).setConstant(std::atanh(sat));

  StateEnsemble ens = small_ensemble(79, 3);
  const std::vector<ConditionVector> conds{{0.0, 0.0, 0.0}};
  const auto res = grape_loss_and_grad(params, conds, ens, prob);
  CHECK(res.value < 1e-10);
  CHECK(res.grad.cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("duplicating every ensemble state leaves the gradient unchanged") {
  const Problem prob = small_problem();
  auto ens = small_ensemble(80, 3);
  RngStream rng(41);
  auto theta = init_params(rng, prob.controller);
  const std::vector<ConditionVector> conds{{0.1, 0.05, -0.2}};
  const auto g1 = loss_and_grad(theta, conds, ens, prob);
  StateEnsemble doubled = ens;
  for (const auto& s : ens.states) doubled.states.push_back(s);
  const auto g2 = loss_and_grad(theta, conds, doubled, prob);
  CHECK((g1.grad - g2.grad).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(g1.value == doctest::Approx(g2.value).epsilon(1e-14));
}

TEST_CASE("mean aggregation: gradient is the mean of per-condition gradients") {
  const Problem prob = small_problem();
  const auto ens = small_ensemble(81, 2);
  RngStream rng(51);
  auto theta = init_params(rng, prob.controller);
  const ConditionVector c1{0.2, 0.0, -0.1}, c2{0.0, 0.25, -0.25};
  const auto g12 = loss_and_grad(theta, {c1, c2}, ens, prob);
  const auto ga = loss_and_grad(theta, {c1}, ens, prob);
  const auto gb = loss_and_grad(theta, {c2}, ens, prob);
  CHECK((g12.grad - 0.5 * (ga.grad + gb.grad)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("non-finite intermediates abort with a diagnostic") {
  const Problem prob = small_problem();
  const auto ens = small_ensemble(82, 2);
  auto theta = ControllerParams::zeros(prob.controller);
  theta.w1(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(loss_and_grad(theta, {{0.0, 0.0, 0.0}}, ens, prob),
                  std::runtime_error);
}
