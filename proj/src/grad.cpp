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

#include "pgnc/grad.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pgnc {

namespace {

CStack stack_from_ensemble(const StateEnsemble& ens, int dim) {
  CStack stack(dim, dim * ens.size());
  for (int m = 0; m < ens.size(); ++m) {
    const CVector psi = embed_state(ens.states[m].psi, ens.n_levels);
    stack.middleCols(m * dim, dim).noalias() = psi * psi.adjoint();
  }
  return stack;
}

void check_finite_terms(const ConditionForward& fw, const ConditionVector& c) {
  auto bad = [&](const char* term) {
    throw std::runtime_error(
        std::string("objective: non-finite ") + term + " at condition (" +
        std::to_string(c.c_i) + ", " + std::to_string(c.c_q) + ", " +
        std::to_string(c.c_f) + ")");
  };
  if (!std::isfinite(fw.avg_f)) bad("fidelity");
  if (!std::isfinite(fw.leak)) bad("leakage");
  if (!std::isfinite(fw.smooth)) bad("smoothness");
}

// d(Smooth)/d(u) for the first-difference penalty, scaled by `weight`.
void add_smoothness_gradient(const WaveformGrid& wave, double gate_time,
                             double weight,
                             Matrix<double, 7, Eigen::Dynamic>& ubar) {
  const int n = wave.n_steps();
  const double dt = gate_time / n;
  const double scale = 2.0 * weight / (gate_time * dt);
  for (int k = 0; k < n; ++k) {
    if (k > 0) ubar.col(k) += scale * (wave.u.col(k) - wave.u.col(k - 1));
    if (k + 1 < n) ubar.col(k) += scale * (wave.u.col(k) - wave.u.col(k + 1));
  }
}

// Adjoint seed for the propagated part of one condition's objective:
// d/d(rho_m) of [-avg_f + w_leak * leak] * condition_weight.
CStack seed_stack(const StateEnsemble& ens, const OperatorSet& ops,
                  double condition_weight, double w_leak) {
  const int dim = ops.dim();
  const double s = condition_weight / ens.size();
  CStack ybar(dim, dim * ens.size());
  for (int m = 0; m < ens.size(); ++m) {
    auto block = ybar.middleCols(m * dim, dim);
    block.noalias() = ens.states[m].target * ens.states[m].target.adjoint();
    block *= Complex(-s, 0.0);
    block -= (s * w_leak) * ops.p_comp;
  }
  return ybar;
}

// Reverse pass through the neural generator: distributes d(loss)/d(u) over
// the flat weight gradient. Recomputes the per-column activations.
void controller_backprop(const ControllerParams& theta,
                         const ConditionVector& c, const ControllerConfig& cfg,
                         double gate_time,
                         const Matrix<double, 7, Eigen::Dynamic>& ubar,
                         ControllerParams& grad) {
  const Vector<double, 7> bounds = cfg.channel_bounds();
  const int n = static_cast<int>(ubar.cols());
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * gate_time / n;
    const double env = flattop_env(t, gate_time, cfg.env_steepness);
    const RVector phi = fourier_features(t, c, cfg, gate_time);
    const RVector h1 = (theta.w1 * phi + theta.b1).array().tanh();
    const RVector h2 = (theta.w2 * h1 + theta.b2).array().tanh();
    const Vector<double, 7> p = theta.w3 * h2 + theta.b3;

    Vector<double, 7> pbar = Vector<double, 7>::Zero();
    for (int ch = 0; ch < 7; ++ch) {
      const int lat = kLatentOfChannel[ch];
      const double th = std::tanh(p(lat));
      pbar(lat) += ubar(ch, k) * bounds(ch) * env * (1.0 - th * th);
    }
    grad.w3.noalias() += pbar * h2.transpose();
    grad.b3 += pbar;
    const RVector h2bar =
        (theta.w3.transpose() * pbar).cwiseProduct((1.0 - h2.array().square()).matrix());
    grad.w2.noalias() += h2bar * h1.transpose();
    grad.b2 += h2bar;
    const RVector h1bar =
        (theta.w2.transpose() * h2bar).cwiseProduct((1.0 - h1.array().square()).matrix());
    grad.w1.noalias() += h1bar * phi.transpose();
    grad.b1 += h1bar;
  }
}

void grape_backprop(const GrapeParams& params, const ControllerConfig& cfg,
                    double gate_time,
                    const Matrix<double, 7, Eigen::Dynamic>& ubar,
                    Matrix<double, 7, Eigen::Dynamic>& grad) {
  const Vector<double, 7> bounds = cfg.channel_bounds();
  const int n = params.n_steps();
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * gate_time / n;
    const double env = flattop_env(t, gate_time, cfg.env_steepness);
    for (int ch = 0; ch < 7; ++ch) {
      const double th = std::tanh(params.nodes(ch, k));
      grad(ch, k) += ubar(ch, k) * bounds(ch) * env * (1.0 - th * th);
    }
  }
}

}  // namespace

ConditionForward evaluate_condition(const LindbladPropagator& engine,
                                    const WaveformGrid& wave,
                                    const ConditionVector& c,
                                    const StateEnsemble& ensemble,
                                    const ObjectiveWeights& weights,
                                    int substeps,
                                    std::vector<CStack>* checkpoints,
                                    CStack* final_stack) {
  const int dim = engine.dim();
  CStack stack = stack_from_ensemble(ensemble, dim);
  engine.propagate_stack(stack, wave, c, substeps, checkpoints);

  ConditionForward fw;
  fw.fidelities.resize(ensemble.size());
  const auto comp = computational_indices(ensemble.n_levels);
  double leak_sum = 0.0;
  for (int m = 0; m < ensemble.size(); ++m) {
    const auto block = stack.middleCols(m * dim, dim);
    const CVector& tar = ensemble.states[m].target;
    fw.fidelities[m] = (tar.adjoint() * block * tar).value().real();
    double pop = 0.0;
    for (int x : comp) pop += block(x, x).real();
    leak_sum += 1.0 - pop;
  }
  fw.avg_f = avg_fidelity(fw.fidelities);
  fw.leak = leak_sum / ensemble.size();
  fw.smooth = smoothness(wave, wave.gate_time);
  fw.objective = per_condition_objective(fw.avg_f, fw.leak, fw.smooth, weights);
  if (final_stack) *final_stack = std::move(stack);
  return fw;
}

namespace {

// Shared core: forward all conditions, optionally run the reverse sweep and
// hand each condition's d(loss)/d(u) to `sink`.
template <typename WaveFn, typename UbarSink>
GradientResult run_objective(const std::vector<ConditionVector>& conditions,
                             const StateEnsemble& ensemble, const Problem& prob,
                             WaveFn&& wave_for, bool with_grad,
                             UbarSink&& sink) {
  if (conditions.empty())
    throw std::invalid_argument("objective: need at least one condition");
  const LindbladPropagator engine(prob.device, prob.xtalk);
  const double cond_weight = 1.0 / conditions.size();

  GradientResult res;
  res.per_condition.reserve(conditions.size());
  std::vector<CStack> checkpoints;
  Matrix<double, 7, Eigen::Dynamic> ubar;
  for (const ConditionVector& c : conditions) {
    const WaveformGrid wave = wave_for(c);
    ConditionForward fw =
        evaluate_condition(engine, wave, c, ensemble, prob.weights,
                           prob.substeps, with_grad ? &checkpoints : nullptr);
    check_finite_terms(fw, c);
    res.value += cond_weight * fw.objective;
    res.per_condition.push_back(
        {1.0 - fw.avg_f, fw.leak, fw.smooth, fw.objective});

    if (with_grad) {
      CStack ybar = seed_stack(ensemble, engine.ops(), cond_weight,
                               prob.weights.w_leak);
      engine.backprop_stack(checkpoints, ybar, wave, c, prob.substeps, ubar);
      add_smoothness_gradient(wave, wave.gate_time,
                              cond_weight * prob.weights.w_smooth, ubar);
      sink(c, wave, ubar);
    }
  }
  return res;
}

void check_grad_finite(const RVector& g) {
  if (!g.allFinite())
    throw std::runtime_error("objective: non-finite gradient entry");
}

}  // namespace

GradientResult loss_and_grad(const ControllerParams& theta,
                             const std::vector<ConditionVector>& conditions,
                             const StateEnsemble& ensemble, const Problem& prob) {
  ControllerParams acc = ControllerParams::zeros(prob.controller);
  GradientResult res = run_objective(
      conditions, ensemble, prob,
      [&](const ConditionVector& c) {
        return sample_waveforms(theta, c, prob.controller,
                                prob.device.gate_time, prob.device.n_steps);
      },
      true,
      [&](const ConditionVector& c, const WaveformGrid&,
          const Matrix<double, 7, Eigen::Dynamic>& ubar) {
        controller_backprop(theta, c, prob.controller, prob.device.gate_time,
                            ubar, acc);
      });
  res.grad = acc.flatten();
  check_grad_finite(res.grad);
  return res;
}

double loss_only(const ControllerParams& theta,
                 const std::vector<ConditionVector>& conditions,
                 const StateEnsemble& ensemble, const Problem& prob) {
  return run_objective(
             conditions, ensemble, prob,
             [&](const ConditionVector& c) {
               return sample_waveforms(theta, c, prob.controller,
                                       prob.device.gate_time,
                                       prob.device.n_steps);
             },
             false,
             [](const ConditionVector&, const WaveformGrid&,
                const Matrix<double, 7, Eigen::Dynamic>&) {})
      .value;
}

GradientResult grape_loss_and_grad(const GrapeParams& params,
                                   const std::vector<ConditionVector>& conditions,
                                   const StateEnsemble& ensemble,
                                   const Problem& prob) {
  Matrix<double, 7, Eigen::Dynamic> acc =
      Matrix<double, 7, Eigen::Dynamic>::Zero(7, params.n_steps());
  const WaveformGrid wave =
      grape_waveforms(params, prob.controller, prob.device.gate_time);
  GradientResult res = run_objective(
      conditions, ensemble, prob, [&](const ConditionVector&) { return wave; },
      true,
      [&](const ConditionVector&, const WaveformGrid&,
          const Matrix<double, 7, Eigen::Dynamic>& ubar) {
        grape_backprop(params, prob.controller, prob.device.gate_time, ubar, acc);
      });
  res.grad = Eigen::Map<const RVector>(acc.data(), acc.size());
  check_grad_finite(res.grad);
  return res;
}

double grape_loss_only(const GrapeParams& params,
                       const std::vector<ConditionVector>& conditions,
                       const StateEnsemble& ensemble, const Problem& prob) {
  const WaveformGrid wave =
      grape_waveforms(params, prob.controller, prob.device.gate_time);
  return run_objective(
             conditions, ensemble, prob,
             [&](const ConditionVector&) { return wave; }, false,
             [](const ConditionVector&, const WaveformGrid&,
                const Matrix<double, 7, Eigen::Dynamic>&) {})
      .value;
}

namespace {

template <typename Params, typename LossFn>
RVector central_differences(const Params& params, double step, LossFn&& loss,
                            const std::vector<int>* coords) {
  if (!(step > 0.0))
    throw std::invalid_argument("finite differences: step must be positive");
  RVector flat = params.flatten();
  RVector grad = RVector::Zero(flat.size());
  std::vector<int> all;
  if (!coords) {
    all.resize(flat.size());
    for (int i = 0; i < flat.size(); ++i) all[i] = i;
  }
  const std::vector<int>& idx = coords ? *coords : all;
  Params work = params;
  for (int i : idx) {
    const double keep = flat(i);
    flat(i) = keep + step;
    work.unflatten(flat);
    const double fp = loss(work);
    flat(i) = keep - step;
    work.unflatten(flat);
    const double fm = loss(work);
    flat(i) = keep;
    grad(i) = (fp - fm) / (2.0 * step);
  }
  return grad;
}

}  // namespace

RVector finite_diff_grad(const ControllerParams& theta,
                         const std::vector<ConditionVector>& conditions,
                         const StateEnsemble& ensemble, const Problem& prob,
                         double step, const std::vector<int>* coords) {
  return central_differences(
      theta, step,
      [&](const ControllerParams& p) {
        return loss_only(p, conditions, ensemble, prob);
      },
      coords);
}

RVector grape_finite_diff_grad(const GrapeParams& params,
                               const std::vector<ConditionVector>& conditions,
                               const StateEnsemble& ensemble, const Problem& prob,
                               double step, const std::vector<int>* coords) {
  return central_differences(
      params, step,
      [&](const GrapeParams& p) {
        return grape_loss_only(p, conditions, ensemble, prob);
      },
      coords);
}

}  // namespace pgnc
