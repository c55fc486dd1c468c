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

#include "pgnc/train.hpp"

#include <atomic>

namespace pgnc {

namespace {
std::atomic<long> g_pgnc_train_calls{0};

EpochRecord make_record(int epoch, const GradientResult& res, double lr) {
  EpochRecord rec;
  rec.epoch = epoch;
  rec.j_tot = res.value;
  rec.grad_norm = res.grad.norm();
  rec.lr = lr;
  double leak = 0.0, smooth = 0.0;
  for (const TermBreakdown& t : res.per_condition) {
    rec.avg_f.push_back(1.0 - t.infidelity);
    leak += t.leak;
    smooth += t.smooth;
  }
  rec.leak = leak / res.per_condition.size();
  rec.smooth = smooth / res.per_condition.size();
  return rec;
}
}  // namespace

long pgnc_train_invocations() { return g_pgnc_train_calls.load(); }

std::vector<ConditionVector> sample_training_conditions(RngStream& rng,
                                                        const TrainConfig& cfg) {
  cfg.validate();
  std::vector<ConditionVector> pool;
  pool.reserve(cfg.pool_size);
  for (int i = 0; i < cfg.pool_size; ++i)
    pool.push_back({rng.uniform(cfg.box_ci(0), cfg.box_ci(1)),
                    rng.uniform(cfg.box_cq(0), cfg.box_cq(1)),
                    rng.uniform(cfg.box_cf(0), cfg.box_cf(1))});
  std::vector<ConditionVector> picked;
  for (int idx :
       rng.choose_without_replacement(cfg.pool_size, cfg.conditions_per_run))
    picked.push_back(pool[idx]);
  picked.push_back({0.0, 0.0, 0.0});  // the nominal condition is always trained
  return picked;
}

PgncTrainResult train_pgnc(const TrainConfig& cfg, const Problem& prob) {
  g_pgnc_train_calls.fetch_add(1);
  cfg.validate();
  PgncTrainResult out;
  RngStream cond_rng = RngStream::derive(cfg.seed, "conditions");
  out.conditions = sample_training_conditions(cond_rng, cfg);
  RngStream ens_rng = RngStream::derive(cfg.seed, "train-ensemble");
  out.ensemble = build_ensemble(ens_rng, cfg.n_haar_train, prob.device.n_levels);
  RngStream init_rng = RngStream::derive(cfg.seed, "pgnc-init");
  out.params = init_params(init_rng, prob.controller);

  RVector flat = out.params.flatten();
  AdamOptimizer adam(flat.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    GradientResult res;
    try {
      res = loss_and_grad(out.params, out.conditions, out.ensemble, prob);
    } catch (const std::runtime_error& e) {
      out.aborted = true;
      out.abort_reason = e.what();
      break;  // out.params still holds the last completed epoch's weights
    }
    const double lr = cosine_lr(cfg, epoch);
    out.history.push_back(make_record(epoch, res, lr));
    adam.step(flat, res.grad, lr, cfg.clip_norm);
    out.params.unflatten(flat);
  }
  return out;
}

GrapeTrainResult train_grape(const TrainConfig& cfg,
                             const ConditionVector& fixed_condition,
                             const Problem& prob) {
  cfg.validate();
  fixed_condition.require_admissible();
  GrapeTrainResult out;
  RngStream ens_rng = RngStream::derive(cfg.seed, "train-ensemble");
  out.ensemble = build_ensemble(ens_rng, cfg.n_haar_train, prob.device.n_levels);
  RngStream init_rng = RngStream::derive(cfg.seed, "grape-init");
  out.params.trained_condition = fixed_condition;
  out.params.nodes.resize(7, prob.device.n_steps);
  for (Eigen::Index k = 0; k < out.params.nodes.cols(); ++k)
    for (int ch = 0; ch < 7; ++ch)
      out.params.nodes(ch, k) =
          init_rng.uniform(-cfg.grape_init_scale, cfg.grape_init_scale);

  const std::vector<ConditionVector> conds{fixed_condition};
  RVector flat = out.params.flatten();
  AdamOptimizer adam(flat.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    GradientResult res;
    try {
      res = grape_loss_and_grad(out.params, conds, out.ensemble, prob);
    } catch (const std::runtime_error& e) {
      out.aborted = true;
      out.abort_reason = e.what();
      break;
    }
    const double lr = cosine_lr_from(cfg.grape_lr, cfg, epoch);
    out.history.push_back(make_record(epoch, res, lr));
    adam.step(flat, res.grad, lr, cfg.clip_norm);
    out.params.unflatten(flat);
  }
  return out;
}

}  // namespace pgnc
