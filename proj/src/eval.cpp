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

#include "pgnc/eval.hpp"

#include <algorithm>
#include <cmath>

namespace pgnc {

namespace {

std::uint64_t hash_states(const StateEnsemble& ens) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& st : ens.states)
    h = fnv1a64(st.psi.data(), sizeof(Complex) * 4, h);
  return h;
}

void apply_detuning_offsets(WaveformGrid& wave, double d1, double d2) {
  // Zero offsets leave the samples bit-identical.
  if (d1 != 0.0) wave.u.row(kDelta1).array() += d1;
  if (d2 != 0.0) wave.u.row(kDelta2).array() += d2;
}

double percentile5(std::vector<double> sorted_fids) {
  // Nearest-rank percentile on the ascending list.
  const int n = static_cast<int>(sorted_fids.size());
  const int rank = std::max(
      0, static_cast<int>(std::ceil(0.05 * n)) - 1);
  return sorted_fids[rank];
}

}  // namespace

StateEnsemble eval_ensemble(RngStream& rng, int n_states, int n_levels) {
  StateEnsemble ens;
  ens.n_levels = n_levels;
  for (int i = 0; i < n_states; ++i) {
    const auto psi = haar_random_two_qubit_state(rng);
    ens.states.push_back(
        {psi, embed_state(apply_cz(psi), n_levels), StateTag::kHaar});
  }
  return ens;
}

EvalReport eval_distribution(const Controller& controller,
                             const ConditionVector& c, int n_states,
                             RngStream& rng, const Problem& prob, double d1_off,
                             double d2_off) {
  if (n_states < 1)
    throw std::invalid_argument("eval_distribution: n_states must be >= 1");
  const StateEnsemble ens = eval_ensemble(rng, n_states, prob.device.n_levels);
  WaveformGrid wave = controller.waveforms(c);
  apply_detuning_offsets(wave, d1_off, d2_off);

  const LindbladPropagator engine(prob.device, prob.xtalk);
  const ConditionForward fw =
      evaluate_condition(engine, wave, c, ens, prob.weights, prob.substeps);

  EvalReport rep;
  rep.condition = c;
  rep.ensemble_hash = hash_states(ens);
  rep.fidelities = fw.fidelities;
  for (double& f : rep.fidelities) f = std::clamp(f, 0.0, 1.0);
  rep.leak = fw.leak;
  rep.smooth = fw.smooth;

  double mean = 0.0;
  for (double f : rep.fidelities) mean += f;
  mean /= n_states;
  double var = 0.0;
  for (double f : rep.fidelities) var += (f - mean) * (f - mean);
  rep.avg_f = mean;
  rep.std_f = n_states > 1 ? std::sqrt(var / (n_states - 1)) : 0.0;
  std::vector<double> sorted = rep.fidelities;
  std::sort(sorted.begin(), sorted.end());
  rep.min_f = sorted.front();
  rep.p5_f = percentile5(sorted);
  rep.objective =
      per_condition_objective(rep.avg_f, rep.leak, rep.smooth, prob.weights);
  return rep;
}

RVector linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
  RVector v(count);
  if (count == 1) {
    v(0) = lo;
    return v;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) v(i) = lo + i * step;
  return v;
}

OffgridScanResult offgrid_scan(
    const Controller& pgnc,
    const std::vector<std::pair<std::string, const Controller*>>& baselines,
    const RVector& ci_values, const RVector& cq_values,
    const std::vector<double>& cf_values, int n_states, std::uint64_t master,
    const Problem& prob) {
  OffgridScanResult out;
  out.controller_names.push_back("pgnc");
  for (const auto& [name, ctrl] : baselines) out.controller_names.push_back(name);

  for (double cf : cf_values) {
    for (int iq = 0; iq < cq_values.size(); ++iq) {
      for (int ii = 0; ii < ci_values.size(); ++ii) {
        const ConditionVector c{ci_values(ii), cq_values(iq), cf};
        OffgridRow row;
        row.c_f = cf;
        row.c_i = c.c_i;
        row.c_q = c.c_q;
        {
          RngStream rng = eval_point_stream(master, c);
          const EvalReport rep =
              eval_distribution(pgnc, c, n_states, rng, prob);
          row.avg_f.push_back(rep.avg_f);
          row.ensemble_hash = rep.ensemble_hash;
        }
        for (const auto& [name, ctrl] : baselines) {
          RngStream rng = eval_point_stream(master, c);
          const EvalReport rep =
              eval_distribution(*ctrl, c, n_states, rng, prob);
          row.avg_f.push_back(rep.avg_f);
          row.delta.push_back(row.avg_f.front() - rep.avg_f);
        }
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

std::vector<DetuningRow> detuning_scan(const Controller& controller,
                                       const RVector& d1_values,
                                       const RVector& d2_values, int n_states,
                                       std::uint64_t master,
                                       const Problem& prob) {
  // All condition-dependent terms stay at their nominal values; only the
  // detuning offsets vary.
  const ConditionVector c0{0.0, 0.0, 0.0};
  std::vector<DetuningRow> rows;
  rows.reserve(d1_values.size() * d2_values.size());
  for (int i2 = 0; i2 < d2_values.size(); ++i2) {
    for (int i1 = 0; i1 < d1_values.size(); ++i1) {
      const double d1 = d1_values(i1), d2 = d2_values(i2);
      RngStream rng = eval_point_stream(master, c0, d1, d2);
      const EvalReport rep =
          eval_distribution(controller, c0, n_states, rng, prob, d1, d2);
      rows.push_back({d1, d2, rep.avg_f, rep.avg_f > 0.99});
    }
  }
  return rows;
}

BenchResult per_condition_benchmark(const std::vector<ConditionVector>& conditions,
                                    const Controller& pgnc,
                                    const TrainConfig& grape_cfg, int n_states,
                                    std::uint64_t master, const Problem& prob) {
  BenchResult out;
  for (int k = 0; k < static_cast<int>(conditions.size()); ++k) {
    const ConditionVector& c = conditions[k];
    TrainConfig cfg = grape_cfg;
    cfg.seed = splitmix64(master ^ fnv1a64("bench-grape") ^ std::uint64_t(k));
    const GrapeTrainResult grape = train_grape(cfg, c, prob);
    const StaticController grape_ctrl(
        grape_waveforms(grape.params, prob.controller, prob.device.gate_time));

    auto eval_one = [&](const Controller& ctrl) {
      RngStream rng = eval_point_stream(master, c);
      return eval_distribution(ctrl, c, n_states, rng, prob);
    };
    const EvalReport pgnc_rep = eval_one(pgnc);
    const EvalReport grape_rep = eval_one(grape_ctrl);

    auto emit = [&](const std::string& name, const EvalReport& rep) {
      std::vector<double> sorted = rep.fidelities;
      std::sort(sorted.begin(), sorted.end());
      for (int r = 0; r < static_cast<int>(sorted.size()); ++r)
        out.rows.push_back({k, c, name, r, sorted[r]});
    };
    emit("pgnc", pgnc_rep);
    emit("grape", grape_rep);
    out.pgnc_reports.push_back(pgnc_rep);
    out.grape_reports.push_back(grape_rep);
  }
  return out;
}

}  // namespace pgnc
