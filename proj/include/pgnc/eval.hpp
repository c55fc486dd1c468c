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

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pgnc/grad.hpp"
#include "pgnc/train.hpp"

namespace pgnc {

// A pulse source for evaluation: conditioned (neural) or static (a fixed
// waveform such as a trained GRAPE solution).
class Controller {
 public:
  virtual ~Controller() = default;
  virtual WaveformGrid waveforms(const ConditionVector& c) const = 0;
};

class PgncController : public Controller {
 public:
  PgncController(ControllerParams theta, ControllerConfig cfg, double gate_time,
                 int n_steps)
      : theta_(std::move(theta)), cfg_(cfg), gate_time_(gate_time),
        n_steps_(n_steps) {}

  WaveformGrid waveforms(const ConditionVector& c) const override {
    return sample_waveforms(theta_, c, cfg_, gate_time_, n_steps_);
  }

 private:
  ControllerParams theta_;
  ControllerConfig cfg_;
  double gate_time_;
  int n_steps_;
};

class StaticController : public Controller {
 public:
  explicit StaticController(WaveformGrid wave) : wave_(std::move(wave)) {}
  WaveformGrid waveforms(const ConditionVector&) const override { return wave_; }

 private:
  WaveformGrid wave_;
};

// The Haar evaluation ensemble of a given evaluation point. Every evaluation
// of the same point under the same master seed sees the same states, which
// makes scan cells and standalone evaluations directly comparable.
StateEnsemble eval_ensemble(RngStream& rng, int n_states, int n_levels);

inline RngStream eval_point_stream(std::uint64_t master, const ConditionVector& c,
                                   double d1_off = 0.0, double d2_off = 0.0) {
  return RngStream::derive(master, "eval-ensemble",
                           eval_point_hash(c.c_i, c.c_q, c.c_f, d1_off, d2_off));
}

// Propagates n_states embedded Haar states under the controller's waveform
// for condition c and summarizes the fidelity distribution. Detuning offsets
// are added to the delta channels after waveform generation (zero offsets are
// skipped so the nominal path is bit-identical).
EvalReport eval_distribution(const Controller& controller,
                             const ConditionVector& c, int n_states,
                             RngStream& rng, const Problem& prob,
                             double d1_off = 0.0, double d2_off = 0.0);

RVector linspace(double lo, double hi, int count);

struct OffgridRow {
  double c_f = 0.0, c_i = 0.0, c_q = 0.0;
  std::vector<double> avg_f;   // [pgnc, baselines...]
  std::vector<double> delta;   // pgnc - baseline
  std::uint64_t ensemble_hash = 0;
};

struct OffgridScanResult {
  std::vector<std::string> controller_names;  // "pgnc" first
  std::vector<OffgridRow> rows;
};

// Off-grid generalization scan over (c_I, c_Q) at fixed carrier-offset tags.
// The conditioned controller resamples its waveform per cell; the static
// baselines keep theirs. All controllers share the cell's Haar ensemble.
OffgridScanResult offgrid_scan(
    const Controller& pgnc,
    const std::vector<std::pair<std::string, const Controller*>>& baselines,
    const RVector& ci_values, const RVector& cq_values,
    const std::vector<double>& cf_values, int n_states, std::uint64_t master,
    const Problem& prob);

struct DetuningRow {
  double d1 = 0.0, d2 = 0.0;  // rad/ns
  double avg_f = 0.0;
  bool above_0p99 = false;
};

// Static detuning-offset robustness map at the nominal condition.
std::vector<DetuningRow> detuning_scan(const Controller& controller,
                                       const RVector& d1_values,
                                       const RVector& d2_values, int n_states,
                                       std::uint64_t master, const Problem& prob);

struct BenchRow {
  int condition_index = 0;
  ConditionVector condition;
  std::string controller;
  int rank = 0;        // position in the sorted fidelity list
  double fidelity = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<EvalReport> pgnc_reports;
  std::vector<EvalReport> grape_reports;
};

// Per-condition protocol: GRAPE is re-trained for every condition while the
// conditioned controller is reused and adapts only through its condition
// input. Emits sorted per-state fidelities for distribution plots.
BenchResult per_condition_benchmark(const std::vector<ConditionVector>& conditions,
                                    const Controller& pgnc,
                                    const TrainConfig& grape_cfg, int n_states,
                                    std::uint64_t master, const Problem& prob);

}  // namespace pgnc
