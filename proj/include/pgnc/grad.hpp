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

#include <vector>

#include "pgnc/controller.hpp"
#include "pgnc/grape.hpp"
#include "pgnc/objectives.hpp"
#include "pgnc/propagate.hpp"
#include "pgnc/types.hpp"

namespace pgnc {

// Everything the objective needs besides the trainable parameters.
struct Problem {
  DeviceModel device;
  CrosstalkParams xtalk;
  ControllerConfig controller;
  ObjectiveWeights weights;
  int substeps = kDefaultSubsteps;
};

struct TermBreakdown {
  double infidelity = 0.0;
  double leak = 0.0;
  double smooth = 0.0;
  double objective = 0.0;
};

struct GradientResult {
  double value = 0.0;
  RVector grad;
  std::vector<TermBreakdown> per_condition;
};

// Forward evaluation of one condition under a fixed waveform: the exact code
// path the gradient engine differentiates. When checkpoints/final_stack are
// supplied they are filled for a subsequent reverse sweep.
struct ConditionForward {
  std::vector<double> fidelities;  // raw, unclamped
  double avg_f = 0.0;
  double leak = 0.0;
  double smooth = 0.0;
  double objective = 0.0;
};

ConditionForward evaluate_condition(const LindbladPropagator& engine,
                                    const WaveformGrid& wave,
                                    const ConditionVector& c,
                                    const StateEnsemble& ensemble,
                                    const ObjectiveWeights& weights,
                                    int substeps,
                                    std::vector<CStack>* checkpoints = nullptr,
                                    CStack* final_stack = nullptr);

// Mean-aggregated objective over the given conditions and its exact
// reverse-accumulation gradient with respect to the generator weights.
GradientResult loss_and_grad(const ControllerParams& theta,
                             const std::vector<ConditionVector>& conditions,
                             const StateEnsemble& ensemble, const Problem& prob);

double loss_only(const ControllerParams& theta,
                 const std::vector<ConditionVector>& conditions,
                 const StateEnsemble& ensemble, const Problem& prob);

// Central finite differences of the scalar objective, coordinate by
// coordinate. Validation oracle for loss_and_grad; O(step^2) accurate.
RVector finite_diff_grad(const ControllerParams& theta,
                         const std::vector<ConditionVector>& conditions,
                         const StateEnsemble& ensemble, const Problem& prob,
                         double step, const std::vector<int>* coords = nullptr);

// Same objective differentiated with respect to the static waveform nodes.
GradientResult grape_loss_and_grad(const GrapeParams& params,
                                   const std::vector<ConditionVector>& conditions,
                                   const StateEnsemble& ensemble,
                                   const Problem& prob);

double grape_loss_only(const GrapeParams& params,
                       const std::vector<ConditionVector>& conditions,
                       const StateEnsemble& ensemble, const Problem& prob);

RVector grape_finite_diff_grad(const GrapeParams& params,
                               const std::vector<ConditionVector>& conditions,
                               const StateEnsemble& ensemble, const Problem& prob,
                               double step,
                               const std::vector<int>* coords = nullptr);

}  // namespace pgnc
