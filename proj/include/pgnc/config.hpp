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

#include <string>
#include <vector>

#include "pgnc/eval.hpp"
#include "pgnc/grad.hpp"
#include "pgnc/train.hpp"

namespace pgnc {

struct EvalSettings {
  int n_states = 128;
  int n_states_final = 512;
  std::string controller = "pgnc";  // "pgnc" | "grape"
  ConditionVector condition{0.0, 0.0, 0.0};
  std::string pgnc_checkpoint;
  std::string grape_checkpoint;
  // Discrete benchmark conditions: nominal to the corner of the training box.
  std::vector<ConditionVector> conditions{
      {0.0, 0.0, 0.0}, {0.1, 0.1, -0.1}, {0.25, 0.0, 0.0}, {0.25, 0.25, -0.25}};
};

struct ScanSettings {
  Vector<double, 2> ci_range = {0.0, 0.25};
  int ci_count = 6;
  Vector<double, 2> cq_range = {0.0, 0.25};
  int cq_count = 6;
  std::vector<double> cf_values{0.0, -0.1, -0.25};
  Vector<double, 2> detuning_range = {mhz_to_radns(-3.0), mhz_to_radns(3.0)};
  int detuning_count = 21;
  int n_states = 128;

  void validate() const {
    if (ci_count < 1 || cq_count < 1 || detuning_count < 1)
      throw std::invalid_argument("scan: axis counts must be >= 1");
    if (cf_values.empty())
      throw std::invalid_argument("scan: c_f_values must be non-empty");
    if (n_states < 1)
      throw std::invalid_argument("scan: n_states must be >= 1");
  }
};

// Everything a run needs: the physical problem, training and evaluation
// settings, the master seed, and the output directory. Frequencies enter the
// file as f/2pi in MHz and live here as rad/ns; times are ns throughout.
struct RunConfig {
  Problem problem;
  TrainConfig train;
  ConditionVector grape_condition{0.0, 0.0, 0.0};
  EvalSettings eval;
  ScanSettings scan;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  void validate() const;
};

// Parses the sectioned key/value format. Omitted keys keep their documented
// defaults; unknown sections or keys are rejected by name; number errors are
// reported with their line. The special path "default" yields the built-in
// default configuration.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

// Canonical serialization of the resolved config (fixed key order, 17
// significant digits). Two configs that resolve identically dump and hash
// identically.
std::string dump_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace pgnc
