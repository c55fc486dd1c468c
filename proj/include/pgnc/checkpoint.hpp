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
#include <utility>
#include <vector>

#include "pgnc/controller.hpp"
#include "pgnc/grape.hpp"

namespace pgnc {

// Versioned binary parameter container: magic header, schema version, an
// explicit tensor layout manifest, and little-endian float64 payloads.
// Architecture changes fail loudly on load instead of misloading silently.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string kind;  // "pgnc" or "grape"
  ControllerConfig controller;
  ConditionVector trained_condition{0.0, 0.0, 0.0};  // grape only
  std::vector<std::pair<std::string, RMatrix>> tensors;
  std::uint64_t config_hash = 0;
  std::uint64_t history_digest = 0;

  static Checkpoint from_pgnc(const ControllerParams& theta,
                              const ControllerConfig& cfg);
  static Checkpoint from_grape(const GrapeParams& params,
                               const ControllerConfig& cfg);

  ControllerParams to_pgnc() const;   // requires kind == "pgnc"
  GrapeParams to_grape() const;       // requires kind == "grape"
};

// Atomic write (temp file + rename). save(load(p)) is byte-identical.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pgnc
