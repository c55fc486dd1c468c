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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <string_view>

#include "pgnc/types.hpp"

namespace pgnc {

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  return fnv1a64(s.data(), s.size());
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic seeded stream. Every stochastic operation derives its stream
// from (master seed, purpose tag, index); there is no global rng. Uniform and
// gaussian draws are generated from raw 64-bit words so that sequences are
// identical across standard-library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream derive(std::uint64_t master, std::string_view tag,
                          std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(master ^ fnv1a64(tag));
    s = splitmix64(s ^ index);
    return RngStream(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller pair; one value returned per call, partner cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double a = kTwoPi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Complex gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
  }

  // Fisher-Yates selection of k distinct indices from [0, n).
  std::vector<int> choose_without_replacement(int n, int k) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(uniform() * static_cast<double>(n - i));
      std::swap(idx[i], idx[std::min(j, n - 1)]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Canonical hash of an evaluation point (condition plus detuning offsets).
// Negative zero is folded into positive zero so grids that land exactly on
// zero coordinates share the ensemble of the nominal evaluation.
inline std::uint64_t eval_point_hash(double ci, double cq, double cf,
                                     double d1 = 0.0, double d2 = 0.0) {
  double v[5] = {ci, cq, cf, d1, d2};
  for (double& x : v) {
    if (x == 0.0) x = 0.0;
  }
  return fnv1a64(v, sizeof(v));
}

}  // namespace pgnc
