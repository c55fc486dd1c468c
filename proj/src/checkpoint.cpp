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

#include "pgnc/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pgnc {

namespace {

constexpr char kMagic[8] = {'P', 'G', 'N', 'C', 'C', 'K', 'P', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

template <typename T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_str(std::string& buf, const std::string& s) {
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(s.size()));
  buf.append(s);
}

struct Reader {
  const std::string& buf;
  std::size_t at = 0;

  template <typename T>
  T get() {
    if (at + sizeof(T) > buf.size())
      throw std::runtime_error("checkpoint: truncated file");
    T v;
    std::memcpy(&v, buf.data() + at, sizeof(T));
    at += sizeof(T);
    return v;
  }

  std::string get_str() {
    const auto n = get<std::uint32_t>();
    if (at + n > buf.size())
      throw std::runtime_error("checkpoint: truncated string");
    std::string s = buf.substr(at, n);
    at += n;
    return s;
  }
};

}  // namespace

Checkpoint Checkpoint::from_pgnc(const ControllerParams& theta,
                                 const ControllerConfig& cfg) {
  Checkpoint c;
  c.kind = "pgnc";
  c.controller = cfg;
  c.tensors = {{"w1", theta.w1},        {"b1", theta.b1},
               {"w2", theta.w2},        {"b2", theta.b2},
               {"w3", theta.w3},        {"b3", theta.b3}};
  return c;
}

Checkpoint Checkpoint::from_grape(const GrapeParams& params,
                                  const ControllerConfig& cfg) {
  Checkpoint c;
  c.kind = "grape";
  c.controller = cfg;
  c.trained_condition = params.trained_condition;
  c.tensors = {{"nodes", params.nodes}};
  return c;
}

ControllerParams Checkpoint::to_pgnc() const {
  if (kind != "pgnc")
    throw std::runtime_error("checkpoint: expected kind 'pgnc', found '" + kind + "'");
  ControllerParams theta = ControllerParams::zeros(controller);
  const char* names[6] = {"w1", "b1", "w2", "b2", "w3", "b3"};
  RMatrix* slots[6] = {&theta.w1, nullptr, &theta.w2, nullptr, &theta.w3, nullptr};
  RVector* vecs[6] = {nullptr, &theta.b1, nullptr, &theta.b2, nullptr, &theta.b3};
  if (tensors.size() != 6)
    throw std::runtime_error("checkpoint: pgnc layout expects 6 tensors");
  for (int i = 0; i < 6; ++i) {
    const auto& [name, data] = tensors[i];
    if (name != names[i])
      throw std::runtime_error("checkpoint: unexpected tensor '" + name + "'");
    if (slots[i]) {
      if (data.rows() != slots[i]->rows() || data.cols() != slots[i]->cols())
        throw std::runtime_error("checkpoint: tensor '" + name +
                                 "' does not match the declared architecture");
      *slots[i] = data;
    } else {
      if (data.cols() != 1 || data.rows() != vecs[i]->rows())
        throw std::runtime_error("checkpoint: tensor '" + name +
                                 "' does not match the declared architecture");
      *vecs[i] = data.col(0);
    }
  }
  return theta;
}

GrapeParams Checkpoint::to_grape() const {
  if (kind != "grape")
    throw std::runtime_error("checkpoint: expected kind 'grape', found '" + kind + "'");
  if (tensors.size() != 1 || tensors[0].first != "nodes" ||
      tensors[0].second.rows() != 7)
    throw std::runtime_error("checkpoint: grape layout expects one 7 x N tensor");
  GrapeParams p;
  p.nodes = tensors[0].second;
  p.trained_condition = trained_condition;
  return p;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::string buf;
  buf.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(buf, Checkpoint::kVersion);
  put_str(buf, ckpt.kind);
  put(buf, ckpt.config_hash);
  put(buf, ckpt.history_digest);
  put(buf, ckpt.trained_condition.c_i);
  put(buf, ckpt.trained_condition.c_q);
  put(buf, ckpt.trained_condition.c_f);
  put<std::int32_t>(buf, ckpt.controller.k_harmonics);
  put<std::int32_t>(buf, ckpt.controller.hidden_1);
  put<std::int32_t>(buf, ckpt.controller.hidden_2);
  put(buf, ckpt.controller.env_steepness);
  put(buf, ckpt.controller.omega_max);
  put(buf, ckpt.controller.delta_max);
  put(buf, ckpt.controller.j_max);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, data] : ckpt.tensors) {
    put_str(buf, name);
    put<std::uint64_t>(buf, static_cast<std::uint64_t>(data.rows()));
    put<std::uint64_t>(buf, static_cast<std::uint64_t>(data.cols()));
    buf.append(reinterpret_cast<const char*>(data.data()),
               sizeof(double) * data.size());
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write '" + tmp + "'");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("checkpoint: short write to '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) ||
      std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in '" + path + "'");

  Reader r{buf, sizeof(kMagic)};
  const auto version = r.get<std::uint32_t>();
  if (version != Checkpoint::kVersion)
    throw std::runtime_error("checkpoint: unsupported schema version " +
                             std::to_string(version));
  Checkpoint c;
  c.kind = r.get_str();
  c.config_hash = r.get<std::uint64_t>();
  c.history_digest = r.get<std::uint64_t>();
  c.trained_condition.c_i = r.get<double>();
  c.trained_condition.c_q = r.get<double>();
  c.trained_condition.c_f = r.get<double>();
  c.controller.k_harmonics = r.get<std::int32_t>();
  c.controller.hidden_1 = r.get<std::int32_t>();
  c.controller.hidden_2 = r.get<std::int32_t>();
  c.controller.env_steepness = r.get<double>();
  c.controller.omega_max = r.get<double>();
  c.controller.delta_max = r.get<double>();
  c.controller.j_max = r.get<double>();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.get_str();
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    if (rows > (1u << 20) || cols > (1u << 20))
      throw std::runtime_error("checkpoint: implausible tensor shape");
    RMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const std::size_t bytes = sizeof(double) * rows * cols;
    if (r.at + bytes > buf.size())
      throw std::runtime_error("checkpoint: truncated tensor data");
    std::memcpy(m.data(), buf.data() + r.at, bytes);
    r.at += bytes;
    c.tensors.emplace_back(name, std::move(m));
  }
  if (r.at != buf.size())
    throw std::runtime_error("checkpoint: trailing bytes in '" + path + "'");
  return c;
}

}  // namespace pgnc
