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

#include "pgnc/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pgnc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw std::invalid_argument("config: line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) fail_line(line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const std::invalid_argument&) {
    fail_line(line, "expected a number, got '" + v + "'");
  } catch (const std::out_of_range&) {
    fail_line(line, "number out of range: '" + v + "'");
  }
}

long parse_int(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) fail_line(line, "trailing characters in integer '" + v + "'");
    return x;
  } catch (const std::exception&) {
    fail_line(line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const std::uint64_t x = std::stoull(v, &used);
    if (used != v.size()) fail_line(line, "trailing characters in integer '" + v + "'");
    return x;
  } catch (const std::exception&) {
    fail_line(line, "expected an unsigned integer, got '" + v + "'");
  }
}

std::vector<double> parse_vec(const std::string& v, int line, int expected = -1) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, line));
  if (expected >= 0 && static_cast<int>(out.size()) != expected)
    fail_line(line, "expected " + std::to_string(expected) + " numbers, got " +
                        std::to_string(out.size()));
  return out;
}

Vector<double, 3> parse_vec3(const std::string& v, int line) {
  const auto x = parse_vec(v, line, 3);
  return {x[0], x[1], x[2]};
}

Vector<double, 2> parse_vec2(const std::string& v, int line) {
  const auto x = parse_vec(v, line, 2);
  return {x[0], x[1]};
}

Vector<double, 3> mhz_vec3(const Vector<double, 3>& v) {
  return {mhz_to_radns(v(0)), mhz_to_radns(v(1)), mhz_to_radns(v(2))};
}

void apply_key(RunConfig& cfg, const std::string& sec, const std::string& key,
               const std::string& val, int line) {
  auto& dev = cfg.problem.device;
  auto& xt = cfg.problem.xtalk;
  auto& ctl = cfg.problem.controller;
  auto& w = cfg.problem.weights;
  auto& tr = cfg.train;

  auto unknown = [&]() {
    fail_line(line, "unknown key '" + key + "' in section [" + sec + "]");
  };

  if (sec == "device") {
    if (key == "omega_1_mhz") dev.omega_1 = mhz_to_radns(parse_double(val, line));
    else if (key == "omega_2_mhz") dev.omega_2 = mhz_to_radns(parse_double(val, line));
    else if (key == "alpha_1_mhz") dev.alpha_1 = mhz_to_radns(parse_double(val, line));
    else if (key == "alpha_2_mhz") dev.alpha_2 = mhz_to_radns(parse_double(val, line));
    else if (key == "t1_1_ns") dev.t1_1 = parse_double(val, line);
    else if (key == "t1_2_ns") dev.t1_2 = parse_double(val, line);
    else if (key == "t2_1_ns") dev.t2_1 = parse_double(val, line);
    else if (key == "t2_2_ns") dev.t2_2 = parse_double(val, line);
    else if (key == "n_levels") dev.n_levels = static_cast<int>(parse_int(val, line));
    else if (key == "gate_time_ns") dev.gate_time = parse_double(val, line);
    else if (key == "n_steps") dev.n_steps = static_cast<int>(parse_int(val, line));
    else if (key == "substeps") cfg.problem.substeps = static_cast<int>(parse_int(val, line));
    else unknown();
  } else if (sec == "crosstalk") {
    if (key == "r0") xt.r0 = parse_double(val, line);
    else if (key == "g_j_mhz") xt.g_j = mhz_vec3(parse_vec3(val, line));
    else if (key == "g_r") xt.g_r = parse_vec3(val, line);
    else if (key == "g_d1_mhz") xt.g_d1 = mhz_vec3(parse_vec3(val, line));
    else if (key == "g_d2_mhz") xt.g_d2 = mhz_vec3(parse_vec3(val, line));
    else if (key == "d_row1_mhz") xt.d_mat.row(0) = mhz_vec3(parse_vec3(val, line)).transpose();
    else if (key == "d_row2_mhz") xt.d_mat.row(1) = mhz_vec3(parse_vec3(val, line)).transpose();
    else if (key == "d_row3_mhz") xt.d_mat.row(2) = mhz_vec3(parse_vec3(val, line)).transpose();
    else if (key == "d_row4_mhz") xt.d_mat.row(3) = mhz_vec3(parse_vec3(val, line)).transpose();
    else if (key == "kappa_mhz") xt.kappa = mhz_vec3(parse_vec3(val, line));
    else if (key == "eps_1") xt.eps_1 = parse_double(val, line);
    else if (key == "eps_2") xt.eps_2 = parse_double(val, line);
    else if (key == "r12" || key == "r21")
      fail_line(line, "key '" + key +
                          "' is reserved for asymmetric mixing, which this "
                          "version rejects; use r0");
    else unknown();
  } else if (sec == "controller") {
    if (key == "k_harmonics") ctl.k_harmonics = static_cast<int>(parse_int(val, line));
    else if (key == "hidden_1") ctl.hidden_1 = static_cast<int>(parse_int(val, line));
    else if (key == "hidden_2") ctl.hidden_2 = static_cast<int>(parse_int(val, line));
    else if (key == "env_steepness") ctl.env_steepness = parse_double(val, line);
    else if (key == "omega_max_mhz") ctl.omega_max = mhz_to_radns(parse_double(val, line));
    else if (key == "delta_max_mhz") ctl.delta_max = mhz_to_radns(parse_double(val, line));
    else if (key == "j_max_mhz") ctl.j_max = mhz_to_radns(parse_double(val, line));
    else unknown();
  } else if (sec == "objective") {
    if (key == "w_leak") w.w_leak = parse_double(val, line);
    else if (key == "w_smooth") w.w_smooth = parse_double(val, line);
    else if (key == "cvar_alpha") w.cvar_alpha = parse_double(val, line);
    else if (key == "aggregate") {
      if (val == "mean") w.mode = AggregateMode::kMean;
      else if (val == "max") w.mode = AggregateMode::kMax;
      else if (val == "cvar") w.mode = AggregateMode::kCvar;
      else fail_line(line, "aggregate must be mean, max, or cvar");
    } else unknown();
  } else if (sec == "train") {
    if (key == "epochs") tr.epochs = static_cast<int>(parse_int(val, line));
    else if (key == "lr") tr.lr = parse_double(val, line);
    else if (key == "lr_floor") tr.lr_floor = parse_double(val, line);
    else if (key == "clip_norm") tr.clip_norm = parse_double(val, line);
    else if (key == "pool_size") tr.pool_size = static_cast<int>(parse_int(val, line));
    else if (key == "conditions_per_run") tr.conditions_per_run = static_cast<int>(parse_int(val, line));
    else if (key == "c_i_range") tr.box_ci = parse_vec2(val, line);
    else if (key == "c_q_range") tr.box_cq = parse_vec2(val, line);
    else if (key == "c_f_range") tr.box_cf = parse_vec2(val, line);
    else if (key == "n_haar_train") tr.n_haar_train = static_cast<int>(parse_int(val, line));
    else if (key == "grape_init_scale") tr.grape_init_scale = parse_double(val, line);
    else if (key == "grape_lr") tr.grape_lr = parse_double(val, line);
    else if (key == "grape_condition") {
      const auto v = parse_vec3(val, line);
      cfg.grape_condition = {v(0), v(1), v(2)};
    } else unknown();
  } else if (sec == "eval") {
    if (key == "n_states") cfg.eval.n_states = static_cast<int>(parse_int(val, line));
    else if (key == "n_states_final") cfg.eval.n_states_final = static_cast<int>(parse_int(val, line));
    else if (key == "controller") {
      if (val != "pgnc" && val != "grape")
        fail_line(line, "controller must be pgnc or grape");
      cfg.eval.controller = val;
    } else if (key == "condition") {
      const auto v = parse_vec3(val, line);
      cfg.eval.condition = {v(0), v(1), v(2)};
    } else if (key == "pgnc_checkpoint") cfg.eval.pgnc_checkpoint = val;
    else if (key == "grape_checkpoint") cfg.eval.grape_checkpoint = val;
    else if (key.rfind("condition_", 0) == 0) {
      const int idx = static_cast<int>(parse_int(key.substr(10), line));
      if (idx < 0 || idx > 63) fail_line(line, "condition index out of range");
      if (static_cast<int>(cfg.eval.conditions.size()) <= idx)
        cfg.eval.conditions.resize(idx + 1);
      const auto v = parse_vec3(val, line);
      cfg.eval.conditions[idx] = {v(0), v(1), v(2)};
    } else unknown();
  } else if (sec == "scan") {
    if (key == "c_i_range") cfg.scan.ci_range = parse_vec2(val, line);
    else if (key == "c_i_count") cfg.scan.ci_count = static_cast<int>(parse_int(val, line));
    else if (key == "c_q_range") cfg.scan.cq_range = parse_vec2(val, line);
    else if (key == "c_q_count") cfg.scan.cq_count = static_cast<int>(parse_int(val, line));
    else if (key == "c_f_values") cfg.scan.cf_values = parse_vec(val, line);
    else if (key == "detuning_range_mhz") {
      const auto v = parse_vec2(val, line);
      cfg.scan.detuning_range = {mhz_to_radns(v(0)), mhz_to_radns(v(1))};
    } else if (key == "detuning_count") cfg.scan.detuning_count = static_cast<int>(parse_int(val, line));
    else if (key == "n_states") cfg.scan.n_states = static_cast<int>(parse_int(val, line));
    else unknown();
  } else if (sec == "run") {
    if (key == "seed") cfg.seed = parse_u64(val, line);
    else if (key == "out_dir") cfg.out_dir = val;
    else unknown();
  } else {
    fail_line(line, "unknown section [" + sec + "]");
  }
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt17_vec(const double* v, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += fmt17(v[i]);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  problem.device.validate();
  problem.xtalk.validate();
  problem.controller.validate();
  problem.weights.validate();
  train.validate();
  scan.validate();
  if (problem.substeps < 1)
    throw std::invalid_argument("device: substeps must be >= 1");
  if (eval.n_states < 1 || eval.n_states_final < 1)
    throw std::invalid_argument("eval: n_states must be >= 1");
  grape_condition.require_admissible();
  eval.condition.require_admissible();
  for (const auto& c : eval.conditions) c.require_admissible();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_line(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail_line(line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_line(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail_line(line_no, "empty key");
    if (section.empty())
      fail_line(line_no, "key '" + key + "' appears before any [section]");
    apply_key(cfg, section, key, val, line_no);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  if (path == "default") {
    RunConfig cfg;
    cfg.validate();
    return cfg;
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& cfg) {
  const auto& dev = cfg.problem.device;
  const auto& xt = cfg.problem.xtalk;
  const auto& ctl = cfg.problem.controller;
  const auto& w = cfg.problem.weights;
  const auto& tr = cfg.train;
  std::string s;
  auto kv = [&](const std::string& k, const std::string& v) {
    s += k + " = " + v + "\n";
  };
  auto mhz3 = [&](const Vector<double, 3>& v) {
    const double m[3] = {radns_to_mhz(v(0)), radns_to_mhz(v(1)),
                         radns_to_mhz(v(2))};
    return fmt17_vec(m, 3);
  };

  s += "[device]\n";
  kv("omega_1_mhz", fmt17(radns_to_mhz(dev.omega_1)));
  kv("omega_2_mhz", fmt17(radns_to_mhz(dev.omega_2)));
  kv("alpha_1_mhz", fmt17(radns_to_mhz(dev.alpha_1)));
  kv("alpha_2_mhz", fmt17(radns_to_mhz(dev.alpha_2)));
  kv("t1_1_ns", fmt17(dev.t1_1));
  kv("t1_2_ns", fmt17(dev.t1_2));
  kv("t2_1_ns", fmt17(dev.t2_1));
  kv("t2_2_ns", fmt17(dev.t2_2));
  kv("n_levels", std::to_string(dev.n_levels));
  kv("gate_time_ns", fmt17(dev.gate_time));
  kv("n_steps", std::to_string(dev.n_steps));
  kv("substeps", std::to_string(cfg.problem.substeps));

  s += "[crosstalk]\n";
  kv("r0", fmt17(xt.r0));
  kv("g_j_mhz", mhz3(xt.g_j));
  kv("g_r", fmt17_vec(xt.g_r.data(), 3));
  kv("g_d1_mhz", mhz3(xt.g_d1));
  kv("g_d2_mhz", mhz3(xt.g_d2));
  for (int r = 0; r < 4; ++r) {
    const Vector<double, 3> row = xt.d_mat.row(r).transpose();
    kv("d_row" + std::to_string(r + 1) + "_mhz", mhz3(row));
  }
  kv("kappa_mhz", mhz3(xt.kappa));
  kv("eps_1", fmt17(xt.eps_1));
  kv("eps_2", fmt17(xt.eps_2));

  s += "[controller]\n";
  kv("k_harmonics", std::to_string(ctl.k_harmonics));
  kv("hidden_1", std::to_string(ctl.hidden_1));
  kv("hidden_2", std::to_string(ctl.hidden_2));
  kv("env_steepness", fmt17(ctl.env_steepness));
  kv("omega_max_mhz", fmt17(radns_to_mhz(ctl.omega_max)));
  kv("delta_max_mhz", fmt17(radns_to_mhz(ctl.delta_max)));
  kv("j_max_mhz", fmt17(radns_to_mhz(ctl.j_max)));

  s += "[objective]\n";
  kv("w_leak", fmt17(w.w_leak));
  kv("w_smooth", fmt17(w.w_smooth));
  kv("aggregate", w.mode == AggregateMode::kMean  ? "mean"
                  : w.mode == AggregateMode::kMax ? "max"
                                                  : "cvar");
  kv("cvar_alpha", fmt17(w.cvar_alpha));

  s += "[train]\n";
  kv("epochs", std::to_string(tr.epochs));
  kv("lr", fmt17(tr.lr));
  kv("lr_floor", fmt17(tr.lr_floor));
  kv("clip_norm", fmt17(tr.clip_norm));
  kv("pool_size", std::to_string(tr.pool_size));
  kv("conditions_per_run", std::to_string(tr.conditions_per_run));
  kv("c_i_range", fmt17_vec(tr.box_ci.data(), 2));
  kv("c_q_range", fmt17_vec(tr.box_cq.data(), 2));
  kv("c_f_range", fmt17_vec(tr.box_cf.data(), 2));
  kv("n_haar_train", std::to_string(tr.n_haar_train));
  kv("grape_init_scale", fmt17(tr.grape_init_scale));
  kv("grape_lr", fmt17(tr.grape_lr));
  {
    const double c[3] = {cfg.grape_condition.c_i, cfg.grape_condition.c_q,
                         cfg.grape_condition.c_f};
    kv("grape_condition", fmt17_vec(c, 3));
  }

  s += "[eval]\n";
  kv("n_states", std::to_string(cfg.eval.n_states));
  kv("n_states_final", std::to_string(cfg.eval.n_states_final));
  kv("controller", cfg.eval.controller);
  {
    const double c[3] = {cfg.eval.condition.c_i, cfg.eval.condition.c_q,
                         cfg.eval.condition.c_f};
    kv("condition", fmt17_vec(c, 3));
  }
  kv("pgnc_checkpoint", cfg.eval.pgnc_checkpoint);
  kv("grape_checkpoint", cfg.eval.grape_checkpoint);
  for (int i = 0; i < static_cast<int>(cfg.eval.conditions.size()); ++i) {
    const auto& c = cfg.eval.conditions[i];
    const double v[3] = {c.c_i, c.c_q, c.c_f};
    kv("condition_" + std::to_string(i), fmt17_vec(v, 3));
  }

  s += "[scan]\n";
  kv("c_i_range", fmt17_vec(cfg.scan.ci_range.data(), 2));
  kv("c_i_count", std::to_string(cfg.scan.ci_count));
  kv("c_q_range", fmt17_vec(cfg.scan.cq_range.data(), 2));
  kv("c_q_count", std::to_string(cfg.scan.cq_count));
  kv("c_f_values", fmt17_vec(cfg.scan.cf_values.data(),
                             static_cast<int>(cfg.scan.cf_values.size())));
  {
    const double d[2] = {radns_to_mhz(cfg.scan.detuning_range(0)),
                         radns_to_mhz(cfg.scan.detuning_range(1))};
    kv("detuning_range_mhz", fmt17_vec(d, 2));
  }
  kv("detuning_count", std::to_string(cfg.scan.detuning_count));
  kv("n_states", std::to_string(cfg.scan.n_states));

  s += "[run]\n";
  kv("seed", std::to_string(cfg.seed));
  kv("out_dir", cfg.out_dir);
  return s;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a64(dump_config(cfg));
}

}  // namespace pgnc
