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

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgnc/checkpoint.hpp"
#include "pgnc/config.hpp"
#include "pgnc/eval.hpp"
#include "pgnc/results_io.hpp"
#include "pgnc/train.hpp"

namespace {

using json = nlohmann::json;
using namespace pgnc;

std::string hex64(std::uint64_t x) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016" PRIx64, x);
  return buf;
}

json condition_json(const ConditionVector& c) {
  return json::array({c.c_i, c.c_q, c.c_f});
}

json base_summary(const char* command, const RunConfig& cfg) {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["command"] = command;
  j["config_hash"] = hex64(config_hash(cfg));
  j["seed"] = cfg.seed;
  return j;
}

void write_summary(const RunConfig& cfg, const json& j) {
  write_text_file(cfg.out_dir + "/summary.json", j.dump(2) + "\n");
}

std::string history_csv(const TrainHistory& history) {
  const int n_cond = history.empty() ? 0 : static_cast<int>(history[0].avg_f.size());
  std::vector<std::string> header{"epoch", "j_tot"};
  for (int i = 0; i < n_cond; ++i) header.push_back("avg_f_" + std::to_string(i));
  header.insert(header.end(), {"leak", "smooth", "grad_norm", "lr"});
  CsvWriter csv(header);
  for (const auto& rec : history) {
    csv.cell(rec.epoch).cell(rec.j_tot);
    for (double f : rec.avg_f) csv.cell(f);
    csv.cell(rec.leak).cell(rec.smooth).cell(rec.grad_norm).cell(rec.lr);
    csv.end_row();
  }
  return csv.str();
}

json report_json(const EvalReport& rep) {
  json j;
  j["condition"] = condition_json(rep.condition);
  j["n_states"] = rep.fidelities.size();
  j["avg_fidelity"] = rep.avg_f;
  j["std_fidelity"] = rep.std_f;
  j["min_fidelity"] = rep.min_f;
  j["p5_fidelity"] = rep.p5_f;
  j["leakage"] = rep.leak;
  j["smoothness"] = rep.smooth;
  j["objective"] = rep.objective;
  j["ensemble_hash"] = hex64(rep.ensemble_hash);
  return j;
}

std::unique_ptr<Controller> load_controller(const std::string& which,
                                            const RunConfig& cfg) {
  const std::string& path = which == "pgnc" ? cfg.eval.pgnc_checkpoint
                                            : cfg.eval.grape_checkpoint;
  if (path.empty())
    throw std::runtime_error("missing checkpoint: set [eval] " + which +
                             "_checkpoint in the config");
  const Checkpoint ckpt = load_checkpoint(path);
  if (which == "pgnc")
    return std::make_unique<PgncController>(ckpt.to_pgnc(), ckpt.controller,
                                            cfg.problem.device.gate_time,
                                            cfg.problem.device.n_steps);
  return std::make_unique<StaticController>(grape_waveforms(
      ckpt.to_grape(), ckpt.controller, cfg.problem.device.gate_time));
}

int cmd_train_pgnc(RunConfig cfg) {
  cfg.train.seed = cfg.seed;
  const PgncTrainResult res = train_pgnc(cfg.train, cfg.problem);

  const std::string hist = history_csv(res.history);
  write_text_file(cfg.out_dir + "/train_history.csv", hist);
  Checkpoint ckpt = Checkpoint::from_pgnc(res.params, cfg.problem.controller);
  ckpt.config_hash = config_hash(cfg);
  ckpt.history_digest = fnv1a64(hist);
  save_checkpoint(cfg.out_dir + "/pgnc.ckpt", ckpt);

  json j = base_summary("train-pgnc", cfg);
  j["epochs_run"] = res.history.size();
  j["aborted"] = res.aborted;
  if (res.aborted) j["abort_reason"] = res.abort_reason;
  json conds = json::array();
  for (const auto& c : res.conditions) conds.push_back(condition_json(c));
  j["train_conditions"] = conds;
  if (!res.history.empty()) {
    const auto& last = res.history.back();
    j["final"] = {{"j_tot", last.j_tot},
                  {"avg_f", last.avg_f},
                  {"leak", last.leak},
                  {"smooth", last.smooth}};
  }
  if (!res.aborted) {
    const PgncController ctrl(res.params, cfg.problem.controller,
                              cfg.problem.device.gate_time,
                              cfg.problem.device.n_steps);
    const ConditionVector c0{0.0, 0.0, 0.0};
    RngStream rng = eval_point_stream(cfg.seed, c0);
    const EvalReport rep =
        eval_distribution(ctrl, c0, cfg.eval.n_states, rng, cfg.problem);
    j["heldout_eval"] = report_json(rep);
    std::printf("train-pgnc: J=%.6g heldout avgF(c0)=%.6f leak=%.3g\n",
                res.history.back().j_tot, rep.avg_f, rep.leak);
  }
  j["files"] = {{"checkpoint", "pgnc.ckpt"}, {"history", "train_history.csv"}};
  write_summary(cfg, j);
  if (res.aborted) {
    std::cerr << "error: training aborted: " << res.abort_reason << "\n";
    return 1;
  }
  return 0;
}

int cmd_train_grape(RunConfig cfg) {
  cfg.train.seed = cfg.seed;
  const GrapeTrainResult res =
      train_grape(cfg.train, cfg.grape_condition, cfg.problem);

  const std::string hist = history_csv(res.history);
  write_text_file(cfg.out_dir + "/train_history.csv", hist);
  Checkpoint ckpt = Checkpoint::from_grape(res.params, cfg.problem.controller);
  ckpt.config_hash = config_hash(cfg);
  ckpt.history_digest = fnv1a64(hist);
  save_checkpoint(cfg.out_dir + "/grape.ckpt", ckpt);

  json j = base_summary("train-grape", cfg);
  j["epochs_run"] = res.history.size();
  j["aborted"] = res.aborted;
  if (res.aborted) j["abort_reason"] = res.abort_reason;
  j["trained_condition"] = condition_json(res.params.trained_condition);
  if (!res.history.empty()) {
    const auto& last = res.history.back();
    j["final"] = {{"j_tot", last.j_tot},
                  {"avg_f", last.avg_f},
                  {"leak", last.leak},
                  {"smooth", last.smooth}};
  }
  if (!res.aborted) {
    const StaticController ctrl(grape_waveforms(
        res.params, cfg.problem.controller, cfg.problem.device.gate_time));
    RngStream rng = eval_point_stream(cfg.seed, res.params.trained_condition);
    const EvalReport rep = eval_distribution(
        ctrl, res.params.trained_condition, cfg.eval.n_states, rng, cfg.problem);
    j["heldout_eval"] = report_json(rep);
    std::printf("train-grape: J=%.6g heldout avgF=%.6f leak=%.3g\n",
                res.history.back().j_tot, rep.avg_f, rep.leak);
  }
  j["files"] = {{"checkpoint", "grape.ckpt"}, {"history", "train_history.csv"}};
  write_summary(cfg, j);
  if (res.aborted) {
    std::cerr << "error: training aborted: " << res.abort_reason << "\n";
    return 1;
  }
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const auto ctrl = load_controller(cfg.eval.controller, cfg);
  RngStream rng = eval_point_stream(cfg.seed, cfg.eval.condition);
  const EvalReport rep = eval_distribution(*ctrl, cfg.eval.condition,
                                           cfg.eval.n_states, rng, cfg.problem);
  CsvWriter csv({"state_index", "fidelity"});
  for (int i = 0; i < static_cast<int>(rep.fidelities.size()); ++i)
    csv.cell(i).cell(rep.fidelities[i]).end_row();
  write_text_file(cfg.out_dir + "/eval_states.csv", csv.str());

  json j = base_summary("eval", cfg);
  j["controller"] = cfg.eval.controller;
  j["report"] = report_json(rep);
  j["files"] = {{"states", "eval_states.csv"}};
  write_summary(cfg, j);
  std::printf("eval: avgF=%.6f min=%.6f p5=%.6f leak=%.3g\n", rep.avg_f,
              rep.min_f, rep.p5_f, rep.leak);
  return 0;
}

int cmd_scan_condition(const RunConfig& cfg) {
  const auto pgnc = load_controller("pgnc", cfg);
  const auto grape = load_controller("grape", cfg);
  const std::vector<std::pair<std::string, const Controller*>> baselines{
      {"grape", grape.get()}};
  const auto table = offgrid_scan(
      *pgnc, baselines, linspace(cfg.scan.ci_range(0), cfg.scan.ci_range(1),
                                 cfg.scan.ci_count),
      linspace(cfg.scan.cq_range(0), cfg.scan.cq_range(1), cfg.scan.cq_count),
      cfg.scan.cf_values, cfg.scan.n_states, cfg.seed, cfg.problem);

  CsvWriter csv({"c_f", "c_i", "c_q", "avg_f_pgnc", "avg_f_grape",
                 "delta_vs_grape", "ensemble_hash"});
  for (const auto& row : table.rows) {
    csv.cell(row.c_f).cell(row.c_i).cell(row.c_q);
    csv.cell(row.avg_f[0]).cell(row.avg_f[1]).cell(row.delta[0]);
    csv.cell(hex64(row.ensemble_hash));
    csv.end_row();
  }
  write_text_file(cfg.out_dir + "/scan_condition.csv", csv.str());

  json j = base_summary("scan-condition", cfg);
  j["controllers"] = table.controller_names;
  j["rows"] = table.rows.size();
  j["n_states"] = cfg.scan.n_states;
  j["files"] = {{"table", "scan_condition.csv"}};
  write_summary(cfg, j);
  std::printf("scan-condition: %zu cells written\n", table.rows.size());
  return 0;
}

int cmd_scan_detuning(const RunConfig& cfg) {
  const auto ctrl = load_controller(cfg.eval.controller, cfg);
  const RVector axis = linspace(cfg.scan.detuning_range(0),
                                cfg.scan.detuning_range(1),
                                cfg.scan.detuning_count);
  const auto rows =
      detuning_scan(*ctrl, axis, axis, cfg.scan.n_states, cfg.seed, cfg.problem);

  CsvWriter csv({"d1_mhz", "d2_mhz", "avg_f", "above_0p99"});
  int above = 0;
  for (const auto& row : rows) {
    csv.cell(radns_to_mhz(row.d1)).cell(radns_to_mhz(row.d2)).cell(row.avg_f);
    csv.cell(row.above_0p99 ? 1 : 0);
    csv.end_row();
    above += row.above_0p99 ? 1 : 0;
  }
  write_text_file(cfg.out_dir + "/scan_detuning.csv", csv.str());

  json j = base_summary("scan-detuning", cfg);
  j["controller"] = cfg.eval.controller;
  j["rows"] = rows.size();
  j["cells_above_0p99"] = above;
  j["files"] = {{"table", "scan_detuning.csv"}};
  write_summary(cfg, j);
  std::printf("scan-detuning: %zu cells, %d above 0.99\n", rows.size(), above);
  return 0;
}

int cmd_bench(const RunConfig& cfg) {
  const auto pgnc = load_controller("pgnc", cfg);
  TrainConfig grape_cfg = cfg.train;
  const auto bench =
      per_condition_benchmark(cfg.eval.conditions, *pgnc, grape_cfg,
                              cfg.eval.n_states, cfg.seed, cfg.problem);

  CsvWriter csv({"condition_index", "c_i", "c_q", "c_f", "controller", "rank",
                 "fidelity"});
  for (const auto& row : bench.rows) {
    csv.cell(row.condition_index)
        .cell(row.condition.c_i)
        .cell(row.condition.c_q)
        .cell(row.condition.c_f)
        .cell(row.controller)
        .cell(row.rank)
        .cell(row.fidelity);
    csv.end_row();
  }
  write_text_file(cfg.out_dir + "/bench_per_condition.csv", csv.str());

  json j = base_summary("bench-per-condition", cfg);
  json per = json::array();
  for (std::size_t k = 0; k < bench.pgnc_reports.size(); ++k)
    per.push_back({{"condition", condition_json(cfg.eval.conditions[k])},
                   {"pgnc", report_json(bench.pgnc_reports[k])},
                   {"grape", report_json(bench.grape_reports[k])}});
  j["per_condition"] = per;
  j["rows"] = bench.rows.size();
  j["files"] = {{"table", "bench_per_condition.csv"}};
  write_summary(cfg, j);
  std::printf("bench-per-condition: %zu rows over %zu conditions\n",
              bench.rows.size(), cfg.eval.conditions.size());
  return 0;
}

// Finite-difference validation of the reverse-accumulation gradient on a
// small instance: 10 steps at the production step duration, 2 sub-steps,
// 4 states, 1 condition, >= 50 coordinates across 3 seeds.
int cmd_gradcheck(const RunConfig& cfg) {
  Problem prob = cfg.problem;
  prob.device.n_steps = 10;
  prob.device.gate_time = 10.0;
  prob.substeps = 2;

  const double step = 1e-5, tol = 1e-4, gate = 1e-8;
  bool pass = true;
  double worst = 0.0;
  int checked_total = 0;
  for (int s = 0; s < 3; ++s) {
    RngStream rng = RngStream::derive(cfg.seed, "gradcheck", s);
    StateEnsemble ens;
    ens.n_levels = prob.device.n_levels;
    for (int m = 0; m < 4; ++m) {
      const auto psi = haar_random_two_qubit_state(rng);
      ens.states.push_back(
          {psi, embed_state(apply_cz(psi), ens.n_levels), StateTag::kHaar});
    }
    const auto theta = init_params(rng, prob.controller);
    const ConditionVector c{rng.uniform(0.0, 0.25), rng.uniform(0.0, 0.25),
                            rng.uniform(-0.25, 0.0)};
    const std::vector<ConditionVector> conds{c};
    const auto res = loss_and_grad(theta, conds, ens, prob);

    std::vector<int> coords;
    for (int i = 0; i < 17; ++i)
      coords.push_back(static_cast<int>(rng.uniform() * theta.count()));
    const RVector fd = finite_diff_grad(theta, conds, ens, prob, step, &coords);
    for (int i : coords) {
      const double a = res.grad(i), f = fd(i);
      const double mag = std::max(std::abs(a), std::abs(f));
      if (mag <= gate) continue;
      ++checked_total;
      const double rel = std::abs(a - f) / mag;
      worst = std::max(worst, rel);
      if (rel > tol) pass = false;
    }
  }
  std::printf("gradcheck: %d coordinates checked, worst relative error %.3e "
              "(tolerance %.0e) -> %s\n",
              checked_total, worst, tol, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

// Constant-Jzz analytic CZ oracle on the 16-state product ensemble.
int cmd_oracle_check(const RunConfig& cfg) {
  Problem prob = cfg.problem;
  prob.device.t1_1 = prob.device.t1_2 = prob.device.t2_1 = prob.device.t2_2 =
      std::numeric_limits<double>::infinity();
  prob.xtalk.r0 = 0.0;
  prob.xtalk.eps_1 = prob.xtalk.eps_2 = 0.0;

  WaveformGrid wave;
  wave.gate_time = prob.device.gate_time;
  wave.env_steepness = prob.controller.env_steepness;
  const int n = prob.device.n_steps;
  wave.u = Matrix<double, 7, Eigen::Dynamic>::Zero(7, n);
  wave.u.row(kJzz).setConstant(M_PI / prob.device.gate_time);
  wave.t_grid = RVector::LinSpaced(n, 0.5 * prob.device.gate_time / n,
                                   (n - 0.5) * prob.device.gate_time / n);

  RngStream rng(0);
  const auto ens = build_ensemble(rng, 0, prob.device.n_levels);
  const LindbladPropagator engine(prob.device, prob.xtalk);
  const auto fw = evaluate_condition(engine, wave, {0.0, 0.0, 0.0}, ens,
                                     prob.weights, prob.substeps);
  const double err = std::abs(1.0 - fw.avg_f);
  std::printf("oracle-check: avgF over 16 product states = %.12f "
              "(|1 - avgF| = %.3e, tolerance 1e-06) -> %s\n",
              fw.avg_f, err, err <= 1e-6 ? "PASS" : "FAIL");
  return err <= 1e-6 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditioned neural pulse synthesis for crosstalk-robust CZ "
               "gates: training, baselines, and robustness evaluation"};
  app.require_subcommand(1);

  struct Args {
    std::string config = "default";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
  };
  std::vector<std::pair<std::string, int (*)(RunConfig)>> byvalue = {
      {"train-pgnc", +[](RunConfig c) { return cmd_train_pgnc(std::move(c)); }},
      {"train-grape", +[](RunConfig c) { return cmd_train_grape(std::move(c)); }},
  };
  std::vector<std::pair<std::string, int (*)(const RunConfig&)>> byref = {
      {"eval", +[](const RunConfig& c) { return cmd_eval(c); }},
      {"scan-condition", +[](const RunConfig& c) { return cmd_scan_condition(c); }},
      {"scan-detuning", +[](const RunConfig& c) { return cmd_scan_detuning(c); }},
      {"bench-per-condition", +[](const RunConfig& c) { return cmd_bench(c); }},
      {"gradcheck", +[](const RunConfig& c) { return cmd_gradcheck(c); }},
      {"oracle-check", +[](const RunConfig& c) { return cmd_oracle_check(c); }},
  };

  std::map<std::string, Args> args;
  auto add_common = [&](CLI::App* sub, const std::string& name) {
    auto& a = args[name];
    sub->add_option("--config", a.config,
                    "Config file path, or 'default' for built-in defaults");
    sub->add_option("--seed", a.seed, "Master seed override");
    sub->add_option("--out", a.out, "Output directory override");
  };
  const char* descriptions[] = {
      "Train the conditioned neural controller",
      "Train the static GRAPE baseline at a fixed condition",
      "Evaluate a controller on a Haar ensemble at one condition",
      "Off-grid (c_I, c_Q) generalization scan against static baselines",
      "Average-fidelity map over static two-qubit detuning offsets",
      "Per-condition protocol: re-trained GRAPE vs the conditioned network",
      "Finite-difference validation of the gradient engine",
      "Analytic constant-Jzz CZ oracle check",
  };
  int di = 0;
  for (auto& [name, fn] : byvalue)
    add_common(app.add_subcommand(name, descriptions[di++]), name);
  for (auto& [name, fn] : byref)
    add_common(app.add_subcommand(name, descriptions[di++]), name);

  if (argc <= 1) {
    std::cout << app.help() << std::endl;
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      const std::string name = sub->get_name();
      const Args& a = args[name];
      RunConfig cfg = load_config(a.config);
      if (a.seed) cfg.seed = *a.seed;
      if (a.out) cfg.out_dir = *a.out;
      std::filesystem::create_directories(cfg.out_dir);
      for (auto& [n, fn] : byvalue)
        if (n == name) return fn(std::move(cfg));
      for (auto& [n, fn] : byref)
        if (n == name) return fn(cfg);
    }
    std::cerr << "error: usage: no subcommand\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
