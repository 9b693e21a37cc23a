// Copyright 2026 The twobase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// twobase_cli: states, bases, distributions, reconstruction and the batch
// experiments from the command line.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twobase/twobase.hpp"

namespace fs = std::filesystem;
using namespace twobase;

namespace {

struct AngleOptions {
  std::string file;
  std::string generator = "sqrt_prime";
  std::string mode;
  int count = 0;
  double z0 = 1.0;
  std::vector<double> values;

  void add(CLI::App* app) {
    app->add_option("--angles-file", file, "Angle set JSON");
    app->add_option("--generator", generator, "sqrt_prime | geometric | explicit")->check(CLI::IsMember({"sqrt_prime", "geometric", "explicit"}));
    app->add_option("--mode", mode, "qudit | qubit_local")->check(CLI::IsMember({"qudit", "qubit_local"}));
    app->add_option("--count", count, "Number of angles");
    app->add_option("--z0", z0, "Geometric base angle");
    app->add_option("--angles", values, "Explicit angle values")->delimiter(',');
  }

  AngleSet build(std::size_t dim) const {
    if (!file.empty()) return angles_from_json(read_json(file));
    const bool pow2 = qubits_for_dim(dim).has_value();
    const AngleMode m = mode.empty() ? (pow2 ? AngleMode::qubit_local : AngleMode::qudit) : angle_mode_from(mode);
    if (generator == "explicit" || !values.empty()) return explicit_angles(values, m);
    int n = count;
    if (n == 0) n = m == AngleMode::qudit ? static_cast<int>(dim) : *qubits_for_dim(dim);
    return generator == "geometric" ? gen_geometric(n, z0, m) : gen_sqrt_prime(n, m);
  }
};

void write_dist(const fs::path& out, const ProbDist& d) {
  write_text(out, dist_to_csv(d));
  fs::path side = out;
  side.replace_extension(".json");
  write_json(side, dist_sidecar(d));
}

ProbDist read_dist(const fs::path& in) {
  fs::path side = in;
  side.replace_extension(".json");
  return dist_from_csv(read_text(in), fs::exists(side) ? read_json(side) : json::object());
}

int run_experiment_cmd(ExperimentKind kind, const std::string& config_file, std::optional<std::uint64_t> seed,
                       const std::string& out, std::size_t workers, bool full_scale) {
  ExperimentConfig cfg;
  if (!config_file.empty()) {
    cfg = experiment_from_json(read_json(config_file));
    if (cfg.kind != kind) throw Error("config kind '" + to_string(cfg.kind) + "' does not match the subcommand");
  } else {
    cfg.kind = kind;
    cfg.name = to_string(kind);
    cfg.output_dir = fs::path("out") / cfg.name;
  }
  if (seed) cfg.seed = *seed;
  if (!out.empty()) cfg.output_dir = out;
  if (workers > 0) cfg.workers = workers;
  cfg.full_scale = cfg.full_scale || full_scale;

  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(cfg);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& f : res.files) std::cout << "wrote " << f.generic_string() << "\n";
  std::cout << to_string(kind) << ": " << (res.ok ? "ok" : "CHECK FAILED") << " (" << format_fixed(sec, 1) << " s)\n";
  const bool controls = kind == ExperimentKind::uniqueness_audit || kind == ExperimentKind::ghz_demo;
  return controls && !res.ok ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twobase: pure-state reconstruction from two measurement bases"};
  app.require_subcommand(1);

  // gen-state
  auto* gen = app.add_subcommand("gen-state", "Generate a quantized state");
  std::string gen_kind = "random", gen_out = "state.json", gen_precision;
  std::size_t gen_dim = 8;
  int gen_qubits = 3;
  double gen_phi = 0.7;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "random | wlike | ghz")->check(CLI::IsMember({"random", "wlike", "ghz"}));
  gen->add_option("--dim", gen_dim, "Dimension (random)");
  gen->add_option("--qubits", gen_qubits, "Qubit count (wlike, ghz)");
  gen->add_option("--phi", gen_phi, "Relative phase (ghz)");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--precision", gen_precision, "Precision JSON");
  gen->add_option("--out", gen_out, "Output JSON");
  gen->callback([&] {
    const PrecisionSpec ps = gen_precision.empty() ? PrecisionSpec{} : precision_from_json(read_json(gen_precision));
    PureState s;
    if (gen_kind == "random") s = random_state(gen_dim, gen_seed, ps);
    else if (gen_kind == "wlike") s = random_wlike(gen_qubits, gen_seed, ps);
    else s = ghz_like(gen_qubits, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), gen_phi);
    write_json(gen_out, to_json(s, ps));
    std::cout << "wrote " << gen_out << "\n";
  });

  // check-basis
  auto* chk = app.add_subcommand("check-basis", "Run the angle-constraint checker");
  AngleOptions chk_angles;
  std::size_t chk_dim = 8, chk_samples = 0;
  std::uint64_t chk_seed = 0;
  chk_angles.add(chk);
  chk->add_option("--dim", chk_dim, "Dimension");
  chk->add_option("--sampled", chk_samples, "Sample this many subsets instead of the exhaustive local check");
  chk->add_option("--seed", chk_seed, "Sampling seed");
  int chk_status = 0;
  chk->callback([&] {
    AngleSet a = chk_angles.build(chk_dim);
    const ConstraintCheck c = a.mode == AngleMode::qudit ? check_qudit_constraints(a)
                              : chk_samples > 0          ? check_local_constraints_sampled(a, chk_samples, chk_seed)
                                                         : check_local_constraints(a);
    a.check.kind = c.valid ? CheckStatus::Kind::valid : CheckStatus::Kind::invalid;
    a.check.witness = c.witness;
    std::cout << to_json(a).dump(2) << "\n";
    chk_status = c.valid ? 0 : 2;
  });

  // measure
  auto* mea = app.add_subcommand("measure", "Outcome distribution of a state in one basis");
  std::string mea_state, mea_basis = "second", mea_out = "dist.csv", mea_noise = "none";
  double mea_p = 0;
  std::size_t mea_shots = 0;
  std::uint64_t mea_seed = 0;
  std::optional<int> mea_decimals;
  AngleOptions mea_angles;
  mea->add_option("--state", mea_state, "State JSON")->required();
  mea->add_option("--basis", mea_basis, "computational | second | hadamard")->check(CLI::IsMember({"computational", "second", "hadamard"}));
  mea_angles.add(mea);
  mea->add_option("--basis-decimals", mea_decimals, "Round the basis phase factors");
  mea->add_option("--noise", mea_noise, "none | depolarizing | bitflip")->check(CLI::IsMember({"none", "depolarizing", "bitflip"}));
  mea->add_option("--p", mea_p, "Noise strength");
  mea->add_option("--shots", mea_shots, "Sample this many shots (0 = exact)");
  mea->add_option("--seed", mea_seed, "Sampling seed");
  mea->add_option("--out", mea_out, "Output CSV (a .json sidecar is written next to it)");
  mea->callback([&] {
    const PureState s = state_from_json(read_json(mea_state));
    MeasurementBasis b = computational_basis(s.dim());
    if (mea_basis == "second") b = detail::second_basis(mea_angles.build(s.dim()), mea_decimals);
    if (mea_basis == "hadamard") b = hadamard_basis(*s.qubit_count());
    ProbDist d = apply_noise(prob_in_basis(s, b), noise_from_json(json{{"kind", mea_noise}, {"p", mea_p}}));
    if (mea_shots > 0) d = sample_shots(d, mea_shots, mea_seed);
    write_dist(mea_out, d);
    std::cout << "wrote " << mea_out << "\n";
  });

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Anneal a state from P, Q (and optionally T)");
  std::string rec_p, rec_q, rec_t, rec_config, rec_truth, rec_out = "result.json";
  std::uint64_t rec_seed = 0;
  std::size_t rec_workers = 1;
  std::optional<std::size_t> rec_restarts;
  std::optional<int> rec_decimals;
  AngleOptions rec_angles;
  rec->add_option("--P", rec_p, "Computational-basis distribution CSV")->required();
  rec->add_option("--Q", rec_q, "Second-basis distribution CSV")->required();
  rec->add_option("--T", rec_t, "Plain-Hadamard distribution CSV (three-basis mode)");
  rec_angles.add(rec);
  rec->add_option("--basis-decimals", rec_decimals, "Round the candidate basis phase factors");
  rec->add_option("--config", rec_config, "Reconstruction config JSON");
  rec->add_option("--truth", rec_truth, "True state JSON, for fidelity reporting");
  rec->add_option("--restarts", rec_restarts, "Restart count (default 200, or the config value)");
  rec->add_option("--seed", rec_seed, "Seed");
  rec->add_option("--workers", rec_workers, "Worker threads");
  rec->add_option("--out", rec_out, "Result JSON");
  rec->callback([&] {
    ReconstructionConfig c = rec_config.empty() ? ReconstructionConfig{} : config_from_json(read_json(rec_config));
    c.seed = rec_seed;
    c.workers = rec_workers;
    if (rec_restarts) c.restarts = *rec_restarts;
    else if (rec_config.empty()) c.restarts = 200;
    std::vector<ProbDist> targets{read_dist(rec_p), read_dist(rec_q)};
    if (!rec_t.empty()) {
      targets.push_back(read_dist(rec_t));
      c.three_basis = true;
    }
    const std::size_t d = targets.front().size();
    const auto bases = make_bases(detail::second_basis(rec_angles.build(d), rec_decimals), c.three_basis);
    std::optional<PureState> truth;
    if (!rec_truth.empty()) truth = state_from_json(read_json(rec_truth));
    const MultiRestartResult r = multi_restart(targets, bases, c, truth ? &*truth : nullptr);
    json out = to_json(r.best, c);
    out["restarts"] = detail::stats_json(r.stats);
    write_json(rec_out, out);
    std::cout << "epsilon " << format_g17(r.best.epsilon);
    if (r.best.fidelity) std::cout << "  fidelity " << format_g17(*r.best.fidelity);
    std::cout << "\nwrote " << rec_out << "\n";
  });

  // Batch experiments share one flag set.
  struct ExpFlags {
    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;
    bool full_scale = false;
  };
  const std::vector<std::pair<std::string, ExperimentKind>> experiments{
      {"ensemble", ExperimentKind::ensemble},
      {"noise-sweep", ExperimentKind::noise_sweep},
      {"precision-sweep", ExperimentKind::precision_sweep},
      {"wlike", ExperimentKind::wlike_scale},
      {"uniqueness-audit", ExperimentKind::uniqueness_audit},
      {"ghz-demo", ExperimentKind::ghz_demo}};
  std::vector<ExpFlags> flags(experiments.size());
  int exp_status = 0;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    auto* sub = app.add_subcommand(experiments[i].first, "Run the " + to_string(experiments[i].second) + " experiment");
    ExpFlags& f = flags[i];
    sub->add_option("--config", f.config, "Experiment config JSON");
    sub->add_option("--seed", f.seed, "Root seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--workers", f.workers, "Worker threads");
    sub->add_flag("--full-scale", f.full_scale, "Use the full published ensemble sizes");
    const ExperimentKind kind = experiments[i].second;
    sub->callback([&, kind, i] {
      const ExpFlags& g = flags[i];
      exp_status = run_experiment_cmd(kind, g.config, g.seed, g.out, g.workers, g.full_scale);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return chk_status != 0 ? chk_status : exp_status;
}
