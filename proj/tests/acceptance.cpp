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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "twobase/experiments.hpp"

namespace fs = std::filesystem;
using namespace twobase;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path workdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "twobase_acceptance" / name;
  fs::remove_all(p);
  return p;
}

ExperimentConfig experiment(ExperimentKind kind, const std::string& name, json params, std::uint64_t seed = 2026) {
  ExperimentConfig c;
  c.name = name;
  c.kind = kind;
  c.parameters = std::move(params);
  c.output_dir = workdir(name);
  c.seed = seed;
  return c;
}

Outcome ac1_oracle() {
  double worst = 0;
  for (std::size_t d : {2u, 4u, 8u, 64u, 1024u}) {
    const int n = *qubits_for_dim(d);
    const std::vector<MeasurementBasis> bases{qudit_basis(gen_sqrt_prime(static_cast<int>(d), AngleMode::qudit)),
                                              local_basis(n == 1 ? explicit_angles({std::sqrt(2.0)}, AngleMode::qubit_local)
                                                                 : gen_sqrt_prime(n, AngleMode::qubit_local))};
    for (const MeasurementBasis& b : bases) {
      const Eigen::MatrixXcd u = build_unitary(b);
      for (std::uint64_t s = 0; s < 100; ++s) {
        const PureState psi = random_state(d, derive_seed(1, d, s), PrecisionSpec{});
        Eigen::VectorXcd v(d);
        for (std::size_t k = 0; k < d; ++k) v(k) = psi[k];
        const Eigen::VectorXcd out = u.adjoint() * v;
        const ProbDist q = prob_in_basis(psi, b);
        for (std::size_t j = 0; j < d; ++j) worst = std::max(worst, std::abs(q[j] - std::norm(out(j))));
      }
    }
  }
  return {worst < 1e-12, "max |closed form - oracle| = " + fmt("%.3g", worst) + " over 1000 states"};
}

Outcome ac2_constraints() {
  bool ok = true;
  std::string why;
  for (int d = 2; d <= 12; ++d) {
    const AngleSet a = gen_geometric(d, 1.0, AngleMode::qudit);
    if (!a.exact || !check_qudit_constraints(a).valid) ok = false, why += " geometric d=" + std::to_string(d);
  }
  for (int d = 3; d <= 12; ++d) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) v[static_cast<std::size_t>(k)] = 0.25 + 0.5 * k;
    const ConstraintCheck c = check_qudit_constraints(explicit_angles(v, AngleMode::qudit));
    if (c.valid || c.witness.empty()) ok = false, why += " arithmetic d=" + std::to_string(d);
  }
  for (int n = 2; n <= 16; ++n)
    if (!check_local_constraints(gen_geometric(n, 1.0, AngleMode::qubit_local)).valid) ok = false, why += " local n=" + std::to_string(n);
  return {ok, ok ? "qudit geometric d=2..12 valid, arithmetic d=3..12 invalid with witness, local geometric n=2..16 valid" : "failed:" + why};
}

Outcome ac3_threshold() {
  const auto cfg = experiment(ExperimentKind::ensemble, "ac3", json{{"dim", 8}, {"states", 10}, {"restarts", 100}});
  const auto res = run_experiment(cfg);
  const auto violations = res.summary.at("threshold").at("violations").get<std::size_t>();
  const json& band = res.summary.at("pooled").at("threshold_band");
  const auto hits = band.at("count").get<std::size_t>();
  std::string d = std::to_string(hits) + " of 1000 trials below 8e-5, " + std::to_string(violations) + " with fidelity <= 0.99";
  if (hits > 0) d += ", min fidelity " + fmt("%.6f", band.at("min_fidelity").get<double>());
  return {violations == 0 && hits > 0, d};
}

Outcome ac4_wlike() {
  const auto cfg = experiment(ExperimentKind::wlike_scale, "ac4", json{{"qubits", {10, 20}}});
  const auto res = run_experiment(cfg);
  bool ok = true;
  std::string d;
  for (const json& r : res.summary.at("runs")) {
    const double f = r.at("best_fidelity").get<double>();
    ok = ok && f > 0.9999;
    d += "n=" + std::to_string(r.at("qubits").get<int>()) + " fidelity " + fmt("%.8f", f) + "; ";
  }
  return {ok, d};
}

Outcome ac5_ghz() {
  const auto cfg = experiment(ExperimentKind::ghz_demo, "ac5", json{{"qubits", 3}, {"phi", 0.7}});
  const auto res = run_experiment(cfg);
  const auto& s = res.summary;
  return {res.ok, "max |dQ| = " + fmt("%.3g", s.at("max_abs_dQ").get<double>()) + ", fidelity " + fmt("%.6f", s.at("fidelity").get<double>()) +
                      ", twin on 3-decimal grid: " + (s.at("twin_on_grid").get<bool>() ? "yes" : "no")};
}

Outcome ac6_zero_phase() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ph(0, kTwoPi), mod(0.2, 1.0), pert(0.01, std::numbers::pi / 2);
  double min_random = 1, max_zero = 0, min_perturbed = 1;
  for (int t = 0; t < 100000; ++t) {
    const std::size_t d = std::size_t{1} << (1 + t % 6);
    const PureState s = random_state(d, derive_seed(6, 0, static_cast<std::uint64_t>(t)), PrecisionSpec{});
    min_random = std::min(min_random, certify_zero_phase(prob_computational(s), prob_plain_hadamard(s)).deficit);

    const std::size_t dz = std::size_t{1} << (1 + t % 3);
    std::vector<double> r(dz), phi(dz, 0.0);
    for (double& v : r) v = mod(rng);
    const PureState z = from_polar(r, phi);
    max_zero = std::max(max_zero, std::abs(certify_zero_phase(prob_computational(z), prob_plain_hadamard(z)).deficit));

    std::uniform_int_distribution<std::size_t> idx(0, dz - 1);
    const std::size_t a = idx(rng);
    std::size_t b = idx(rng);
    while (b == a) b = idx(rng);
    phi[a] += pert(rng);
    phi[b] -= pert(rng);
    const PureState p = from_polar(r, phi);
    min_perturbed = std::min(min_perturbed, certify_zero_phase(prob_computational(p), prob_plain_hadamard(p)).deficit);
  }
  const bool ok = min_random >= -1e-15 && max_zero < 1e-12 && min_perturbed > 1e-6;
  return {ok, "min deficit (random) " + fmt("%.3g", min_random) + ", max |deficit| (zero phase) " + fmt("%.3g", max_zero) +
                  ", min deficit (perturbed) " + fmt("%.3g", min_perturbed)};
}

Outcome ac7_uniqueness() {
  const auto cfg = experiment(ExperimentKind::uniqueness_audit, "ac7", json{{"dim", 3}, {"targets", 100}, {"grid_size", 360}});
  const auto res = run_experiment(cfg);
  std::string d;
  for (const json& s : res.summary.at("sets"))
    d += s.at("name").get<std::string>() + ": " + std::to_string(s.at("unique").get<std::size_t>()) + " unique, " +
         std::to_string(s.at("multi").get<std::size_t>()) + " multi; ";
  return {res.ok, d};
}

Outcome ac8_noise() {
  const auto sweep = experiment(ExperimentKind::noise_sweep, "ac8_sweep",
                                json{{"dim", 8}, {"noise", "depolarizing"}, {"noise_model", "known"}, {"p_grid", {0.0, 0.01, 0.02}},
                                     {"states", 10}, {"restarts", 100}, {"band", 8e-6}});
  const auto a = run_experiment(sweep);
  bool ok = true;
  std::string d;
  for (const json& lv : a.summary.at("levels")) {
    const auto n = lv.at("band").at("count").get<std::size_t>();
    const double f = n > 0 ? lv.at("band").at("mean_fidelity").get<double>() : 0.0;
    ok = ok && n > 0 && f > 0.99;
    d += "p=" + fmt("%g", lv.at("p").get<double>()) + " band " + std::to_string(n) + " mean " + fmt("%.6f", f) + "; ";
  }
  const auto three = experiment(ExperimentKind::noise_sweep, "ac8_three",
                                json{{"dim", 32}, {"bases", "three_basis"}, {"noise", "depolarizing"}, {"noise_model", "pure"},
                                     {"p_grid", {0.1}}, {"sparse_mode", true}, {"iterations", 400000}, {"t0", 0.01},
                                     {"t_final", 1e-6}, {"amp_step", 0.02}, {"states", 5}, {"restarts", 12}},
                                0);
  const auto b = run_experiment(three);
  const double f3 = b.summary.at("levels").at(0).at("best_epsilon_mean_fidelity").get<double>();
  ok = ok && std::abs(f3 - 0.9561) <= 0.03;
  d += "three-basis n=5 p=0.1 fidelity " + fmt("%.4f", f3);
  return {ok, d};
}

Outcome ac9_determinism() {
  const std::vector<std::pair<ExperimentKind, json>> runs{
      {ExperimentKind::ensemble, json{{"states", 3}, {"restarts", 4}, {"iterations", 2000}}},
      {ExperimentKind::noise_sweep, json{{"p_grid", {0.0, 0.02}}, {"states", 2}, {"restarts", 3}, {"iterations", 2000}}},
      {ExperimentKind::precision_sweep, json{{"xp_grid", {6, 15}}, {"c2p_grid", {3, 5}}, {"states", 2}, {"restarts", 2}, {"iterations", 2000}}},
      {ExperimentKind::wlike_scale, json{{"qubits", {4}}}},
      {ExperimentKind::uniqueness_audit, json{{"targets", 10}, {"grid_size", 120}}},
      {ExperimentKind::ghz_demo, json::object()}};
  bool ok = true;
  std::string d;
  for (const auto& [kind, params] : runs) {
    auto cfg = experiment(kind, "ac9_" + to_string(kind) + "_a", params);
    run_experiment(cfg);
    const std::string first = read_text(cfg.output_dir / "trials.csv");
    cfg.output_dir = workdir("ac9_" + to_string(kind) + "_b");
    cfg.workers = 2;
    run_experiment(cfg);
    const bool same = read_text(cfg.output_dir / "trials.csv") == first;
    ok = ok && same;
    d += to_string(kind) + (same ? " identical; " : " DIFFERS; ");
  }
  return {ok, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 oracle equivalence", ac1_oracle},     {"AC2 constraint checkers", ac2_constraints},
      {"AC3 epsilon threshold", ac3_threshold},   {"AC4 W-like scaling", ac4_wlike},
      {"AC5 GHZ twin", ac5_ghz},                  {"AC6 zero-phase certificate", ac6_zero_phase},
      {"AC7 uniqueness audit", ac7_uniqueness},   {"AC8 noise robustness", ac8_noise},
      {"AC9 determinism", ac9_determinism}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
