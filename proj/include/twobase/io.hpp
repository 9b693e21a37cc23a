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

/**
 * @file  io.hpp
 * @brief JSON and CSV forms of states, angle sets, distributions,
 *        reconstruction results and witness reports.
 *
 * JSON goes through nlohmann::json, whose doubles print as the shortest
 * text that parses back to the same value. CSV fields use 17 significant
 * digits.
 */

#ifndef TWOBASE_IO_HPP
#define TWOBASE_IO_HPP

#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "twobase/bases.hpp"
#include "twobase/measure.hpp"
#include "twobase/reconstruct.hpp"
#include "twobase/state.hpp"

namespace twobase {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- files

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// CSV sink; rows from concurrent writers are serialized.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary);
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    std::lock_guard<std::mutex> lock(mu_);
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << '\n';
    if (!out_) throw Error("write failed: " + path_.string());
  }

  void close() {
    out_.close();
    if (!out_) throw Error("close failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mu_;
};

/// Splits simple comma-separated text (no quoting) into rows of fields.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string f;
    std::istringstream ls(line);
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

// ---------------------------------------------------------------- enums

inline std::string to_string(AngleMode m) { return m == AngleMode::qudit ? "qudit" : "qubit_local"; }
inline AngleMode angle_mode_from(const std::string& s) {
  if (s == "qudit") return AngleMode::qudit;
  if (s == "qubit_local") return AngleMode::qubit_local;
  throw Error("unknown angle mode: " + s);
}

inline std::string to_string(AngleGenerator g) {
  switch (g) {
    case AngleGenerator::geometric: return "geometric";
    case AngleGenerator::sqrt_prime: return "sqrt_prime";
    case AngleGenerator::explicit_values: return "explicit";
  }
  return "?";
}
inline AngleGenerator angle_generator_from(const std::string& s) {
  if (s == "geometric") return AngleGenerator::geometric;
  if (s == "sqrt_prime") return AngleGenerator::sqrt_prime;
  if (s == "explicit") return AngleGenerator::explicit_values;
  throw Error("unknown angle generator: " + s);
}

inline BasisKind basis_kind_from(const std::string& s) {
  for (BasisKind k : {BasisKind::computational, BasisKind::qudit_fourier_phase, BasisKind::qubit_local_phase,
                      BasisKind::plain_hadamard})
    if (s == to_string(k)) return k;
  throw Error("unknown basis kind: " + s);
}

// ---------------------------------------------------------------- precision

inline json to_json(const PrecisionSpec& p) {
  return json{{"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}, {"c1p", p.c1p}, {"c2p", p.c2p}, {"c3p", p.c3p}, {"n1", p.n1},
              {"n2", p.n2}, {"n3", p.n3},   {"n4", p.n4},   {"x", p.x},     {"xp", p.xp},   {"y", p.y},   {"yp", p.yp}};
}

inline PrecisionSpec precision_from_json(const json& j) {
  PrecisionSpec p;
  auto get = [&](const char* key, int& field) {
    if (j.contains(key)) field = j.at(key).get<int>();
  };
  get("c1", p.c1);
  get("c2", p.c2);
  get("c3", p.c3);
  get("c1p", p.c1p);
  get("c2p", p.c2p);
  get("c3p", p.c3p);
  get("n1", p.n1);
  get("n2", p.n2);
  get("n3", p.n3);
  get("n4", p.n4);
  get("x", p.x);
  get("xp", p.xp);
  get("y", p.y);
  get("yp", p.yp);
  p.validate();
  return p;
}

// ---------------------------------------------------------------- states

inline json to_json(const PureState& s, const std::optional<PrecisionSpec>& precision = std::nullopt) {
  json amps = json::array();
  for (const cplx& a : s.amplitudes()) amps.push_back(json::array({a.real(), a.imag()}));
  json out{{"dim", s.dim()}, {"amplitudes", amps}};
  out["precision"] = precision ? to_json(*precision) : json::object();
  if (s.grid()) {
    const GridCoords& g = *s.grid();
    out["grid"] = json{{"r_decimals", g.r_decimals}, {"phase_decimals", g.phase_decimals}, {"r", g.r}, {"cos", g.cos}, {"sin", g.sin}};
  }
  return out;
}

inline PureState state_from_json(const json& j) {
  try {
    const std::size_t d = j.at("dim").get<std::size_t>();
    const json& a = j.at("amplitudes");
    if (a.size() != d) throw Error("state: dim does not match the amplitude count");
    std::vector<cplx> amp;
    amp.reserve(d);
    for (const json& p : a) {
      if (!p.is_array() || p.size() != 2) throw Error("state: amplitudes must be [re, im] pairs");
      amp.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    std::optional<GridCoords> grid;
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      grid = GridCoords{g.at("r_decimals").get<int>(), g.at("phase_decimals").get<int>(), g.at("r").get<std::vector<double>>(),
                        g.at("cos").get<std::vector<double>>(), g.at("sin").get<std::vector<double>>()};
    }
    return PureState(std::move(amp), std::move(grid));
  } catch (const json::exception& e) {
    throw Error(std::string("state: ") + e.what());
  }
}

// ---------------------------------------------------------------- angle sets

inline json to_json(const AngleSet& a) {
  json out{{"mode", to_string(a.mode)}, {"generator", to_string(a.generator)}, {"z0", a.z0}, {"angles", a.angles}};
  if (a.exact) out["exact"] = json{{"numerators", a.exact->numerators}, {"denominator", a.exact->denominator}};
  const char* status = a.check.kind == CheckStatus::Kind::valid     ? "valid"
                       : a.check.kind == CheckStatus::Kind::invalid ? "invalid"
                                                                    : "unchecked";
  out["check"] = json{{"status", status}, {"witness", a.check.witness}};
  return out;
}

inline AngleSet angles_from_json(const json& j) {
  try {
    AngleSet a;
    a.mode = angle_mode_from(j.at("mode").get<std::string>());
    a.generator = j.contains("generator") ? angle_generator_from(j.at("generator").get<std::string>())
                                          : AngleGenerator::explicit_values;
    a.z0 = j.value("z0", 0.0);
    a.angles = j.at("angles").get<std::vector<double>>();
    if (j.contains("exact"))
      a.exact = ExactCoeffs{j.at("exact").at("numerators").get<std::vector<std::int64_t>>(),
                            j.at("exact").at("denominator").get<std::int64_t>()};
    if (j.contains("check")) {
      const std::string s = j.at("check").value("status", "unchecked");
      a.check.kind = s == "valid" ? CheckStatus::Kind::valid : s == "invalid" ? CheckStatus::Kind::invalid : CheckStatus::Kind::unchecked;
      a.check.witness = j.at("check").value("witness", "");
    }
    return a;
  } catch (const json::exception& e) {
    throw Error(std::string("angle set: ") + e.what());
  }
}

// ---------------------------------------------------------------- noise

inline json to_json(const NoiseModel& n) {
  const char* kind = n.kind == NoiseModel::Kind::none           ? "none"
                     : n.kind == NoiseModel::Kind::depolarizing ? "depolarizing"
                                                                : "measurement_bitflip";
  return json{{"kind", kind}, {"p", n.p}};
}

inline NoiseModel noise_from_json(const json& j) {
  NoiseModel n;
  const std::string k = j.value("kind", "none");
  if (k == "none") n.kind = NoiseModel::Kind::none;
  else if (k == "depolarizing") n.kind = NoiseModel::Kind::depolarizing;
  else if (k == "measurement_bitflip" || k == "bitflip") n.kind = NoiseModel::Kind::measurement_bitflip;
  else throw Error("unknown noise kind: " + k);
  n.p = j.value("p", 0.0);
  n.validate();
  return n;
}

// ---------------------------------------------------------------- distributions

inline std::string dist_to_csv(const ProbDist& d) {
  std::string out = "outcome,probability\n";
  for (std::size_t j = 0; j < d.size(); ++j) out += std::to_string(j) + "," + format_g17(d[j]) + "\n";
  return out;
}

inline json dist_sidecar(const ProbDist& d) {
  return json{{"basis", to_string(d.basis)},
              {"kind", d.kind == DistKind::exact ? "exact" : "sampled"},
              {"shots", d.shots},
              {"noise", d.noise}};
}

inline ProbDist dist_from_csv(const std::string& text, const json& sidecar = json::object()) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows.front() != std::vector<std::string>{"outcome", "probability"})
    throw Error("distribution CSV: expected header outcome,probability");
  ProbDist d;
  d.values.assign(rows.size() - 1, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) throw Error("distribution CSV: row " + std::to_string(i) + " needs two fields");
    const std::size_t j = std::stoull(rows[i][0]);
    if (j >= d.values.size()) throw Error("distribution CSV: outcome index out of range");
    d.values[j] = std::stod(rows[i][1]);
  }
  if (sidecar.contains("basis")) d.basis = basis_kind_from(sidecar.at("basis").get<std::string>());
  if (sidecar.contains("kind")) d.kind = sidecar.at("kind").get<std::string>() == "sampled" ? DistKind::sampled : DistKind::exact;
  d.shots = sidecar.value("shots", std::size_t{0});
  d.noise = sidecar.value("noise", std::string("none"));
  return d;
}

// ---------------------------------------------------------------- reconstruction

inline json to_json(const ReconstructionConfig& c) {
  json out{{"iterations", c.iterations},
           {"restarts", c.restarts},
           {"t0", c.t0},
           {"cooling", c.gamma()},
           {"t_final", c.t_final},
           {"phase_step", c.phase_step},
           {"min_phase_step", c.phase_floor()},
           {"amp_step", c.amp_step},
           {"shift_rate", c.shift_rate},
           {"sparse_mode", c.sparse_mode},
           {"bases", c.three_basis ? "three_basis" : "two_basis"},
           {"precision", to_json(c.precision)},
           {"seed", c.seed},
           {"assumed_noise", to_json(c.assumed_noise)},
           {"support_threshold", c.support_threshold},
           {"stop_epsilon", c.stop_epsilon}};
  return out;
}

inline ReconstructionConfig config_from_json(const json& j) {
  ReconstructionConfig c;
  c.iterations = j.value("iterations", c.iterations);
  c.restarts = j.value("restarts", c.restarts);
  c.t0 = j.value("t0", c.t0);
  if (j.contains("cooling") && !j.contains("t_final")) c.cooling = j.at("cooling").get<double>();
  c.t_final = j.value("t_final", c.t_final);
  c.phase_step = j.value("phase_step", c.phase_step);
  c.min_phase_step = j.value("min_phase_step", c.min_phase_step);
  c.amp_step = j.value("amp_step", c.amp_step);
  c.shift_rate = j.value("shift_rate", c.shift_rate);
  c.sparse_mode = j.value("sparse_mode", c.sparse_mode);
  c.three_basis = j.value("bases", std::string("two_basis")) == "three_basis";
  if (j.contains("precision")) c.precision = precision_from_json(j.at("precision"));
  c.seed = j.value("seed", c.seed);
  if (j.contains("assumed_noise")) c.assumed_noise = noise_from_json(j.at("assumed_noise"));
  c.support_threshold = j.value("support_threshold", c.support_threshold);
  c.stop_epsilon = j.value("stop_epsilon", c.stop_epsilon);
  c.validate();
  return c;
}

inline json to_json(const ReconstructionResult& r, const ReconstructionConfig& c) {
  json trace = json::array();
  for (const TracePoint& t : r.trace) trace.push_back(json::array({t.iteration, t.epsilon}));
  json out{{"epsilon", r.epsilon}};
  out["fidelity"] = r.fidelity ? json(*r.fidelity) : json(nullptr);
  out["state"] = to_json(r.state, c.precision);
  out["trace"] = std::move(trace);
  out["config"] = to_json(c);
  out["accepted_moves"] = r.accepted_moves;
  out["iterations_run"] = r.iterations_run;
  out["seed"] = r.seed;
  return out;
}

// ---------------------------------------------------------------- witnesses

inline json witness_report(const AngleSet& angles, const std::vector<PureState>& matches, double tol, std::size_t grid) {
  json m = json::array();
  for (const PureState& s : matches) m.push_back(to_json(s));
  return json{{"angle_set", to_json(angles)}, {"matches", m}, {"tol", tol}, {"grid", grid}};
}

}  // namespace twobase

#endif  // TWOBASE_IO_HPP
