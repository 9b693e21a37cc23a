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
 * @file  reconstruct.hpp
 * @brief Metropolis / simulated-annealing reconstruction on epsilon_prob.
 *
 * Amplitudes start at sqrt(P) on the support V and phases at random points
 * of the candidate (cos, sin) grid. Each step perturbs one phase (and, in
 * dense mode, sometimes one modulus); the move is accepted when epsilon
 * drops, and otherwise with probability exp(-delta / T), T = t0 * gamma^t.
 */

#ifndef TWOBASE_RECONSTRUCT_HPP
#define TWOBASE_RECONSTRUCT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "twobase/measure.hpp"
#include "twobase/objective.hpp"
#include "twobase/parallel.hpp"
#include "twobase/state.hpp"

namespace twobase {

/// Bands used when summarizing restarts.
inline constexpr double kHighFidelityEpsilon = 8e-5;
inline constexpr double kLowBandEpsilon = 1e-5;
inline constexpr double kMidBandLow = 1e-2;
inline constexpr double kMidBandHigh = 1e-1;

struct ReconstructionConfig {
  std::size_t iterations = 5000;
  std::size_t restarts = 1;
  double t0 = 0.1;
  /// Geometric cooling factor; unset means T reaches t_final after `iterations` steps.
  std::optional<double> cooling;
  double t_final = 1e-6;
  double phase_step = std::numbers::pi;
  /// Smallest phase proposal half-width; <= 0 means two grid spacings (2 * 10^-c2p).
  double min_phase_step = 0.0;
  double amp_step = 0.05;
  /// Probability that a phase move shifts every non-reference phase by one
  /// common offset (a kick of the reference phase, re-gauged).
  double shift_rate = 0.0;
  bool sparse_mode = true;
  /// Adds the plain Hadamard basis to the measurement set.
  bool three_basis = false;
  PrecisionSpec precision;
  std::uint64_t seed = 0;
  /// Candidate-side channel (known-noise model). none = pure-state fit.
  NoiseModel assumed_noise;
  double support_threshold = kDefaultSupportThreshold;
  /// Stop once the best epsilon is at or below this value.
  double stop_epsilon = 1e-12;
  std::size_t workers = 1;

  double gamma() const {
    if (cooling) return *cooling;
    if (iterations == 0) return 1.0;
    return std::pow(t_final / t0, 1.0 / static_cast<double>(iterations));
  }
  double phase_floor() const { return min_phase_step > 0 ? min_phase_step : 2.0 * std::pow(10.0, -precision.c2p); }

  void validate() const {
    if (restarts < 1) throw Error("ReconstructionConfig: restarts must be >= 1");
    if (!(t0 > 0)) throw Error("ReconstructionConfig: t0 must be positive");
    if (!(t_final > 0)) throw Error("ReconstructionConfig: t_final must be positive");
    const double g = gamma();
    if (iterations > 0 && !(g > 0 && g < 1)) throw Error("ReconstructionConfig: cooling factor must lie in (0, 1)");
    if (!(phase_step > 0) || !(amp_step > 0)) throw Error("ReconstructionConfig: steps must be positive");
    if (support_threshold < 0) throw Error("ReconstructionConfig: negative support threshold");
    if (!(shift_rate >= 0 && shift_rate <= 1)) throw Error("ReconstructionConfig: shift_rate must lie in [0, 1]");
    precision.validate();
    assumed_noise.validate();
  }
};

struct TracePoint {
  std::size_t iteration = 0;
  double epsilon = 0;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
};

struct ReconstructionResult {
  PureState state;
  double epsilon = 0;
  std::vector<TracePoint> trace;
  std::optional<double> fidelity;
  std::size_t accepted_moves = 0;
  std::size_t iterations_run = 0;
  std::uint64_t seed = 0;
};

struct AmplitudeEstimate {
  std::vector<double> r;
  SparseSupport support;
};

/// r_k = sqrt(P_k) on the support, zero elsewhere. Under a known noise model
/// the channel is inverted first.
inline AmplitudeEstimate amplitudes_from_P(const ProbDist& p, double threshold = kDefaultSupportThreshold,
                                           const NoiseModel& noise = {}) {
  for (double v : p.values)
    if (v < -kNegativeClip || !std::isfinite(v)) throw Error("amplitudes_from_P: invalid distribution (negative mass)");
  std::vector<double> clean = noise.kind == NoiseModel::Kind::none ? p.values : invert_noise(p.values, noise);
  for (double& v : clean) v = std::max(0.0, v);
  AmplitudeEstimate out;
  out.support = support_of(clean, threshold);
  out.r.assign(clean.size(), 0.0);
  for (std::size_t k : out.support.support) out.r[k] = std::sqrt(clean[k]);
  return out;
}

namespace detail {

/// Rounded (cos phi, sin phi) with one renormalize-and-re-round repair.
inline std::optional<std::pair<double, double>> grid_phase(double phi, int decimals, int n_exp) {
  double c = round_decimal(std::cos(phi), decimals), s = round_decimal(std::sin(phi), decimals);
  if (phase_norm_ok(c, s, n_exp)) return std::make_pair(c, s);
  const double h = std::hypot(std::cos(phi), std::sin(phi));
  c = round_decimal(std::cos(phi) / h, decimals);
  s = round_decimal(std::sin(phi) / h, decimals);
  if (phase_norm_ok(c, s, n_exp)) return std::make_pair(c, s);
  return std::nullopt;
}

/// Moduli rounded to `decimals` after scaling to unit norm; nullopt when
/// amplitude normalization cannot be met.
inline std::optional<std::vector<double>> grid_moduli(std::vector<double> r, int decimals, int n_exp) {
  double s2 = 0;
  for (double v : r) s2 += v * v;
  if (!(s2 > 0)) return std::nullopt;
  const double inv = 1.0 / std::sqrt(s2);
  for (double& v : r) v = round_decimal(v * inv, decimals);
  if (!amplitude_norm_ok(r, n_exp)) return std::nullopt;
  return r;
}

inline double support_fidelity(const PureState& truth, double truth_norm2, const std::vector<std::size_t>& support,
                               const std::vector<cplx>& gamma) {
  cplx overlap{};
  double n2 = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    overlap += std::conj(truth[support[i]]) * gamma[i];
    n2 += std::norm(gamma[i]);
  }
  if (!(n2 > 0)) return 0.0;
  return std::clamp(std::norm(overlap) / (truth_norm2 * n2), 0.0, 1.0);
}

}  // namespace detail

/// One proposal: a uniform phase kick on a random non-reference support
/// index and, outside sparse mode, a modulus kick with probability 1/2.
/// The result is re-quantized on the candidate side.
inline PureState propose(const PureState& current, const SparseSupport& support, std::mt19937_64& rng, double phase_step,
                         double amp_step, bool sparse_mode, const PrecisionSpec& precision) {
  const PureState cur = current.quantized() ? current : quantize(current, precision, QuantizeSide::candidate);
  const std::size_t g = cur.reference_index();
  std::vector<std::size_t> movable;
  for (std::size_t k : support.support)
    if (k != g && k < cur.dim()) movable.push_back(k);
  if (movable.empty()) return current;

  GridCoords grid = *cur.grid();
  const std::size_t k = movable[std::uniform_int_distribution<std::size_t>(0, movable.size() - 1)(rng)];
  const double delta = std::uniform_real_distribution<double>(-phase_step, phase_step)(rng);
  if (delta != 0.0) {
    const double phi = std::atan2(grid.sin[k], grid.cos[k]) + delta;
    if (auto cs = detail::grid_phase(phi, precision.c2p, precision.n4)) {
      grid.cos[k] = cs->first;
      grid.sin[k] = cs->second;
    }
  }
  if (!sparse_mode && std::bernoulli_distribution(0.5)(rng)) {
    const double dr = std::uniform_real_distribution<double>(-amp_step, amp_step)(rng);
    if (dr != 0.0) {
      std::vector<double> r = grid.r;
      r[k] = std::max(0.0, r[k] + dr);
      if (auto rr = detail::grid_moduli(r, precision.c1p, precision.n3)) grid.r = *rr;
    }
  }
  std::vector<cplx> amp(cur.dim());
  for (std::size_t i = 0; i < amp.size(); ++i) amp[i] = grid.r[i] * cplx(grid.cos[i], grid.sin[i]);
  return quantize(PureState(std::move(amp), std::move(grid)), precision, QuantizeSide::candidate);
}


/// Computational, second and (optionally) plain-Hadamard bases.
inline std::vector<MeasurementBasis> make_bases(const MeasurementBasis& second, bool three_basis) {
  std::vector<MeasurementBasis> out{computational_basis(second.dim), second};
  if (three_basis) out.push_back(hadamard_basis(second.qubits()));
  return out;
}

/// Exact target distributions of `state` in every basis, with an optional channel.
inline std::vector<ProbDist> measure_all(const PureState& state, const std::vector<MeasurementBasis>& bases,
                                         const NoiseModel& noise = {}) {
  std::vector<ProbDist> out;
  for (const auto& b : bases) out.push_back(apply_noise(prob_in_basis(state, b), noise));
  return out;
}

/// Single annealing run; deterministic per config.seed. When `truth` is
/// given, the result and trace carry fidelities against it.
inline ReconstructionResult anneal(const std::vector<ProbDist>& targets, const std::vector<MeasurementBasis>& bases,
                                   const ReconstructionConfig& config, const PureState* truth = nullptr) {
  config.validate();
  if (targets.size() < 2 || targets.size() > 3) throw Error("anneal: two or three target distributions required");
  if (bases.size() != targets.size()) throw Error("anneal: one basis per target required");
  if (bases.front().kind != BasisKind::computational) throw Error("anneal: first basis must be computational");
  const std::size_t d = bases.front().dim;
  if (truth && truth->dim() != d) throw Error("anneal: truth dimension mismatch");
  const PrecisionSpec& ps = config.precision;

  const AmplitudeEstimate est = amplitudes_from_P(targets.front(), config.support_threshold, config.assumed_noise);
  const std::vector<std::size_t>& support = est.support.support;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Random phases on the candidate grid; quantize fixes the gauge.
  std::vector<cplx> init(d, cplx{});
  for (std::size_t k : support) init[k] = std::polar(est.r[k], kTwoPi * unit(rng));
  const PureState start = quantize(PureState(std::move(init)), ps, QuantizeSide::candidate);
  const GridCoords& g0 = *start.grid();
  const std::size_t ref = start.reference_index();

  const std::size_t m = support.size();
  std::vector<double> r(m), c(m), s(m), phi(m);
  std::vector<cplx> gamma(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = support[i];
    r[i] = g0.r[k];
    c[i] = g0.cos[k];
    s[i] = g0.sin[k];
    phi[i] = std::atan2(s[i], c[i]);
    gamma[i] = r[i] * cplx(c[i], s[i]);
  }
  std::vector<std::size_t> movable;
  for (std::size_t i = 0; i < m; ++i)
    if (support[i] != ref && (!config.sparse_mode || r[i] > 0)) movable.push_back(i);

  Objective obj(bases, targets, support, config.assumed_noise);
  obj.reset(gamma);
  const double truth_n2 = truth ? truth->norm2() : 1.0;

  double cur = obj.epsilon();
  double best = cur;
  std::vector<double> best_r = r, best_c = c, best_s = s;
  std::vector<cplx> best_gamma = gamma;

  ReconstructionResult res;
  res.seed = config.seed;
  auto fid_of_best = [&] {
    return truth ? detail::support_fidelity(*truth, truth_n2, support, best_gamma) : std::numeric_limits<double>::quiet_NaN();
  };
  res.trace.push_back({0, best, fid_of_best()});

  const std::size_t cadence = std::max<std::size_t>(1, config.iterations / 300);
  const double gamma_cool = config.gamma();
  const double floor = config.phase_floor();
  double temp = config.t0;
  std::vector<cplx> trial(m);
  std::vector<double> shift_phi, shift_c, shift_s;
  std::size_t t = 0;
  if (!movable.empty() && best > config.stop_epsilon) {
    for (; t < config.iterations; ++t, temp *= gamma_cool) {
      const std::size_t i = movable[std::uniform_int_distribution<std::size_t>(0, movable.size() - 1)(rng)];
      const bool amp_move = !config.sparse_mode && unit(rng) < 0.5;
      const bool shift_move = !amp_move && movable.size() > 1 && config.shift_rate > 0 && unit(rng) < config.shift_rate;
      bool proposed = true;
      double cand = 0;
      double new_phi = phi[i], new_c = c[i], new_s = s[i];
      std::vector<double> new_r;
      const double step = std::max(floor, config.phase_step * temp / config.t0);
      if (amp_move) {
        new_r = r;
        new_r[i] = std::max(0.0, r[i] + config.amp_step * (2.0 * unit(rng) - 1.0));
        if (auto rr = detail::grid_moduli(new_r, ps.c1p, ps.n3)) {
          new_r = std::move(*rr);
          for (std::size_t q = 0; q < m; ++q) trial[q] = new_r[q] * cplx(c[q], s[q]);
          cand = obj.trial_all(trial);
        } else {
          proposed = false;
        }
      } else if (shift_move) {
        const double delta = step * (2.0 * unit(rng) - 1.0);
        shift_phi = phi;
        shift_c = c;
        shift_s = s;
        for (std::size_t q : movable) {
          auto cs = detail::grid_phase(phi[q] + delta, ps.c2p, ps.n4);
          if (!cs) {
            proposed = false;
            break;
          }
          shift_phi[q] = std::remainder(phi[q] + delta, kTwoPi);
          shift_c[q] = cs->first;
          shift_s[q] = cs->second;
        }
        if (proposed) {
          for (std::size_t q = 0; q < m; ++q) trial[q] = r[q] * cplx(shift_c[q], shift_s[q]);
          cand = obj.trial_all(trial);
        }
      } else {
        new_phi = phi[i] + step * (2.0 * unit(rng) - 1.0);
        if (auto cs = detail::grid_phase(new_phi, ps.c2p, ps.n4)) {
          new_c = cs->first;
          new_s = cs->second;
          cand = obj.trial(i, r[i] * cplx(new_c, new_s));
        } else {
          proposed = false;
        }
      }
      const double delta = cand - cur;
      if (proposed && (delta < 0 || unit(rng) < std::exp(-delta / temp))) {
        obj.commit();
        cur = cand;
        ++res.accepted_moves;
        if (amp_move) {
          r = std::move(new_r);
        } else if (shift_move) {
          std::swap(phi, shift_phi);
          std::swap(c, shift_c);
          std::swap(s, shift_s);
        } else {
          phi[i] = std::remainder(new_phi, kTwoPi);
          c[i] = new_c;
          s[i] = new_s;
        }
        if (cur < best) {
          best = cur;
          best_r = r;
          best_c = c;
          best_s = s;
          best_gamma = obj.amplitudes();
        }
      }
      if ((t + 1) % cadence == 0) res.trace.push_back({t + 1, best, fid_of_best()});
      if (best <= config.stop_epsilon) {
        ++t;
        break;
      }
    }
  }
  if (res.trace.back().iteration != t) res.trace.push_back({t, best, fid_of_best()});
  res.iterations_run = t;

  GridCoords grid{ps.c1p, ps.c2p, std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), std::vector<double>(d, 0.0)};
  std::vector<cplx> amp(d, cplx{});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = support[i];
    grid.r[k] = best_r[i];
    if (best_r[i] > 0) {
      grid.cos[k] = best_c[i];
      grid.sin[k] = best_s[i];
    }
    amp[k] = grid.r[k] * cplx(grid.cos[k], grid.sin[k]);
  }
  res.state = PureState(std::move(amp), std::move(grid));
  res.epsilon = best;
  if (truth) res.fidelity = fidelity(*truth, res.state);
  return res;
}

struct BandStats {
  std::size_t count = 0;
  double mean_fidelity = std::numeric_limits<double>::quiet_NaN();
  double std_fidelity = std::numeric_limits<double>::quiet_NaN();
  double min_fidelity = std::numeric_limits<double>::quiet_NaN();
};

struct RestartStats {
  std::size_t trials = 0;
  double mean_epsilon = 0, std_epsilon = 0;
  double mean_fidelity = std::numeric_limits<double>::quiet_NaN();
  double std_fidelity = std::numeric_limits<double>::quiet_NaN();
  BandStats low_band;        // epsilon < 1e-5
  BandStats mid_band;        // 1e-2 < epsilon < 1e-1
  BandStats threshold_band;  // epsilon < 8e-5
};

/// Fidelity statistics over trials with lo < epsilon < hi.
inline BandStats band_stats(const std::vector<double>& eps, const std::vector<double>& fid, double lo, double hi) {
  BandStats b;
  std::vector<double> f;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (eps[i] > lo && eps[i] < hi && !std::isnan(fid[i])) f.push_back(fid[i]);
  b.count = f.size();
  if (f.empty()) return b;
  double s = 0, mn = 1.0;
  for (double v : f) {
    s += v;
    mn = std::min(mn, v);
  }
  b.mean_fidelity = s / static_cast<double>(f.size());
  double var = 0;
  for (double v : f) var += (v - b.mean_fidelity) * (v - b.mean_fidelity);
  b.std_fidelity = std::sqrt(var / static_cast<double>(f.size()));
  b.min_fidelity = mn;
  return b;
}

/// Population mean / std of epsilon and fidelity plus the fixed epsilon bands.
inline RestartStats summarize(const std::vector<double>& eps, const std::vector<double>& fid) {
  RestartStats st;
  st.trials = eps.size();
  if (eps.empty()) return st;
  double s = 0;
  for (double e : eps) s += e;
  st.mean_epsilon = s / static_cast<double>(eps.size());
  double var = 0;
  for (double e : eps) var += (e - st.mean_epsilon) * (e - st.mean_epsilon);
  st.std_epsilon = std::sqrt(var / static_cast<double>(eps.size()));
  const BandStats all = band_stats(eps, fid, -1.0, std::numeric_limits<double>::infinity());
  st.mean_fidelity = all.mean_fidelity;
  st.std_fidelity = all.std_fidelity;
  st.low_band = band_stats(eps, fid, -1.0, kLowBandEpsilon);
  st.mid_band = band_stats(eps, fid, kMidBandLow, kMidBandHigh);
  st.threshold_band = band_stats(eps, fid, -1.0, kHighFidelityEpsilon);
  return st;
}

struct MultiRestartResult {
  ReconstructionResult best;
  std::vector<ReconstructionResult> all;
  RestartStats stats;
};

inline constexpr std::uint64_t kRestartStream = 0x7265737461727473ULL;

/// Seed of restart i: the config seed itself for i = 0, derived otherwise.
inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t i) {
  return i == 0 ? seed : derive_seed(seed, kRestartStream, i);
}

/// `restarts` independent anneals on `config.workers` threads; the best is the
/// lowest epsilon (first index on ties).
inline MultiRestartResult multi_restart(const std::vector<ProbDist>& targets, const std::vector<MeasurementBasis>& bases,
                                        const ReconstructionConfig& config, const PureState* truth = nullptr) {
  config.validate();
  MultiRestartResult out;
  out.all = parallel_map<ReconstructionResult>(config.restarts, config.workers, [&](std::size_t i) {
    ReconstructionConfig c = config;
    c.seed = restart_seed(config.seed, i);
    return anneal(targets, bases, c, truth);
  });
  std::size_t best = 0;
  std::vector<double> eps, fid;
  for (std::size_t i = 0; i < out.all.size(); ++i) {
    if (out.all[i].epsilon < out.all[best].epsilon) best = i;
    eps.push_back(out.all[i].epsilon);
    fid.push_back(out.all[i].fidelity.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  out.best = out.all[best];
  out.stats = summarize(eps, fid);
  return out;
}

}  // namespace twobase

#endif  // TWOBASE_RECONSTRUCT_HPP
