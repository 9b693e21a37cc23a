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
 * @file  measure.hpp
 * @brief Outcome distributions: pair-sum closed forms for both second bases,
 *        a dense-unitary oracle, noise channels and shot sampling.
 *
 * With u_k = gamma_k conj(w_k) (w_k the diagonal phase factor of the basis):
 *
 *   qudit:  Q_j = (1/d) [ sum |u_k|^2 + 2 Re sum_{s<l} u_s conj(u_l) omega^{-j(s-l)} ]
 *   qubit:  Q_j = (1/2^n) [ sum |u_k|^2 + 2 sum_{s<l} (-1)^{h(j,s)+h(j,l)} Re u_s conj(u_l) ]
 *
 * The pair terms are accumulated by difference (s - l mod d) or by XOR
 * (s ^ l), and then transformed once over j.
 */

#ifndef TWOBASE_MEASURE_HPP
#define TWOBASE_MEASURE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twobase/bases.hpp"
#include "twobase/state.hpp"

namespace twobase {

enum class DistKind { exact, sampled };

/// Outcome distribution. For a quantized state the total equals the squared
/// norm of its rounded amplitudes, which differs from 1 by the rounding residue.
struct ProbDist {
  std::vector<double> values;
  DistKind kind = DistKind::exact;
  std::size_t shots = 0;
  BasisKind basis = BasisKind::computational;
  std::string noise = "none";

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
  double total() const {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }
};

struct NoiseModel {
  enum class Kind { none, depolarizing, measurement_bitflip };
  Kind kind = Kind::none;
  double p = 0.0;

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("NoiseModel: p must lie in [0, 1]");
  }
  std::string describe() const {
    switch (kind) {
      case Kind::none: return "none";
      case Kind::depolarizing: return "depolarizing(" + format_g17(p) + ")";
      case Kind::measurement_bitflip: return "measurement_bitflip(" + format_g17(p) + ")";
    }
    return "?";
  }
};

inline constexpr double kNegativeClip = 1e-14;

/// Clips round-off negatives in [-1e-14, 0) to zero; anything more negative is a bug.
inline void clip_negatives(std::vector<double>& p) {
  for (double& v : p) {
    if (v >= 0) continue;
    if (v < -kNegativeClip) throw Error("negative probability " + format_g17(v));
    v = 0.0;
  }
}

/// In-place unnormalized Walsh-Hadamard transform.
template <class T>
void fwht(std::vector<T>& a) {
  const std::size_t d = a.size();
  for (std::size_t h = 1; h < d; h <<= 1)
    for (std::size_t i = 0; i < d; i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const T x = a[j], y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
}

inline ProbDist prob_computational(const PureState& state) {
  ProbDist out;
  out.values.resize(state.dim());
  for (std::size_t k = 0; k < state.dim(); ++k) out.values[k] = std::norm(state[k]);
  return out;
}

namespace detail {

inline std::vector<std::pair<std::size_t, cplx>> phased_support(const PureState& state, const MeasurementBasis& basis) {
  std::vector<std::pair<std::size_t, cplx>> u;
  std::vector<cplx> f;
  if (basis.kind == BasisKind::qubit_local_phase) f = basis.local_factors();
  for (std::size_t k = 0; k < state.dim(); ++k) {
    if (state[k] == cplx{}) continue;
    cplx w(1, 0);
    if (basis.kind == BasisKind::qudit_fourier_phase) {
      w = basis.phase_factor(basis.angles->angles[k]);
    } else if (basis.kind == BasisKind::qubit_local_phase) {
      for (std::size_t p = 0; p < f.size(); ++p)
        if (k >> p & 1u) w *= f[p];
    }
    u.emplace_back(k, state[k] * std::conj(w));
  }
  return u;
}

}  // namespace detail

/// Second-basis distribution for S' = D F. Pair cost O(|V|^2), transform O(d^2).
inline ProbDist prob_qudit_second(const PureState& state, const MeasurementBasis& basis) {
  if (basis.kind != BasisKind::qudit_fourier_phase) throw Error("prob_qudit_second: basis is not qudit_fourier_phase");
  const std::size_t d = state.dim();
  if (basis.dim != d) throw Error("prob_qudit_second: dimension mismatch");
  const auto u = detail::phased_support(state, basis);

  double diag = 0;
  std::vector<cplx> c(d, cplx{});
  for (std::size_t a = 0; a < u.size(); ++a) {
    diag += std::norm(u[a].second);
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      // s = u[a].first < l = u[b].first; delta = (s - l) mod d.
      const std::size_t delta = (u[a].first + d - u[b].first) % d;
      c[delta] += u[a].second * std::conj(u[b].second);
    }
  }
  std::vector<cplx> omega(d);
  for (std::size_t t = 0; t < d; ++t) omega[t] = std::polar(1.0, -kTwoPi * static_cast<double>(t) / static_cast<double>(d));

  std::vector<std::size_t> live;
  for (std::size_t delta = 0; delta < d; ++delta)
    if (c[delta] != cplx{}) live.push_back(delta);

  ProbDist out;
  out.basis = basis.kind;
  out.values.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0;
    for (std::size_t delta : live) acc += (c[delta] * omega[(j * delta) % d]).real();
    out.values[j] = (diag + 2.0 * acc) / static_cast<double>(d);
  }
  clip_negatives(out.values);
  return out;
}

inline ProbDist prob_qudit_second(const PureState& state, const AngleSet& angles) {
  return prob_qudit_second(state, qudit_basis(angles));
}

/// Second-basis distribution for a product basis (R_n H) x ... x (R_1 H) or
/// H^n. Pair terms are binned by s ^ l and Walsh-transformed: O(|V|^2 + n 2^n).
inline ProbDist prob_qubit_second(const PureState& state, const MeasurementBasis& basis) {
  if (basis.kind != BasisKind::qubit_local_phase && basis.kind != BasisKind::plain_hadamard)
    throw Error("prob_qubit_second: basis is not a qubit product basis");
  const std::size_t d = state.dim();
  if (basis.dim != d) throw Error("prob_qubit_second: dimension mismatch");
  const auto u = detail::phased_support(state, basis);

  std::vector<double> b(d, 0.0);
  for (std::size_t a = 0; a < u.size(); ++a) {
    b[0] += std::norm(u[a].second);
    for (std::size_t c = a + 1; c < u.size(); ++c)
      b[u[a].first ^ u[c].first] += 2.0 * (u[a].second * std::conj(u[c].second)).real();
  }
  fwht(b);
  const double inv = 1.0 / static_cast<double>(d);
  for (double& v : b) v *= inv;
  clip_negatives(b);
  ProbDist out;
  out.basis = basis.kind;
  out.values = std::move(b);
  return out;
}

inline ProbDist prob_qubit_second(const PureState& state, const AngleSet& angles) {
  return prob_qubit_second(state, local_basis(angles));
}

inline ProbDist prob_plain_hadamard(const PureState& state) {
  auto n = state.qubit_count();
  if (!n) throw Error("prob_plain_hadamard: dimension is not a power of two");
  return prob_qubit_second(state, hadamard_basis(*n));
}

/// Distribution of `state` in `basis` via the matching closed form.
inline ProbDist prob_in_basis(const PureState& state, const MeasurementBasis& basis) {
  switch (basis.kind) {
    case BasisKind::computational: return prob_computational(state);
    case BasisKind::qudit_fourier_phase: return prob_qudit_second(state, basis);
    case BasisKind::qubit_local_phase:
    case BasisKind::plain_hadamard: return prob_qubit_second(state, basis);
  }
  throw Error("prob_in_basis: unknown basis");
}

/// p_j = |<j| U^dagger |psi>|^2 with the dense unitary. Independent check of the closed forms.
inline ProbDist prob_oracle(const PureState& state, const MeasurementBasis& basis) {
  if (state.dim() != basis.dim) throw Error("prob_oracle: dimension mismatch");
  const Eigen::MatrixXcd u = build_unitary(basis);
  Eigen::VectorXcd psi(state.dim());
  for (std::size_t k = 0; k < state.dim(); ++k) psi(k) = state[k];
  const Eigen::VectorXcd out = u.adjoint() * psi;
  ProbDist res;
  res.basis = basis.kind;
  res.values.resize(state.dim());
  for (std::size_t j = 0; j < state.dim(); ++j) res.values[j] = std::norm(out(j));
  return res;
}

/// p_j <- (1 - p) p_j + p/d. The maximally mixed state is uniform in every basis.
inline ProbDist apply_depolarizing(const ProbDist& dist, double p) {
  NoiseModel{NoiseModel::Kind::depolarizing, p}.validate();
  ProbDist out = dist;
  const double u = p / static_cast<double>(dist.size());
  for (double& v : out.values) v = (1.0 - p) * v + u;
  out.noise = NoiseModel{NoiseModel::Kind::depolarizing, p}.describe();
  return out;
}

namespace detail {

inline void bit_butterfly(std::vector<double>& v, double keep, double flip) {
  const std::size_t d = v.size();
  for (std::size_t h = 1; h < d; h <<= 1)
    for (std::size_t i = 0; i < d; i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j], b = v[j + h];
        v[j] = keep * a + flip * b;
        v[j + h] = flip * a + keep * b;
      }
}

}  // namespace detail

/// Independent flip of every outcome bit with probability p.
inline ProbDist apply_bitflip(const ProbDist& dist, double p) {
  NoiseModel{NoiseModel::Kind::measurement_bitflip, p}.validate();
  if (!qubits_for_dim(dist.size())) throw Error("apply_bitflip: dimension is not a power of two");
  ProbDist out = dist;
  detail::bit_butterfly(out.values, 1.0 - p, p);
  out.noise = NoiseModel{NoiseModel::Kind::measurement_bitflip, p}.describe();
  return out;
}

inline ProbDist apply_noise(const ProbDist& dist, const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseModel::Kind::none: return dist;
    case NoiseModel::Kind::depolarizing: return apply_depolarizing(dist, noise.p);
    case NoiseModel::Kind::measurement_bitflip: return apply_bitflip(dist, noise.p);
  }
  return dist;
}

/// Inverse of the channel on a single distribution, negatives clipped at zero.
/// Used to estimate amplitudes under a known noise model.
inline std::vector<double> invert_noise(const std::vector<double>& p, const NoiseModel& noise) {
  std::vector<double> v = p;
  const double d = static_cast<double>(p.size());
  switch (noise.kind) {
    case NoiseModel::Kind::none: break;
    case NoiseModel::Kind::depolarizing:
      if (noise.p >= 1.0) throw Error("invert_noise: fully depolarized data carries no state information");
      for (double& x : v) x = (x - noise.p / d) / (1.0 - noise.p);
      break;
    case NoiseModel::Kind::measurement_bitflip: {
      if (std::abs(1.0 - 2.0 * noise.p) < 1e-12) throw Error("invert_noise: bit-flip rate 1/2 is not invertible");
      const double s = 1.0 / (1.0 - 2.0 * noise.p);
      detail::bit_butterfly(v, (1.0 - noise.p) * s, -noise.p * s);
      break;
    }
  }
  for (double& x : v)
    if (x < 0) x = 0.0;
  return v;
}

/// Empirical frequencies of `shots` multinomial draws (conditional binomials).
inline ProbDist sample_shots(const ProbDist& dist, std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw Error("sample_shots: shots must be positive");
  const double total = dist.total();
  if (!(total > 0)) throw Error("sample_shots: empty distribution");
  std::mt19937_64 rng(seed);
  ProbDist out = dist;
  out.kind = DistKind::sampled;
  out.shots = shots;
  std::size_t last = 0;
  for (std::size_t j = 0; j < dist.size(); ++j)
    if (dist.values[j] > 0) last = j;
  std::size_t left = shots;
  double mass_left = 1.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    const double pj = std::max(0.0, dist.values[j] / total);
    std::size_t k = 0;
    if (left > 0 && pj > 0) {
      if (j == last || pj >= mass_left) {
        k = left;
      } else {
        std::binomial_distribution<std::size_t> bin(left, std::clamp(pj / mass_left, 0.0, 1.0));
        k = bin(rng);
      }
    }
    out.values[j] = static_cast<double>(k) / static_cast<double>(shots);
    left -= k;
    mass_left -= pj;
  }
  return out;
}

}  // namespace twobase

#endif  // TWOBASE_MEASURE_HPP
