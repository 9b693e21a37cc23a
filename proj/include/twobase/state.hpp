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
 * @file  state.hpp
 * @brief Pure states, decimal quantization to the algebraic-state regime,
 *        and the state metrics used throughout the reconstruction code.
 *
 * A state is stored as its complex amplitude vector. A quantized state also
 * carries its grid coordinates: the modulus r_k and the pair
 * (cos phi_k, sin phi_k), each rounded to a fixed number of decimals. The
 * amplitude of a quantized state is r_k * (cos_k + i sin_k) with the rounded
 * values, so the state is normalized only to the tolerance the precision
 * spec allows.
 */

#ifndef TWOBASE_STATE_HPP
#define TWOBASE_STATE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "twobase/decimal.hpp"

namespace twobase {

using cplx = std::complex<double>;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Smallest probability counted as "present" in an exact distribution.
inline constexpr double kDefaultSupportThreshold = 1e-9;

/// Wraps an angle into [0, 2pi).
inline double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Number of qubits when `d` is a power of two.
inline std::optional<int> qubits_for_dim(std::size_t d) {
  if (d == 0 || (d & (d - 1)) != 0) return std::nullopt;
  int n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  return n;
}

/// Decimal places for the target state, the candidate state, the basis
/// phase factors and the probability values. Exponents n1..n4 set the
/// normalization tolerances |sum r^2 - 1| < 10^-n1 / 2 and
/// |cos^2 + sin^2 - 1| < 10^-n2 / 2 (n3, n4 for the candidate side).
struct PrecisionSpec {
  int c1 = 3, c2 = 3, c3 = 3;
  int c1p = 3, c2p = 3, c3p = 3;
  int n1 = 2, n2 = 2, n3 = 2, n4 = 2;
  int x = 15, xp = 15;
  int y = 15, yp = 15;

  void validate() const {
    for (int v : {c1, c2, c3, c1p, c2p, c3p, n1, n2, n3, n4, x, xp, y, yp})
      if (v < 0) throw Error("PrecisionSpec: negative decimal count");
    if (c2 != c3 || c2p != c3p) throw Error("PrecisionSpec: cos and sin decimals must match (c2 == c3)");
    const int m = std::max(c1 + c2, c1p + c2p);
    if (x < m || xp < m || y < m || yp < m)
      throw Error("PrecisionSpec: basis and probability decimals must be >= max(c1 + c2, c1p + c2p)");
  }
};

enum class QuantizeSide { target, candidate };

/// Rounded polar coordinates of a quantized state.
struct GridCoords {
  int r_decimals = 0;
  int phase_decimals = 0;
  std::vector<double> r, cos, sin;
};

class PureState {
 public:
  PureState() = default;
  explicit PureState(std::vector<cplx> amplitudes, std::optional<GridCoords> grid = std::nullopt)
      : amp_(std::move(amplitudes)), grid_(std::move(grid)) {
    if (amp_.empty()) throw Error("PureState: empty amplitude vector");
    for (const cplx& a : amp_)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw Error("PureState: non-finite amplitude");
    if (grid_ && grid_->r.size() != amp_.size()) throw Error("PureState: grid size mismatch");
  }

  std::size_t dim() const { return amp_.size(); }
  std::optional<int> qubit_count() const { return qubits_for_dim(amp_.size()); }
  std::span<const cplx> amplitudes() const { return amp_; }
  const cplx& operator[](std::size_t k) const { return amp_[k]; }

  double modulus(std::size_t k) const { return std::abs(amp_[k]); }
  double phase(std::size_t k) const { return amp_[k] == cplx{} ? 0.0 : wrap_phase(std::arg(amp_[k])); }

  double norm2() const {
    double s = 0;
    for (const cplx& a : amp_) s += std::norm(a);
    return s;
  }

  /// Smallest index with nonzero amplitude.
  std::size_t reference_index() const {
    for (std::size_t k = 0; k < amp_.size(); ++k)
      if (amp_[k] != cplx{}) return k;
    throw Error("degenerate state");
  }

  const std::optional<GridCoords>& grid() const { return grid_; }
  bool quantized() const { return grid_.has_value(); }

 private:
  std::vector<cplx> amp_;
  std::optional<GridCoords> grid_;
};

/// Multiplies by the global phase that makes the reference amplitude real positive.
inline PureState canonicalize(const PureState& s) {
  const std::size_t g = s.reference_index();
  const cplx gauge = std::conj(s[g]) / std::abs(s[g]);
  std::vector<cplx> out(s.amplitudes().begin(), s.amplitudes().end());
  for (cplx& a : out) a *= gauge;
  out[g] = cplx(std::abs(s[g]), 0.0);
  return PureState(std::move(out));
}

inline PureState normalized(std::vector<cplx> amp) {
  double n2 = 0;
  for (const cplx& a : amp) n2 += std::norm(a);
  if (!(n2 > 0) || !std::isfinite(n2)) throw Error("degenerate state");
  const double inv = 1.0 / std::sqrt(n2);
  for (cplx& a : amp) a *= inv;
  return PureState(std::move(amp));
}

/// State from moduli and phases: normalized, phases reduced mod 2pi, global
/// phase fixed so that the reference (first nonzero) amplitude is real.
inline PureState from_polar(std::span<const double> r, std::span<const double> phi) {
  if (r.size() != phi.size()) throw Error("from_polar: r and phi lengths differ");
  if (r.empty()) throw Error("from_polar: empty input");
  std::vector<cplx> amp(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!std::isfinite(r[k]) || !std::isfinite(phi[k])) throw Error("from_polar: non-finite input");
    if (r[k] < 0) throw Error("from_polar: negative modulus");
    amp[k] = std::polar(r[k], wrap_phase(phi[k]));
  }
  return canonicalize(normalized(std::move(amp)));
}

inline PureState from_polar(std::initializer_list<double> r, std::initializer_list<double> phi) {
  return from_polar(std::span<const double>(r.begin(), r.size()), std::span<const double>(phi.begin(), phi.size()));
}

/// n-qubit state with weight r_j e^{i phi_j} on the one-hot index 2^(j-1).
inline PureState w_like(int n, std::span<const double> r, std::span<const double> phi) {
  if (n < 2) throw Error("w_like: need at least two qubits");
  if (static_cast<int>(r.size()) != n || static_cast<int>(phi.size()) != n)
    throw Error("w_like: weights must have length n");
  if (n > 30) throw Error("w_like: too many qubits");
  const std::size_t d = std::size_t{1} << n;
  std::vector<double> rr(d, 0.0), pp(d, 0.0);
  for (int j = 0; j < n; ++j) {
    rr[std::size_t{1} << j] = r[j];
    pp[std::size_t{1} << j] = phi[j];
  }
  if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; })) throw Error("degenerate state");
  return from_polar(rr, pp);
}

/// r0 |0...0> + r1 e^{i phi} |1...1>, normalized.
inline PureState ghz_like(int n, double r0, double r1, double phi) {
  if (n < 2) throw Error("ghz_like: need at least two qubits");
  if (n > 30) throw Error("ghz_like: too many qubits");
  if (r0 == 0.0 && r1 == 0.0) throw Error("degenerate state");
  const std::size_t d = std::size_t{1} << n;
  std::vector<double> rr(d, 0.0), pp(d, 0.0);
  rr[0] = r0;
  rr[d - 1] = r1;
  pp[d - 1] = phi;
  return from_polar(rr, pp);
}

class QuantizationError : public Error {
 public:
  using Error::Error;
};

inline bool amplitude_norm_ok(std::span<const double> r, int n_exp) {
  double s = 0;
  for (double v : r) s += v * v;
  return std::abs(s - 1.0) < 0.5 * std::pow(10.0, -n_exp);
}

inline bool phase_norm_ok(double c, double s, int n_exp) {
  return std::abs(c * c + s * s - 1.0) < 0.5 * std::pow(10.0, -n_exp);
}

/// Rounds r_k, cos phi_k and sin phi_k to the decimals of the chosen side
/// and checks both normalization tolerances. One renormalize-and-re-round
/// pass is attempted before giving up. A state that already carries grid
/// coordinates is re-rounded from those coordinates, so quantize is
/// idempotent.
inline PureState quantize(const PureState& state, const PrecisionSpec& spec, QuantizeSide side) {
  const bool target = side == QuantizeSide::target;
  const int cr = target ? spec.c1 : spec.c1p;
  const int cp = target ? spec.c2 : spec.c2p;
  const int na = target ? spec.n1 : spec.n3;
  const int np = target ? spec.n2 : spec.n4;
  const std::size_t d = state.dim();

  std::vector<double> r(d), c(d), s(d);
  if (state.grid()) {
    r = state.grid()->r;
    c = state.grid()->cos;
    s = state.grid()->sin;
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      r[k] = std::abs(state[k]);
      c[k] = r[k] > 0 ? state[k].real() / r[k] : 1.0;
      s[k] = r[k] > 0 ? state[k].imag() / r[k] : 0.0;
    }
  }

  GridCoords g{cr, cp, std::vector<double>(d), std::vector<double>(d), std::vector<double>(d)};
  auto round_moduli = [&](double scale) {
    for (std::size_t k = 0; k < d; ++k) g.r[k] = round_decimal(r[k] * scale, cr);
  };
  round_moduli(1.0);
  if (!amplitude_norm_ok(g.r, na)) {
    double s2 = 0;
    for (double v : g.r) s2 += v * v;
    if (!(s2 > 0)) throw QuantizationError("quantization infeasible: every modulus rounds to zero");
    round_moduli(1.0 / std::sqrt(s2));
    if (!amplitude_norm_ok(g.r, na)) throw QuantizationError("quantization infeasible: amplitude normalization");
  }

  std::size_t ref = d;
  for (std::size_t k = 0; k < d; ++k)
    if (g.r[k] > 0) {
      ref = k;
      break;
    }
  if (ref == d) throw QuantizationError("quantization infeasible: every modulus rounds to zero");

  // Re-gauge so the reference phase is exactly zero on the grid.
  const double c_ref = c[ref], s_ref = s[ref];
  const double ref_norm = std::hypot(c_ref, s_ref);
  for (std::size_t k = 0; k < d; ++k) {
    if (g.r[k] == 0.0) {
      g.cos[k] = 1.0;
      g.sin[k] = 0.0;
      continue;
    }
    double ck = c[k], sk = s[k];
    if (k == ref) {
      ck = 1.0;
      sk = 0.0;
    } else if (!(c_ref == 1.0 && s_ref == 0.0)) {
      const double rc = (ck * c_ref + sk * s_ref) / ref_norm;
      const double rs = (sk * c_ref - ck * s_ref) / ref_norm;
      ck = rc;
      sk = rs;
    }
    g.cos[k] = round_decimal(ck, cp);
    g.sin[k] = round_decimal(sk, cp);
    if (!phase_norm_ok(g.cos[k], g.sin[k], np)) {
      const double h = std::hypot(ck, sk);
      g.cos[k] = round_decimal(ck / h, cp);
      g.sin[k] = round_decimal(sk / h, cp);
      if (!phase_norm_ok(g.cos[k], g.sin[k], np)) throw QuantizationError("quantization infeasible: phase normalization");
    }
  }

  std::vector<cplx> amp(d);
  for (std::size_t k = 0; k < d; ++k) amp[k] = g.r[k] * cplx(g.cos[k], g.sin[k]);
  return PureState(std::move(amp), std::move(g));
}

/// Haar-like random state (i.i.d. complex normal amplitudes), quantized on
/// the target side. Pure function of (d, seed, spec).
inline PureState random_state(std::size_t d, std::uint64_t seed, const PrecisionSpec& spec) {
  if (d < 2) throw Error("random_state: dimension must be >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> amp(d);
  for (cplx& a : amp) {
    const double re = normal(rng);
    const double im = normal(rng);
    a = cplx(re, im);
  }
  return quantize(canonicalize(normalized(std::move(amp))), spec, QuantizeSide::target);
}

/// |<psi|phi>|^2 / (<psi|psi><phi|phi>). The normalization only matters for
/// quantized states, whose norm differs from one by the rounding residue.
inline double fidelity(const PureState& psi, const PureState& phi) {
  if (psi.dim() != phi.dim()) throw Error("fidelity: dimension mismatch");
  cplx overlap{};
  for (std::size_t k = 0; k < psi.dim(); ++k) overlap += std::conj(psi[k]) * phi[k];
  const double f = std::norm(overlap) / (psi.norm2() * phi.norm2());
  return std::clamp(f, 0.0, 1.0);
}

/// Indices whose probability reaches `threshold`; the reference is the smallest.
struct SparseSupport {
  std::vector<std::size_t> support;
  std::size_t reference = 0;
  double threshold = kDefaultSupportThreshold;

  std::size_t size() const { return support.size(); }
  bool contains(std::size_t k) const { return std::binary_search(support.begin(), support.end(), k); }
};

inline SparseSupport support_of(std::span<const double> p, double threshold = kDefaultSupportThreshold) {
  if (threshold < 0) throw Error("support_of: negative threshold");
  SparseSupport s;
  s.threshold = threshold;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] >= threshold && p[k] > 0) s.support.push_back(k);
  if (s.support.empty()) throw Error("support_of: empty support");
  s.reference = s.support.front();
  return s;
}

}  // namespace twobase

#endif  // TWOBASE_STATE_HPP
