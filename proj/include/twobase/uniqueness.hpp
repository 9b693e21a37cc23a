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
 * @file  uniqueness.hpp
 * @brief Second-basis difference decomposition, exhaustive phase search,
 *        twin states of product bases and the zero-phase certificate.
 */

#ifndef TWOBASE_UNIQUENESS_HPP
#define TWOBASE_UNIQUENESS_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "twobase/bases.hpp"
#include "twobase/measure.hpp"
#include "twobase/parallel.hpp"
#include "twobase/state.hpp"

namespace twobase {

/// One (s, l) term of Q_j(psi) - Q_j(psi'):
///   c * cos(theta_s - theta_l) + s * sin(theta_s - theta_l).
struct PairTerm {
  std::size_t s = 0, l = 0;
  double c = 0, s_coeff = 0;
  /// Basis relative phase theta_s - theta_l (alpha'_s - alpha'_l for product bases).
  double delta = 0;
};

/// Terms grouped by |delta|: f1 cos(delta) + f2 sin(delta).
struct MergedTerm {
  double delta = 0;
  double f1 = 0, f2 = 0;
  std::size_t pair_count = 0;
};

struct DeltaDecomposition {
  std::size_t j = 0;
  std::vector<PairTerm> pairs;
  std::vector<MergedTerm> merged;
  /// (1/d) sum_k (|gamma_k|^2 - |gamma'_k|^2); zero when moduli agree exactly.
  double diagonal = 0;
  /// Q_j(psi) - Q_j(psi') computed directly.
  double direct = 0;
  /// Every merged coefficient vanishes although psi and psi' differ.
  bool open_case = false;

  double reassembled() const {
    double v = diagonal;
    for (const PairTerm& p : pairs) v += p.c * std::cos(p.delta) + p.s_coeff * std::sin(p.delta);
    return v;
  }
  double reassembled_merged() const {
    double v = diagonal;
    for (const MergedTerm& m : merged) v += m.f1 * std::cos(m.delta) + m.f2 * std::sin(m.delta);
    return v;
  }
};

namespace detail {

/// Basis phase of index k: theta_k (qudit) or sum_p alpha_p k_p (product).
inline double basis_phase(const AngleSet& angles, std::size_t k) {
  if (angles.mode == AngleMode::qudit) return angles.angles.at(k);
  double a = 0;
  for (std::size_t p = 0; p < angles.angles.size(); ++p)
    if (k >> p & 1u) a += angles.angles[p];
  return a;
}

inline std::size_t angle_dim(const AngleSet& angles) {
  if (angles.mode == AngleMode::qudit) return angles.angles.size();
  if (angles.angles.size() > 30) throw Error("too many qubits");
  return std::size_t{1} << angles.angles.size();
}

inline double moduli_gap(const PureState& a, const PureState& b) {
  const bool grids = a.grid() && b.grid();
  double gap = 0;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double ra = grids ? a.grid()->r[k] : a.modulus(k);
    const double rb = grids ? b.grid()->r[k] : b.modulus(k);
    gap = std::max(gap, std::abs(ra - rb));
  }
  return gap;
}

}  // namespace detail

/// Q_j(psi) - Q_j(psi') as a sum over support pairs s < l of
/// C cos(theta_s - theta_l) + S sin(theta_s - theta_l), plus the merged form
/// grouping pairs whose basis relative phases agree up to sign. Both states
/// must share their moduli (within `modulus_tol`; two quantized states are
/// compared on their grid moduli).
inline DeltaDecomposition delta_q_decompose(const PureState& psi, const PureState& psi_prime, const AngleSet& angles,
                                            std::size_t j, double modulus_tol = 1e-10, double merge_tol = 1e-12) {
  const std::size_t d = psi.dim();
  if (psi_prime.dim() != d) throw Error("delta_q_decompose: dimension mismatch");
  if (detail::angle_dim(angles) != d) throw Error("delta_q_decompose: angle set does not match the dimension");
  if (j >= d) throw Error("delta_q_decompose: outcome index out of range");
  if (detail::moduli_gap(psi, psi_prime) > modulus_tol)
    throw Error("delta_q_decompose: amplitude profiles differ (decomposition needs equal P)");

  const bool local = angles.mode == AngleMode::qubit_local;
  const double invd = 1.0 / static_cast<double>(d);
  DeltaDecomposition out;
  out.j = j;

  std::vector<std::size_t> v;
  for (std::size_t k = 0; k < d; ++k) {
    if (psi[k] != cplx{} || psi_prime[k] != cplx{}) v.push_back(k);
    out.diagonal += (std::norm(psi[k]) - std::norm(psi_prime[k])) * invd;
  }

  for (std::size_t a = 0; a < v.size(); ++a) {
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      const std::size_t s = v[a], l = v[b];
      cplx z = psi[s] * std::conj(psi[l]) - psi_prime[s] * std::conj(psi_prime[l]);
      double sign = 1.0;
      if (local) {
        if ((std::popcount(j & s) + std::popcount(j & l)) & 1) sign = -1.0;
      } else {
        const double x = kTwoPi * static_cast<double>((j * ((s + d - l) % d)) % d) * invd;
        z *= std::polar(1.0, -x);
      }
      PairTerm t;
      t.s = s;
      t.l = l;
      t.c = 2.0 * invd * sign * z.real();
      t.s_coeff = 2.0 * invd * sign * z.imag();
      t.delta = detail::basis_phase(angles, s) - detail::basis_phase(angles, l);
      out.pairs.push_back(t);
    }
  }

  // Merge by |delta|; a negated delta keeps f1 and flips f2.
  std::vector<std::size_t> order(out.pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(out.pairs[x].delta) < std::abs(out.pairs[y].delta); });
  for (std::size_t i : order) {
    const PairTerm& p = out.pairs[i];
    const double mag = std::abs(p.delta);
    const double sgn = p.delta < 0 ? -1.0 : 1.0;
    if (out.merged.empty() || mag - out.merged.back().delta > merge_tol * std::max(1.0, mag)) out.merged.push_back({mag, 0, 0, 0});
    MergedTerm& m = out.merged.back();
    m.f1 += p.c;
    m.f2 += sgn * p.s_coeff;
    ++m.pair_count;
  }

  const MeasurementBasis basis = local ? local_basis(angles) : qudit_basis(angles);
  out.direct = prob_in_basis(psi, basis)[j] - prob_in_basis(psi_prime, basis)[j];

  bool all_zero = true;
  for (const MergedTerm& m : out.merged)
    if (std::abs(m.f1) > 1e-12 || std::abs(m.f2) > 1e-12) all_zero = false;
  out.open_case = all_zero && fidelity(psi, psi_prime) < 1.0 - 1e-12;
  return out;
}

enum class PhaseGrid { uniform, decimal };

struct MatchOptions {
  PhaseGrid grid = PhaseGrid::uniform;
  /// Uniform grid size L (phases 2 pi t / L).
  std::size_t grid_size = 360;
  /// Decimal grid: cos and sin rounded to this many decimals.
  int decimals = 2;
  double tol = 1e-8;
  std::uint64_t budget = 100'000'000;
  std::size_t workers = 1;
  double support_threshold = kDefaultSupportThreshold;
};

/// Phase values (as unit-ish complex factors) of one coordinate of the search grid.
inline std::vector<cplx> phase_candidates(const MatchOptions& opt) {
  std::vector<cplx> out;
  if (opt.grid == PhaseGrid::uniform) {
    if (opt.grid_size < 1 || opt.grid_size > 720) throw Error("exhaustive_match: grid size must lie in [1, 720]");
    for (std::size_t t = 0; t < opt.grid_size; ++t)
      out.push_back(std::polar(1.0, kTwoPi * static_cast<double>(t) / static_cast<double>(opt.grid_size)));
    return out;
  }
  if (opt.decimals < 1 || opt.decimals > 4) throw Error("exhaustive_match: decimal grid needs 1..4 decimals");
  // Distinct rounded (cos, sin) pairs met along the circle.
  const std::size_t steps = static_cast<std::size_t>(64 * std::pow(10.0, opt.decimals));
  for (std::size_t t = 0; t < steps; ++t) {
    const double phi = kTwoPi * static_cast<double>(t) / static_cast<double>(steps);
    out.emplace_back(round_decimal(std::cos(phi), opt.decimals), round_decimal(std::sin(phi), opt.decimals));
  }
  auto less = [](const cplx& a, const cplx& b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); };
  std::sort(out.begin(), out.end(), less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Every state with moduli sqrt(P) and reference phase 0 whose second-basis
/// distribution lies within tol (Euclidean) of Q. Phases of the remaining
/// support indices range over the chosen grid.
inline std::vector<PureState> exhaustive_match(const ProbDist& p, const ProbDist& q, const AngleSet& angles,
                                               const MatchOptions& opt = {}) {
  const std::size_t d = p.size();
  if (q.size() != d) throw Error("exhaustive_match: P and Q dimensions differ");
  if (detail::angle_dim(angles) != d) throw Error("exhaustive_match: angle set does not match the dimension");
  const SparseSupport sup = support_of(p.values, opt.support_threshold);
  if (d > 4 && sup.size() > 3) throw Error("exhaustive_match: needs d <= 4 or at most 3 support indices");
  const std::vector<cplx> grid = phase_candidates(opt);
  const std::size_t free = sup.size() - 1;
  const std::size_t g = grid.size();

  double total = 1;
  for (std::size_t i = 0; i < free; ++i) total *= static_cast<double>(g);
  if (total > static_cast<double>(opt.budget))
    throw Error("exhaustive_match: " + std::to_string(static_cast<unsigned long long>(total)) +
                " candidates exceed the budget of " + std::to_string(opt.budget) +
                "; use a coarser grid or raise MatchOptions::budget");

  const bool local = angles.mode == AngleMode::qubit_local;
  const MeasurementBasis basis = local ? local_basis(angles) : qudit_basis(angles);
  const std::size_t m = sup.size();
  std::vector<double> r(m);
  std::vector<cplx> wconj(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = sup.support[i];
    r[i] = std::sqrt(p[k]);
    cplx w(1, 0);
    if (local) {
      const auto f = basis.local_factors();
      for (std::size_t b = 0; b < f.size(); ++b)
        if (k >> b & 1u) w *= f[b];
    } else {
      w = basis.phase_factor(angles.angles[k]);
    }
    wconj[i] = std::conj(w);
  }
  // kernel[j][i] = K_j(k_i) conj(w_{k_i}) / sqrt(d).
  std::vector<cplx> kernel(d * m);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t jj = 0; jj < d; ++jj) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = sup.support[i];
      cplx kv;
      if (local) {
        kv = (std::popcount(jj & k) & 1) ? -1.0 : 1.0;
      } else {
        kv = std::polar(1.0, -kTwoPi * static_cast<double>((jj * k) % d) / static_cast<double>(d));
      }
      kernel[jj * m + i] = kv * wconj[i] * inv_sqrt;
    }
  }
  const double tol2 = opt.tol * opt.tol;

  std::mutex lock;
  std::vector<std::pair<std::uint64_t, PureState>> found;
  const std::size_t leading = free == 0 ? 1 : g;
  parallel_for(leading, opt.workers, [&](std::size_t lead) {
    std::vector<std::size_t> idx(free, 0);
    if (free > 0) idx[0] = lead;
    std::vector<cplx> gamma(m);
    std::vector<std::pair<std::uint64_t, PureState>> local_found;
    while (true) {
      gamma[0] = r[0];
      for (std::size_t i = 0; i < free; ++i) gamma[i + 1] = r[i + 1] * grid[idx[i]];
      double s = 0;
      for (std::size_t jj = 0; jj < d && s <= tol2; ++jj) {
        cplx v{};
        for (std::size_t i = 0; i < m; ++i) v += gamma[i] * kernel[jj * m + i];
        const double e = std::norm(v) - q[jj];
        s += e * e;
      }
      if (s <= tol2) {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < free; ++i) code = code * g + idx[i];
        std::vector<cplx> amp(d, cplx{});
        for (std::size_t i = 0; i < m; ++i) amp[sup.support[i]] = gamma[i];
        local_found.emplace_back(code, PureState(std::move(amp)));
      }
      bool done = true;
      for (std::size_t pos = free; pos > 1;) {
        --pos;
        if (++idx[pos] < g) {
          done = false;
          break;
        }
        idx[pos] = 0;
      }
      if (done) break;
    }
    std::lock_guard<std::mutex> guard(lock);
    for (auto& f : local_found) found.push_back(std::move(f));
  });
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<PureState> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

/// The twin psi'_k = conj(psi_k) w_k^2 of a product-basis state, w_k the
/// basis phase of index k. It shares P and the second-basis Q with psi.
inline PureState product_twin(const PureState& psi, const MeasurementBasis& basis) {
  if (basis.kind != BasisKind::qubit_local_phase) throw Error("product_twin: needs a qubit product basis");
  if (basis.dim != psi.dim()) throw Error("product_twin: dimension mismatch");
  const auto f = basis.local_factors();
  std::vector<cplx> amp(psi.dim());
  for (std::size_t k = 0; k < psi.dim(); ++k) {
    cplx w(1, 0);
    for (std::size_t b = 0; b < f.size(); ++b)
      if (k >> b & 1u) w *= f[b];
    amp[k] = std::conj(psi[k]) * w * w / std::norm(w);
  }
  return PureState(std::move(amp));
}

/// Twin of a GHZ-like state (support {0, 2^n - 1}): the all-ones phase
/// becomes -phi + 2 sum_p alpha_p.
inline PureState ghz_twin(const PureState& psi, const AngleSet& angles) {
  if (angles.mode != AngleMode::qubit_local) throw Error("ghz_twin: needs a qubit_local angle set");
  const std::size_t d = detail::angle_dim(angles);
  if (psi.dim() != d) throw Error("ghz_twin: dimension mismatch");
  for (std::size_t k = 1; k + 1 < d; ++k)
    if (psi[k] != cplx{}) throw Error("ghz_twin: input is not GHZ-like");
  if (psi[0] == cplx{} || psi[d - 1] == cplx{}) throw Error("ghz_twin: input is not GHZ-like");
  double sum = 0;
  for (double a : angles.angles) sum += a;
  std::vector<cplx> amp(d, cplx{});
  amp[0] = std::conj(psi[0]);
  amp[d - 1] = std::conj(psi[d - 1]) * std::polar(1.0, 2.0 * sum);
  return PureState(std::move(amp));
}

struct ZeroPhaseCertificate {
  bool certified = false;
  double t0_star = 0;
  double t0 = 0;
  /// t0_star - t0; nonnegative for every pure state.
  double deficit = 0;
};

/// T0* = (sum_k sqrt(P_k))^2 / 2^n bounds the Hadamard-basis outcome T_0,
/// with equality exactly when every support phase is zero.
inline ZeroPhaseCertificate certify_zero_phase(const ProbDist& p, const ProbDist& t, double tol = 1e-10) {
  const std::size_t d = p.size();
  if (t.size() != d) throw Error("certify_zero_phase: P and T dimensions differ");
  if (!qubits_for_dim(d)) throw Error("certify_zero_phase: dimension is not a power of two");
  double s = 0;
  for (double v : p.values) s += std::sqrt(std::max(0.0, v));
  ZeroPhaseCertificate c;
  c.t0_star = s * s / static_cast<double>(d);
  c.t0 = t[0];
  c.deficit = c.t0_star - c.t0;
  c.certified = std::abs(c.deficit) <= tol;
  return c;
}

}  // namespace twobase

#endif  // TWOBASE_UNIQUENESS_HPP
