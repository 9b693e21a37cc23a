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
 * @file  objective.hpp
 * @brief epsilon_prob and an incremental evaluator for single-amplitude
 *        updates.
 *
 * For every non-computational basis the evaluator keeps the transformed
 * vector v_j = sum_k u_k K(j, k), with K the Fourier kernel omega^{-jk} or
 * the Walsh sign (-1)^{popcount(j & k)}, so that Q_j = |v_j|^2 / d. Changing
 * one amplitude is an O(d) rank-one update of v.
 *
 * Small supports (m^2 well below d) use the pair domain instead. With
 * c_a = sum_{key(k, l) = a} u_k conj(u_l), key = k - l mod d (Fourier) or
 * k ^ l (Walsh), Parseval gives
 *   || Q - T ||^2 = (1/d) (sum_{a in keys} |c_a - That_a|^2 + R),
 * with That the matching transform of the target and R its energy outside
 * the key set, so an update costs O(m).
 * Channels act diagonally on c: depolarizing scales every c_a by 1 - p and
 * adds p at a = 0; bit-flip scales c_a by (1 - 2p)^{popcount(a)}.
 */

#ifndef TWOBASE_OBJECTIVE_HPP
#define TWOBASE_OBJECTIVE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "twobase/measure.hpp"

namespace twobase {

/// Sum over bases of || candidate_b - target_b ||_2.
inline double epsilon_prob(const std::vector<ProbDist>& target, const std::vector<ProbDist>& candidate) {
  if (target.size() != candidate.size()) throw Error("epsilon_prob: basis count mismatch");
  if (target.empty()) throw Error("epsilon_prob: no distributions");
  double eps = 0;
  for (std::size_t b = 0; b < target.size(); ++b) {
    if (target[b].size() != candidate[b].size()) throw Error("epsilon_prob: dimension mismatch");
    double s = 0;
    for (std::size_t j = 0; j < target[b].size(); ++j) {
      const double e = candidate[b][j] - target[b][j];
      s += e * e;
    }
    eps += std::sqrt(s);
  }
  return eps;
}

/// Incremental epsilon_prob for candidates supported on a fixed index set.
/// `noise` is applied to the candidate distributions before comparison
/// (known-noise model); NoiseModel::none is the pure-state fit.
class Objective {
 public:
  Objective(std::vector<MeasurementBasis> bases, const std::vector<ProbDist>& targets, std::vector<std::size_t> support,
            NoiseModel noise = {})
      : bases_(std::move(bases)), support_(std::move(support)), noise_(noise) {
    if (bases_.size() != targets.size()) throw Error("Objective: one target per basis required");
    if (bases_.empty()) throw Error("Objective: no bases");
    d_ = bases_.front().dim;
    for (std::size_t b = 0; b < bases_.size(); ++b) {
      if (bases_[b].dim != d_ || targets[b].size() != d_) throw Error("Objective: dimension mismatch");
      for (double v : targets[b].values)
        if (v < -kNegativeClip || !std::isfinite(v)) throw Error("Objective: invalid target (negative mass)");
    }
    noise_.validate();
    if (noise_.kind == NoiseModel::Kind::measurement_bitflip && !qubits_for_dim(d_))
      throw Error("Objective: bit-flip noise needs a power-of-two dimension");
    for (std::size_t k : support_)
      if (k >= d_) throw Error("Objective: support index out of range");

    terms_.resize(bases_.size());
    for (std::size_t b = 0; b < bases_.size(); ++b) {
      Term& t = terms_[b];
      t.kind = bases_[b].kind;
      t.target = targets[b].values;
      if (t.kind == BasisKind::computational) continue;
      t.wconj.resize(support_.size());
      std::vector<cplx> f;
      if (t.kind == BasisKind::qubit_local_phase) f = bases_[b].local_factors();
      for (std::size_t i = 0; i < support_.size(); ++i) {
        const std::size_t k = support_[i];
        cplx w(1, 0);
        if (t.kind == BasisKind::qudit_fourier_phase) {
          w = bases_[b].phase_factor(bases_[b].angles->angles[k]);
        } else if (t.kind == BasisKind::qubit_local_phase) {
          for (std::size_t p = 0; p < f.size(); ++p)
            if (k >> p & 1u) w *= f[p];
        }
        t.wconj[i] = std::conj(w);
      }
      t.v.assign(d_, cplx{});
      t.trial_v.assign(d_, cplx{});
    }
    if (std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.kind == BasisKind::qudit_fourier_phase; })) {
      omega_.resize(d_);
      for (std::size_t t = 0; t < d_; ++t) omega_[t] = std::polar(1.0, -kTwoPi * static_cast<double>(t) / static_cast<double>(d_));
    }
    inside_.assign(d_, false);
    for (std::size_t k : support_) inside_[k] = true;
    for (Term& t : terms_) {
      if (t.kind == BasisKind::computational) {
        t.outside_sq = 0;
        for (std::size_t j = 0; j < d_; ++j)
          if (!inside_[j]) t.outside_sq += t.target[j] * t.target[j];
      } else if (use_pairs(t)) {
        setup_pairs(t);
      }
    }
  }

  /// True when basis `b` is evaluated in the pair domain.
  bool pair_domain(std::size_t b) const { return terms_.at(b).pair; }

  std::size_t dim() const { return d_; }
  const std::vector<std::size_t>& support() const { return support_; }
  std::size_t basis_count() const { return bases_.size(); }

  /// Full recompute from amplitudes on the support (same order as support()).
  void reset(const std::vector<cplx>& gamma) {
    if (gamma.size() != support_.size()) throw Error("Objective::reset: size mismatch");
    gamma_ = gamma;
    for (Term& t : terms_) {
      if (t.pair) {
        pair_fill(t, t.c, gamma_);
        t.fsum = pair_fsum(t, t.c);
        t.sumsq = pair_sumsq(t, t.fsum);
        continue;
      }
      if (t.kind != BasisKind::computational) {
        std::fill(t.v.begin(), t.v.end(), cplx{});
        for (std::size_t i = 0; i < support_.size(); ++i) add_column(t, t.v, support_[i], gamma_[i] * t.wconj[i]);
      }
      t.sumsq = term_sumsq(t, t.v, gamma_);
    }
    commits_ = 0;
  }

  double epsilon() const {
    double e = 0;
    for (const Term& t : terms_) e += std::sqrt(std::max(0.0, t.sumsq));
    return e;
  }

  std::vector<double> per_basis() const {
    std::vector<double> out;
    for (const Term& t : terms_) out.push_back(std::sqrt(std::max(0.0, t.sumsq)));
    return out;
  }

  /// epsilon if support position `pos` took amplitude `value`. Call commit()
  /// to keep it.
  double trial(std::size_t pos, cplx value) {
    trial_full_ = false;
    trial_pos_ = pos;
    trial_value_ = value;
    const cplx old = gamma_[pos];
    gamma_[pos] = value;
    double e = 0;
    for (Term& t : terms_) {
      if (t.pair) {
        pair_trial(t, pos, old, value);
      } else if (t.kind != BasisKind::computational) {
        t.trial_v = t.v;
        add_column(t, t.trial_v, support_[pos], (value - old) * t.wconj[pos]);
        t.trial_sumsq = term_sumsq(t, t.trial_v, gamma_);
      } else if (std::norm(value) == std::norm(old)) {
        t.trial_sumsq = t.sumsq;
      } else {
        t.trial_sumsq = term_sumsq(t, t.v, gamma_);
      }
      e += std::sqrt(std::max(0.0, t.trial_sumsq));
    }
    gamma_[pos] = old;
    return e;
  }

  /// epsilon if every support amplitude were replaced; commit() keeps it.
  double trial_all(const std::vector<cplx>& gamma) {
    if (gamma.size() != support_.size()) throw Error("Objective::trial_all: size mismatch");
    trial_full_ = true;
    trial_gamma_ = gamma;
    double e = 0;
    for (Term& t : terms_) {
      if (t.pair) {
        pair_fill(t, t.trial_c, gamma);
        t.trial_fsum = pair_fsum(t, t.trial_c);
        t.trial_sumsq = pair_sumsq(t, t.trial_fsum);
        t.trial_full = true;
        e += std::sqrt(std::max(0.0, t.trial_sumsq));
        continue;
      }
      if (t.kind != BasisKind::computational) {
        std::fill(t.trial_v.begin(), t.trial_v.end(), cplx{});
        for (std::size_t i = 0; i < support_.size(); ++i) add_column(t, t.trial_v, support_[i], gamma[i] * t.wconj[i]);
      }
      t.trial_sumsq = term_sumsq(t, t.trial_v, gamma);
      e += std::sqrt(std::max(0.0, t.trial_sumsq));
    }
    return e;
  }

  void commit() {
    if (trial_full_) {
      gamma_ = trial_gamma_;
      trial_full_ = false;
    } else {
      gamma_[trial_pos_] = trial_value_;
    }
    for (Term& t : terms_) {
      t.sumsq = t.trial_sumsq;
      if (t.pair) {
        if (t.trial_full) {
          std::swap(t.c, t.trial_c);
        } else {
          for (std::size_t q = 0; q < t.touched.size(); ++q) t.c[t.touched[q]] = t.touched_c[q];
        }
        t.fsum = t.trial_fsum;
        t.trial_full = false;
      } else if (t.kind != BasisKind::computational) {
        std::swap(t.v, t.trial_v);
      }
    }
    if (++commits_ % kResyncEvery == 0) reset(std::vector<cplx>(gamma_));
  }

  const std::vector<cplx>& amplitudes() const { return gamma_; }

 private:
  static constexpr std::size_t kResyncEvery = 4096;

  struct Term {
    BasisKind kind = BasisKind::computational;
    std::vector<double> target;
    std::vector<cplx> wconj;
    std::vector<cplx> v, trial_v;
    double sumsq = 0, trial_sumsq = 0;
    double outside_sq = 0;

    // Pair domain.
    bool pair = false;
    std::vector<std::uint32_t> key_of;  // m x m, row-major
    std::vector<cplx> that;             // target transform per key
    std::vector<double> gain;           // channel factor per key
    double add0 = 0;                    // channel offset at the zero key
    std::uint32_t zero_key = 0;
    double rest = 0;  // sum of |That|^2 over keys not in the set
    std::vector<cplx> c, trial_c;
    double fsum = 0, trial_fsum = 0;
    bool trial_full = false;
    std::vector<std::uint32_t> touched;
    std::vector<cplx> touched_c;
    std::vector<std::int32_t> slot;  // key -> index in touched, or -1
  };

  bool use_pairs(const Term& t) const {
    const std::size_t m = support_.size();
    if (m * m * 4 > d_) return false;
    if (t.kind == BasisKind::qudit_fourier_phase && noise_.kind == NoiseModel::Kind::measurement_bitflip) return false;
    return true;
  }

  std::size_t pair_key(const Term& t, std::size_t k, std::size_t l) const {
    if (t.kind == BasisKind::qudit_fourier_phase) return (k + d_ - l) % d_;
    return k ^ l;
  }

  void setup_pairs(Term& t) {
    const std::size_t m = support_.size();
    std::vector<std::size_t> keys;
    keys.reserve(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) keys.push_back(pair_key(t, support_[i], support_[j]));
    std::vector<std::size_t> distinct = keys;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    t.key_of.resize(keys.size());
    for (std::size_t q = 0; q < keys.size(); ++q)
      t.key_of[q] = static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), keys[q]) - distinct.begin());
    t.zero_key = static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), std::size_t{0}) - distinct.begin());

    const std::size_t nk = distinct.size();
    t.that.assign(nk, cplx{});
    if (t.kind == BasisKind::qudit_fourier_phase) {
      for (std::size_t q = 0; q < nk; ++q) {
        cplx acc{};
        std::size_t idx = 0;
        for (std::size_t j = 0; j < d_; ++j) {
          acc += t.target[j] * omega_[idx];
          idx += distinct[q];
          if (idx >= d_) idx %= d_;
        }
        t.that[q] = std::conj(acc);
      }
      double total = 0;
      for (double v : t.target) total += v * v;
      total *= static_cast<double>(d_);
      for (const cplx& v : t.that) total -= std::norm(v);
      t.rest = std::max(0.0, total);
    } else {
      std::vector<double> w = t.target;
      fwht(w);
      for (std::size_t q = 0; q < nk; ++q) t.that[q] = w[distinct[q]];
      t.rest = 0;
      for (std::size_t q = 0, a = 0; a < d_; ++a) {
        if (q < nk && distinct[q] == a) {
          ++q;
          continue;
        }
        t.rest += w[a] * w[a];
      }
    }

    t.gain.assign(nk, 1.0);
    t.add0 = 0;
    if (noise_.kind == NoiseModel::Kind::depolarizing) {
      std::fill(t.gain.begin(), t.gain.end(), 1.0 - noise_.p);
      t.add0 = noise_.p;
    } else if (noise_.kind == NoiseModel::Kind::measurement_bitflip) {
      for (std::size_t q = 0; q < nk; ++q) t.gain[q] = std::pow(1.0 - 2.0 * noise_.p, std::popcount(distinct[q]));
    }
    t.c.assign(nk, cplx{});
    t.trial_c.assign(nk, cplx{});
    t.slot.assign(nk, -1);
    t.pair = true;
  }

  double key_f(const Term& t, std::size_t q, cplx c) const {
    cplx cc = t.gain[q] * c;
    if (q == t.zero_key) cc += t.add0;
    return std::norm(cc - t.that[q]);
  }

  void pair_fill(const Term& t, std::vector<cplx>& c, const std::vector<cplx>& gamma) const {
    const std::size_t m = support_.size();
    std::fill(c.begin(), c.end(), cplx{});
    for (std::size_t i = 0; i < m; ++i) {
      const cplx ui = gamma[i] * t.wconj[i];
      for (std::size_t j = 0; j < m; ++j) c[t.key_of[i * m + j]] += ui * std::conj(gamma[j] * t.wconj[j]);
    }
  }

  double pair_fsum(const Term& t, const std::vector<cplx>& c) const {
    double f = 0;
    for (std::size_t q = 0; q < c.size(); ++q) f += key_f(t, q, c[q]);
    return f;
  }

  double pair_sumsq(const Term& t, double fsum) const { return (fsum + t.rest) / static_cast<double>(d_); }

  void pair_trial(Term& t, std::size_t pos, cplx old, cplx value) {
    const std::size_t m = support_.size();
    t.trial_full = false;
    t.touched.clear();
    t.touched_c.clear();
    auto bump = [&](std::uint32_t q, cplx dc) {
      if (t.slot[q] < 0) {
        t.slot[q] = static_cast<std::int32_t>(t.touched.size());
        t.touched.push_back(q);
        t.touched_c.push_back(t.c[q]);
      }
      t.touched_c[static_cast<std::size_t>(t.slot[q])] += dc;
    };
    const cplx u_old = old * t.wconj[pos];
    const cplx u_new = value * t.wconj[pos];
    const cplx du = u_new - u_old;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == pos) continue;
      const cplx uj = gamma_[j] * t.wconj[j];
      bump(t.key_of[pos * m + j], du * std::conj(uj));
      bump(t.key_of[j * m + pos], uj * std::conj(du));
    }
    bump(t.key_of[pos * m + pos], std::norm(u_new) - std::norm(u_old));
    double f = t.fsum;
    for (std::size_t q = 0; q < t.touched.size(); ++q) {
      const std::uint32_t k = t.touched[q];
      f += key_f(t, k, t.touched_c[q]) - key_f(t, k, t.c[k]);
      t.slot[k] = -1;
    }
    t.trial_fsum = f;
    t.trial_sumsq = pair_sumsq(t, f);
  }

  void add_column(const Term& t, std::vector<cplx>& v, std::size_t k, cplx u) const {
    if (u == cplx{}) return;
    if (t.kind == BasisKind::qudit_fourier_phase) {
      std::size_t idx = 0;
      for (std::size_t j = 0; j < d_; ++j) {
        v[j] += u * omega_[idx];
        idx += k;
        if (idx >= d_) idx %= d_;
      }
    } else {
      for (std::size_t j = 0; j < d_; ++j) v[j] += (std::popcount(j & k) & 1) ? -u : u;
    }
  }

  double term_sumsq(const Term& t, const std::vector<cplx>& v, const std::vector<cplx>& gamma) {
    const double invd = 1.0 / static_cast<double>(d_);
    const bool pointwise = noise_.kind != NoiseModel::Kind::measurement_bitflip;
    const double keep = noise_.kind == NoiseModel::Kind::depolarizing ? 1.0 - noise_.p : 1.0;
    const double add = noise_.kind == NoiseModel::Kind::depolarizing ? noise_.p * invd : 0.0;

    if (t.kind == BasisKind::computational && pointwise && add == 0.0) {
      // Only support entries are nonzero on the candidate side.
      double s = t.outside_sq;
      for (std::size_t i = 0; i < support_.size(); ++i) {
        const double e = keep * std::norm(gamma[i]) - t.target[support_[i]];
        s += e * e;
      }
      return s;
    }

    scratch_.assign(d_, 0.0);
    if (t.kind == BasisKind::computational) {
      for (std::size_t i = 0; i < support_.size(); ++i) scratch_[support_[i]] = std::norm(gamma[i]);
    } else {
      for (std::size_t j = 0; j < d_; ++j) scratch_[j] = std::norm(v[j]) * invd;
    }
    if (pointwise) {
      double s = 0;
      for (std::size_t j = 0; j < d_; ++j) {
        const double e = keep * scratch_[j] + add - t.target[j];
        s += e * e;
      }
      return s;
    }
    detail::bit_butterfly(scratch_, 1.0 - noise_.p, noise_.p);
    double s = 0;
    for (std::size_t j = 0; j < d_; ++j) {
      const double e = scratch_[j] - t.target[j];
      s += e * e;
    }
    return s;
  }

  std::vector<MeasurementBasis> bases_;
  std::vector<std::size_t> support_;
  NoiseModel noise_;
  std::size_t d_ = 0;
  std::vector<Term> terms_;
  std::vector<cplx> omega_;
  std::vector<bool> inside_;
  std::vector<cplx> gamma_;
  std::vector<double> scratch_;
  std::vector<cplx> trial_gamma_;
  bool trial_full_ = false;
  std::size_t trial_pos_ = 0;
  cplx trial_value_{};
  std::size_t commits_ = 0;
};

}  // namespace twobase

#endif  // TWOBASE_OBJECTIVE_HPP
