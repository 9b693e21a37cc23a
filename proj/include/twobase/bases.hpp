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
 * @file  bases.hpp
 * @brief The measurement bases: diagonal-phase angle sets, their generators
 *        and constraint checkers, and dense unitaries for verification.
 *
 * Second basis, qudit form:  S' = D F with D = diag(e^{i theta_m}).
 * Second basis, qubit form:  S'_q = (R_n H) x ... x (R_1 H), R_j = diag(1, e^{i alpha_j});
 *                            qubit 1 is the least significant bit of an index.
 */

#ifndef TWOBASE_BASES_HPP
#define TWOBASE_BASES_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "twobase/decimal.hpp"
#include "twobase/state.hpp"

namespace twobase {

enum class AngleMode { qudit, qubit_local };
enum class AngleGenerator { geometric, sqrt_prime, explicit_values };

/// Exact multipliers of z0: angle_k = z0 * numerators[k] / denominator.
struct ExactCoeffs {
  std::vector<std::int64_t> numerators;
  std::int64_t denominator = 1;
};

struct CheckStatus {
  enum class Kind { unchecked, valid, invalid };
  Kind kind = Kind::unchecked;
  std::string witness;
};

struct AngleSet {
  AngleMode mode = AngleMode::qudit;
  AngleGenerator generator = AngleGenerator::explicit_values;
  double z0 = 0.0;
  std::vector<double> angles;
  std::optional<ExactCoeffs> exact;
  CheckStatus check;

  std::size_t size() const { return angles.size(); }
};

inline AngleSet explicit_angles(std::vector<double> angles, AngleMode mode = AngleMode::qudit) {
  AngleSet a;
  a.mode = mode;
  a.angles = std::move(angles);
  return a;
}

/// theta_k = 2^(k-1) z0. Qudit sets are indexed k = 0..count-1 (so theta_0 = z0/2);
/// qubit-local sets are indexed k = 1..count.
inline AngleSet gen_geometric(int count, double z0, AngleMode mode = AngleMode::qudit) {
  if (count < 2) throw Error("gen_geometric: count must be >= 2");
  if (count > 61) throw Error("gen_geometric: count too large for exact coefficients");
  if (z0 == 0.0 || !std::isfinite(z0)) throw Error("gen_geometric: z0 must be nonzero");
  AngleSet a;
  a.mode = mode;
  a.generator = AngleGenerator::geometric;
  a.z0 = z0;
  ExactCoeffs ex;
  ex.denominator = mode == AngleMode::qudit ? 2 : 1;
  for (int k = 0; k < count; ++k) {
    const std::int64_t num = std::int64_t{1} << k;
    ex.numerators.push_back(num);
    a.angles.push_back(z0 * static_cast<double>(num) / static_cast<double>(ex.denominator));
  }
  a.exact = std::move(ex);
  return a;
}

/// First `count` primes by trial division against smaller primes.
inline std::vector<std::int64_t> first_primes(int count) {
  std::vector<std::int64_t> primes;
  for (std::int64_t c = 2; static_cast<int>(primes.size()) < count; ++c) {
    bool is_prime = true;
    for (std::int64_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(c);
  }
  return primes;
}

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// theta_k = sqrt(q_k), q_k the k-th prime (q_1 = 2), evaluated at 50 digits.
inline AngleSet gen_sqrt_prime(int count, AngleMode mode = AngleMode::qudit) {
  if (count < 2) throw Error("gen_sqrt_prime: count must be >= 2");
  AngleSet a;
  a.mode = mode;
  a.generator = AngleGenerator::sqrt_prime;
  for (std::int64_t q : first_primes(count)) a.angles.push_back(static_cast<double>(boost::multiprecision::sqrt(HighPrecision(q))));
  return a;
}

inline std::vector<HighPrecision> high_precision_angles(const AngleSet& a) {
  std::vector<HighPrecision> out;
  if (a.generator == AngleGenerator::sqrt_prime) {
    for (std::int64_t q : first_primes(static_cast<int>(a.size()))) out.push_back(boost::multiprecision::sqrt(HighPrecision(q)));
  } else {
    for (double v : a.angles) out.emplace_back(v);
  }
  return out;
}

struct ConstraintCheck {
  bool valid = true;
  std::string witness;
};

namespace detail {

// Sorted-neighbour collision search. `values` are compared with `eq`; the
// witness is the colliding pair whose later member comes first.
template <class T, class Eq>
std::optional<std::pair<std::size_t, std::size_t>> first_collision(const std::vector<T>& values, Eq eq) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!eq(values[order[i - 1]], values[order[i]])) continue;
    auto w = std::minmax(order[i - 1], order[i]);
    if (!best || w.second < best->second || (w.second == best->second && w.first < best->first)) best = w;
  }
  return best;
}

inline std::string format_signed_sum(std::uint32_t mask, std::uint32_t signs, int n) {
  std::string out;
  for (int m = 0; m < n; ++m) {
    if (!(mask >> m & 1u)) continue;
    const bool neg = signs >> m & 1u;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    out += "a" + std::to_string(m + 1);
  }
  return out;
}

}  // namespace detail

/// Pairwise-distinct absolute differences |theta_i - theta_j|. Exact integer
/// arithmetic when the set carries exact coefficients, otherwise two
/// differences closer than `margin` (computed at 50 digits) collide.
inline ConstraintCheck check_qudit_constraints(const AngleSet& angles, double margin = 1e-6) {
  if (angles.mode != AngleMode::qudit) throw Error("check_qudit_constraints: angle set is not in qudit mode");
  const std::size_t d = angles.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);

  std::optional<std::pair<std::size_t, std::size_t>> hit;
  bool zero_gap = false;
  if (angles.exact) {
    const auto& nums = angles.exact->numerators;
    std::vector<std::int64_t> diffs;
    for (auto [i, j] : pairs) diffs.push_back(nums[i] > nums[j] ? nums[i] - nums[j] : nums[j] - nums[i]);
    for (std::size_t p = 0; p < diffs.size() && !zero_gap; ++p)
      if (diffs[p] == 0) {
        zero_gap = true;
        hit = std::make_pair(p, p);
      }
    if (!zero_gap) hit = detail::first_collision(diffs, [](std::int64_t a, std::int64_t b) { return a == b; });
  } else {
    const auto hp = high_precision_angles(angles);
    std::vector<HighPrecision> diffs;
    for (auto [i, j] : pairs) diffs.push_back(abs(hp[i] - hp[j]));
    const HighPrecision m(margin);
    for (std::size_t p = 0; p < diffs.size() && !zero_gap; ++p)
      if (diffs[p] <= m) {
        zero_gap = true;
        hit = std::make_pair(p, p);
      }
    if (!zero_gap) hit = detail::first_collision(diffs, [&](const HighPrecision& a, const HighPrecision& b) { return abs(a - b) <= m; });
  }
  if (!hit) return {};
  auto [a, b] = *hit;
  ConstraintCheck res;
  res.valid = false;
  auto name = [&](std::size_t p) { return "(" + std::to_string(pairs[p].first) + "," + std::to_string(pairs[p].second) + ")"; };
  res.witness = zero_gap ? "theta" + name(a) + " has zero gap" : name(a) + " vs " + name(b);
  return res;
}

inline constexpr int kMaxExhaustiveLocalQubits = 18;

/// Signed subset sums sum_{m in M} (-1)^{x_m} alpha_m. Within every subset M
/// the absolute values must be pairwise distinct once x and its complement
/// (which give +-Delta) are identified, and no relative phase may vanish.
/// Cost is 3^n / 2, so n is capped for the exhaustive check.
inline ConstraintCheck check_local_constraints(const AngleSet& angles, double margin = 1e-6) {
  if (angles.mode != AngleMode::qubit_local) throw Error("check_local_constraints: angle set is not in qubit_local mode");
  const int n = static_cast<int>(angles.size());
  if (n > kMaxExhaustiveLocalQubits)
    throw Error("check_local_constraints: n = " + std::to_string(n) + " exceeds the exhaustive limit of " +
                std::to_string(kMaxExhaustiveLocalQubits) + "; use check_local_constraints_sampled or check_support_constraints");

  std::vector<HighPrecision> hp;
  if (!angles.exact) hp = high_precision_angles(angles);
  const HighPrecision m(margin);

  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int lowest = std::countr_zero(mask);
    // Sign strings with the lowest member of M fixed positive: one per class.
    std::vector<std::uint32_t> sign_strings;
    std::uint32_t sub = 0;
    do {
      if (!(sub >> lowest & 1u)) sign_strings.push_back(sub);
      sub = (sub - mask) & mask;
    } while (sub != 0);
    auto report = [&](std::size_t a, std::size_t b, bool zero) {
      ConstraintCheck res;
      res.valid = false;
      if (zero)
        res.witness = detail::format_signed_sum(mask, sign_strings[a], n) + " = 0";
      else
        res.witness = "|" + detail::format_signed_sum(mask, sign_strings[a], n) + "| = |" +
                      detail::format_signed_sum(mask, sign_strings[b], n) + "|";
      return res;
    };
    if (angles.exact) {
      const auto& nums = angles.exact->numerators;
      std::vector<std::int64_t> vals;
      for (std::uint32_t s : sign_strings) {
        std::int64_t v = 0;
        for (int q = 0; q < n; ++q)
          if (mask >> q & 1u) v += (s >> q & 1u) ? -nums[q] : nums[q];
        vals.push_back(v < 0 ? -v : v);
      }
      for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] == 0) return report(i, i, true);
      if (auto hit = detail::first_collision(vals, [](std::int64_t a, std::int64_t b) { return a == b; }))
        return report(hit->first, hit->second, false);
    } else {
      std::vector<HighPrecision> vals;
      for (std::uint32_t s : sign_strings) {
        HighPrecision v = 0;
        for (int q = 0; q < n; ++q)
          if (mask >> q & 1u) v += (s >> q & 1u) ? -hp[q] : hp[q];
        vals.push_back(abs(v));
      }
      for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] <= m) return report(i, i, true);
      if (auto hit = detail::first_collision(vals, [&](const HighPrecision& a, const HighPrecision& b) { return abs(a - b) <= m; }))
        return report(hit->first, hit->second, false);
    }
  }
  return {};
}

/// Randomized variant of the local check for large n: draws `samples`
/// subsets and compares two random sign classes inside each.
inline ConstraintCheck check_local_constraints_sampled(const AngleSet& angles, std::size_t samples, std::uint64_t seed,
                                                       double margin = 1e-6) {
  if (angles.mode != AngleMode::qubit_local) throw Error("check_local_constraints_sampled: angle set is not in qubit_local mode");
  const int n = static_cast<int>(angles.size());
  if (n > 62) throw Error("check_local_constraints_sampled: too many qubits");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> bits(0, ~std::uint64_t{0});
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  auto value = [&](std::uint64_t mask, std::uint64_t signs) {
    double v = 0;
    for (int q = 0; q < n; ++q)
      if (mask >> q & 1u) v += (signs >> q & 1u) ? -angles.angles[q] : angles.angles[q];
    return std::abs(v);
  };
  for (std::size_t t = 0; t < samples; ++t) {
    std::uint64_t mask = bits(rng) & all;
    if (mask == 0) continue;
    const int lowest = std::countr_zero(mask);
    std::uint64_t s1 = bits(rng) & mask & ~(std::uint64_t{1} << lowest);
    std::uint64_t s2 = bits(rng) & mask & ~(std::uint64_t{1} << lowest);
    const double v1 = value(mask, s1), v2 = value(mask, s2);
    if (v1 <= margin) return {false, "sampled relative phase vanishes (mask " + std::to_string(mask) + ")"};
    if (s1 != s2 && std::abs(v1 - v2) <= margin)
      return {false, "sampled collision in mask " + std::to_string(mask)};
  }
  return {};
}

/// alpha'_m = sum_p alpha_p m_p for a qubit-local set.
inline double local_phase_of_index(const AngleSet& angles, std::uint64_t m) {
  double v = 0;
  for (std::size_t p = 0; p < angles.size(); ++p)
    if (m >> p & 1u) v += angles.angles[p];
  return v;
}

/// Qudit-style distinctness check restricted to the relative phases that a
/// state supported on `support` can see. For qubit-local sets the phases are
/// alpha'_m; for qudit sets theta_m.
inline ConstraintCheck check_support_constraints(const AngleSet& angles, const std::vector<std::size_t>& support,
                                                 double margin = 1e-6) {
  AngleSet restricted;
  restricted.mode = AngleMode::qudit;
  for (std::size_t k : support)
    restricted.angles.push_back(angles.mode == AngleMode::qudit ? angles.angles.at(k) : local_phase_of_index(angles, k));
  if (angles.exact) {
    ExactCoeffs ex;
    ex.denominator = angles.exact->denominator;
    for (std::size_t k : support) {
      if (angles.mode == AngleMode::qudit) {
        ex.numerators.push_back(angles.exact->numerators.at(k));
      } else {
        std::int64_t v = 0;
        for (std::size_t p = 0; p < angles.size(); ++p)
          if (k >> p & 1u) v += angles.exact->numerators[p];
        ex.numerators.push_back(v);
      }
    }
    restricted.exact = std::move(ex);
  }
  return check_qudit_constraints(restricted, margin);
}

/// Runs the checker that matches the mode and records the verdict.
inline AngleSet checked(AngleSet angles, double margin = 1e-6) {
  const ConstraintCheck c = angles.mode == AngleMode::qudit ? check_qudit_constraints(angles, margin)
                                                              : check_local_constraints(angles, margin);
  angles.check.kind = c.valid ? CheckStatus::Kind::valid : CheckStatus::Kind::invalid;
  angles.check.witness = c.witness;
  return angles;
}

/// theta_m -> 0 outside the support (identity phase where the amplitude vanishes).
inline AngleSet mask_to_support(const AngleSet& angles, const SparseSupport& support) {
  if (angles.mode != AngleMode::qudit) throw Error("mask_to_support: angle set is not in qudit mode");
  AngleSet out = angles;
  out.generator = AngleGenerator::explicit_values;
  out.check = {};
  for (std::size_t m = 0; m < out.angles.size(); ++m) {
    if (support.contains(m)) continue;
    out.angles[m] = 0.0;
    if (out.exact) out.exact->numerators[m] = 0;
  }
  return out;
}

enum class BasisKind { computational, qudit_fourier_phase, qubit_local_phase, plain_hadamard };

inline const char* to_string(BasisKind k) {
  switch (k) {
    case BasisKind::computational: return "computational";
    case BasisKind::qudit_fourier_phase: return "qudit_fourier_phase";
    case BasisKind::qubit_local_phase: return "qubit_local_phase";
    case BasisKind::plain_hadamard: return "plain_hadamard";
  }
  return "?";
}

/// A measurement basis. `phase_decimals`, when set, rounds the cos and sin of
/// every phase factor e^{i angle} to that many decimals.
struct MeasurementBasis {
  BasisKind kind = BasisKind::computational;
  std::size_t dim = 0;
  std::optional<AngleSet> angles;
  std::optional<int> phase_decimals;

  int qubits() const {
    auto n = qubits_for_dim(dim);
    if (!n) throw Error("basis dimension is not a power of two");
    return *n;
  }

  /// e^{i angle}, rounded when phase_decimals is set.
  cplx phase_factor(double angle) const {
    double c = std::cos(angle), s = std::sin(angle);
    if (phase_decimals) {
      c = round_decimal(c, *phase_decimals);
      s = round_decimal(s, *phase_decimals);
    }
    return {c, s};
  }

  /// Per-qubit factors e^{i alpha_p} of a qubit-local basis.
  std::vector<cplx> local_factors() const {
    std::vector<cplx> f;
    if (kind != BasisKind::qubit_local_phase) return std::vector<cplx>(qubits(), cplx(1, 0));
    for (double a : angles->angles) f.push_back(phase_factor(a));
    return f;
  }

  /// Diagonal w_m of the phase layer D (identity for the unphased bases).
  cplx diagonal(std::size_t m) const {
    switch (kind) {
      case BasisKind::computational:
      case BasisKind::plain_hadamard: return {1, 0};
      case BasisKind::qudit_fourier_phase: return phase_factor(angles->angles[m]);
      case BasisKind::qubit_local_phase: {
        cplx w(1, 0);
        for (std::size_t p = 0; p < angles->size(); ++p)
          if (m >> p & 1u) w *= phase_factor(angles->angles[p]);
        return w;
      }
    }
    return {1, 0};
  }

  std::vector<cplx> diagonal() const {
    std::vector<cplx> w(dim, cplx(1, 0));
    if (kind == BasisKind::qudit_fourier_phase) {
      for (std::size_t m = 0; m < dim; ++m) w[m] = phase_factor(angles->angles[m]);
    } else if (kind == BasisKind::qubit_local_phase) {
      const auto f = local_factors();
      for (std::size_t m = 1; m < dim; ++m) {
        const int p = std::countr_zero(m);
        w[m] = w[m & (m - 1)] * f[p];
      }
    }
    return w;
  }
};

inline MeasurementBasis computational_basis(std::size_t d) { return {BasisKind::computational, d, std::nullopt, std::nullopt}; }

inline MeasurementBasis qudit_basis(AngleSet angles, std::optional<int> phase_decimals = std::nullopt) {
  if (angles.mode != AngleMode::qudit) throw Error("qudit_basis: angle set is not in qudit mode");
  const std::size_t d = angles.size();
  return {BasisKind::qudit_fourier_phase, d, std::move(angles), phase_decimals};
}

inline MeasurementBasis local_basis(AngleSet angles, std::optional<int> phase_decimals = std::nullopt) {
  if (angles.mode != AngleMode::qubit_local) throw Error("local_basis: angle set is not in qubit_local mode");
  if (angles.size() > 40) throw Error("local_basis: too many qubits");
  const std::size_t d = std::size_t{1} << angles.size();
  return {BasisKind::qubit_local_phase, d, std::move(angles), phase_decimals};
}

inline MeasurementBasis hadamard_basis(int n) {
  if (n < 1 || n > 40) throw Error("hadamard_basis: bad qubit count");
  return {BasisKind::plain_hadamard, std::size_t{1} << n, std::nullopt, std::nullopt};
}

inline constexpr std::size_t kMaxDenseDim = std::size_t{1} << 12;

/// Dense unitary S' whose columns are the basis vectors. Verification only.
inline Eigen::MatrixXcd build_unitary(const MeasurementBasis& basis) {
  const std::size_t d = basis.dim;
  if (d > kMaxDenseDim) throw Error("build_unitary: dimension over cap; use closed-form path");
  using Mat = Eigen::MatrixXcd;
  switch (basis.kind) {
    case BasisKind::computational: return Mat::Identity(d, d);
    case BasisKind::qudit_fourier_phase: {
      Mat f(d, d);
      const double inv = 1.0 / std::sqrt(static_cast<double>(d));
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) f(j, k) = std::polar(inv, kTwoPi * static_cast<double>((j * k) % d) / static_cast<double>(d));
      Eigen::VectorXcd diag(d);
      for (std::size_t m = 0; m < d; ++m) diag(m) = basis.diagonal(m);
      return diag.asDiagonal() * f;
    }
    case BasisKind::qubit_local_phase:
    case BasisKind::plain_hadamard: {
      const int n = basis.qubits();
      const auto f = basis.local_factors();
      const double h = 1.0 / std::sqrt(2.0);
      Mat u = Mat::Identity(1, 1);
      for (int p = 0; p < n; ++p) {
        Mat rh(2, 2);
        rh << h, h, f[p] * h, -f[p] * h;
        Mat next(u.rows() * 2, u.cols() * 2);
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) next.block(a * u.rows(), b * u.cols(), u.rows(), u.cols()) = rh(a, b) * u;
        u = std::move(next);
      }
      return u;
    }
  }
  return Mat::Identity(d, d);
}

}  // namespace twobase

#endif  // TWOBASE_BASES_HPP
