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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "twobase/measure.hpp"

namespace twobase {
namespace {

double max_diff(const ProbDist& a, const ProbDist& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

PureState sparse_random(std::size_t d, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> r(d, 0.0), phi(d, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t idx = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
    r[idx] = 0.1 + u(rng);
    phi[idx] = kTwoPi * u(rng);
  }
  return from_polar(r, phi);
}

TEST(Computational, Examples) {
  const auto p = prob_computational(from_polar({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}));
  EXPECT_EQ(p.values, (std::vector<double>{1, 0, 0}));
  const auto q = prob_computational(PureState({cplx(0.6, 0), cplx(0, 0.8)}));
  EXPECT_NEAR(q[0], 0.36, 1e-15);
  EXPECT_NEAR(q[1], 0.64, 1e-15);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0, 1);
    std::vector<cplx> a(9);
    for (auto& x : a) x = {n(rng), n(rng)};
    EXPECT_NEAR(prob_computational(normalized(a)).total(), 1.0, 1e-12);
  }
}

TEST(QuditSecond, SingleSupportIsUniform) {
  const auto q = prob_qudit_second(from_polar({0.0, 1.0, 0.0, 0.0, 0.0}, {0, 0, 0, 0, 0}), gen_sqrt_prime(5));
  for (double v : q.values) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(QuditSecond, TwoLevelHandEvaluation) {
  for (double beta : {0.0, 0.3, 1.7, 3.0}) {
    const auto psi = from_polar({1.0, 1.0}, {0.0, 0.0});
    const auto q = prob_qudit_second(psi, explicit_angles({0.0, beta}));
    EXPECT_NEAR(q[0], 0.5 + 0.5 * std::cos(beta), 1e-15);
    EXPECT_NEAR(q[1], 0.5 - 0.5 * std::cos(beta), 1e-15);
    EXPECT_LT(max_diff(q, prob_oracle(psi, qudit_basis(explicit_angles({0.0, beta})))), 1e-15);
  }
}

TEST(QuditSecond, MatchesOracle) {
  for (std::size_t d : {2u, 3u, 5u, 8u, 17u, 64u}) {
    const auto basis = qudit_basis(gen_sqrt_prime(static_cast<int>(d)), 15);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto psi = random_state(d, seed, PrecisionSpec{});
      EXPECT_LT(max_diff(prob_qudit_second(psi, basis), prob_oracle(psi, basis)), 1e-12) << d;
      const auto sp = sparse_random(d, 3, seed);
      EXPECT_LT(max_diff(prob_qudit_second(sp, basis), prob_oracle(sp, basis)), 1e-12) << d;
    }
  }
}

TEST(QubitSecond, Examples) {
  const auto zero = from_polar({1.0, 0.0, 0.0, 0.0}, {0, 0, 0, 0});
  for (double v : prob_qubit_second(zero, gen_sqrt_prime(2, AngleMode::qubit_local)).values) EXPECT_NEAR(v, 0.25, 1e-15);
  const auto plus = from_polar({1.0, 1.0}, {0.0, 0.0});
  const auto q = prob_qubit_second(plus, explicit_angles({0.0}, AngleMode::qubit_local));
  EXPECT_NEAR(q[0], 1.0, 1e-15);
  EXPECT_NEAR(q[1], 0.0, 1e-15);
}

TEST(QubitSecond, MatchesOracle) {
  for (int n = 1; n <= 10; ++n) {
    const auto angles = n == 1 ? explicit_angles({1.414}, AngleMode::qubit_local) : gen_sqrt_prime(n, AngleMode::qubit_local);
    const auto basis = local_basis(angles, 15);
    const std::size_t d = std::size_t{1} << n;
    for (std::uint64_t seed = 0; seed < (n <= 6 ? 20u : 3u); ++seed) {
      const auto psi = random_state(d, seed, PrecisionSpec{});
      EXPECT_LT(max_diff(prob_qubit_second(psi, basis), prob_oracle(psi, basis)), 1e-12) << n;
      const auto sp = sparse_random(d, 4, seed);
      EXPECT_LT(max_diff(prob_qubit_second(sp, basis), prob_oracle(sp, basis)), 1e-12) << n;
    }
  }
}

TEST(QubitSecond, PairFormulaWithHammingSigns) {
  // Direct evaluation of the pair sum with h(j, s) = popcount(j & s).
  const auto angles = gen_geometric(3, 0.7, AngleMode::qubit_local);
  const auto psi = random_state(8, 31, PrecisionSpec{});
  const auto q = prob_qubit_second(psi, angles);
  for (std::size_t j = 0; j < 8; ++j) {
    double acc = 0;
    for (std::size_t s = 0; s < 8; ++s) {
      acc += std::norm(psi[s]);
      for (std::size_t l = s + 1; l < 8; ++l) {
        const int sign = (std::popcount(j & s) + std::popcount(j & l)) % 2 ? -1 : 1;
        const double da = local_phase_of_index(angles, s) - local_phase_of_index(angles, l);
        acc += 2 * sign * psi.modulus(s) * psi.modulus(l) * std::cos(psi.phase(s) - psi.phase(l) - da);
      }
    }
    EXPECT_NEAR(q[j], acc / 8, 1e-12);
  }
}

TEST(Oracle, ComputationalAndHadamard) {
  const auto psi = random_state(16, 2, PrecisionSpec{});
  EXPECT_LT(max_diff(prob_oracle(psi, computational_basis(16)), prob_computational(psi)), 1e-15);
  const auto zero = from_polar({1.0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0});
  for (double v : prob_oracle(zero, hadamard_basis(3)).values) EXPECT_NEAR(v, 0.125, 1e-15);
  EXPECT_THROW(prob_oracle(random_state(8192, 1, PrecisionSpec{}), hadamard_basis(13)), Error);
}

TEST(PlainHadamard, Examples) {
  const auto zero = from_polar({1.0, 0, 0, 0}, {0, 0, 0, 0});
  for (double v : prob_plain_hadamard(zero).values) EXPECT_NEAR(v, 0.25, 1e-15);
  const double r[] = {1, 1}, phi[] = {0, 0};
  const auto w = w_like(2, r, phi);
  EXPECT_NEAR(prob_plain_hadamard(w)[0], 0.5, 1e-15);
  for (int n = 1; n <= 8; ++n) {
    const auto psi = random_state(std::size_t{1} << n, 100 + n, PrecisionSpec{});
    EXPECT_LT(max_diff(prob_plain_hadamard(psi), prob_oracle(psi, hadamard_basis(n))), 1e-12);
  }
}

TEST(PlainHadamard, ZeroPhaseAllZerosOutcome) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> r(16), phi(16, 0.0);
    for (double& v : r) v = u(rng);
    const auto psi = from_polar(r, phi);
    double s = 0;
    for (std::size_t k = 0; k < 16; ++k) s += psi.modulus(k);
    EXPECT_NEAR(prob_plain_hadamard(psi)[0], s * s / 16, 1e-12);
  }
}

TEST(Depolarizing, Examples) {
  ProbDist p;
  p.values = {1.0, 0.0};
  EXPECT_EQ(apply_depolarizing(p, 0.0).values, p.values);
  const auto u = apply_depolarizing(p, 1.0);
  EXPECT_EQ(u.values, (std::vector<double>{0.5, 0.5}));
  const auto h = apply_depolarizing(p, 0.05);
  EXPECT_NEAR(h[0], 0.975, 1e-15);
  EXPECT_NEAR(h[1], 0.025, 1e-15);
  EXPECT_THROW(apply_depolarizing(p, 1.5), Error);
}

TEST(Bitflip, Examples) {
  ProbDist p;
  p.values = {1.0, 0.0};
  EXPECT_EQ(apply_bitflip(p, 0.0).values, p.values);
  const auto f = apply_bitflip(p, 0.1);
  EXPECT_NEAR(f[0], 0.9, 1e-15);
  EXPECT_NEAR(f[1], 0.1, 1e-15);
  const auto psi = random_state(16, 4, PrecisionSpec{});
  const auto half = apply_bitflip(prob_computational(psi), 0.5);
  for (double v : half.values) EXPECT_NEAR(v, psi.norm2() / 16, 1e-15);
  ProbDist three;
  three.values = {0.2, 0.3, 0.5};
  EXPECT_THROW(apply_bitflip(three, 0.1), Error);
}

TEST(Bitflip, MatchesConfusionMatrix) {
  // Dense product of per-bit 2x2 stochastic matrices.
  const auto psi = random_state(8, 12, PrecisionSpec{});
  const auto p = prob_qubit_second(psi, gen_sqrt_prime(3, AngleMode::qubit_local));
  const double e = 0.07;
  const auto out = apply_bitflip(p, e);
  for (std::size_t j = 0; j < 8; ++j) {
    double acc = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      const int flips = std::popcount(i ^ j);
      acc += std::pow(e, flips) * std::pow(1 - e, 3 - flips) * p[i];
    }
    EXPECT_NEAR(out[j], acc, 1e-15);
  }
}

TEST(Channels, AffineValidAndInvertible) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 0.45);
  for (int t = 0; t < 50; ++t) {
    const auto psi = random_state(8, t, PrecisionSpec{});
    const auto p = prob_qubit_second(psi, gen_geometric(3, 1.0, AngleMode::qubit_local));
    const double e = u(rng);
    for (auto kind : {NoiseModel::Kind::depolarizing, NoiseModel::Kind::measurement_bitflip}) {
      const NoiseModel nm{kind, e};
      const auto out = apply_noise(p, nm);
      const double expected = kind == NoiseModel::Kind::depolarizing ? (1 - e) * p.total() + e : p.total();
      EXPECT_NEAR(out.total(), expected, 1e-12);
      for (double v : out.values) EXPECT_GE(v, 0.0);
      const auto back = invert_noise(out.values, nm);
      for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(back[j], p[j], 1e-12);
    }
  }
}

TEST(SampleShots, Examples) {
  ProbDist p;
  p.values = {1.0, 0.0};
  EXPECT_EQ(sample_shots(p, 1000, 3).values, p.values);
  EXPECT_THROW(sample_shots(p, 0, 3), Error);
  const auto psi = random_state(8, 5, PrecisionSpec{});
  const auto q = prob_computational(psi);
  const auto a = sample_shots(q, 5000, 9), b = sample_shots(q, 5000, 9);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.kind, DistKind::sampled);
  EXPECT_DOUBLE_EQ(a.total(), 1.0);
}

TEST(SampleShots, ErrorDecaysLikeInverseSqrtShots) {
  const auto psi = random_state(8, 6, PrecisionSpec{});
  auto q = prob_computational(psi);
  const double tot = q.total();
  for (double& v : q.values) v /= tot;
  for (std::size_t shots : {1000u, 100000u}) {
    double mean_err = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) mean_err += max_diff(sample_shots(q, shots, seed), q) / 20;
    EXPECT_LT(mean_err, 5.0 / std::sqrt(static_cast<double>(shots))) << shots;
  }
}

TEST(Invariants, GlobalPhaseDoesNotChangeDistributions) {
  const auto psi = random_state(8, 21, PrecisionSpec{});
  std::vector<cplx> rot(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto& x : rot) x *= std::polar(1.0, 2.1);
  const PureState chi(rot);
  const auto loc = local_basis(gen_sqrt_prime(3, AngleMode::qubit_local), 15);
  const auto qud = qudit_basis(gen_geometric(8, 0.9), 15);
  EXPECT_LT(max_diff(prob_in_basis(psi, loc), prob_in_basis(chi, loc)), 1e-14);
  EXPECT_LT(max_diff(prob_in_basis(psi, qud), prob_in_basis(chi, qud)), 1e-14);
  EXPECT_LT(max_diff(prob_in_basis(psi, hadamard_basis(3)), prob_in_basis(chi, hadamard_basis(3))), 1e-14);
}

TEST(Invariants, SecondBasisTotalsEqualNorm) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto psi = random_state(16, seed, PrecisionSpec{});
    EXPECT_NEAR(prob_in_basis(psi, local_basis(gen_sqrt_prime(4, AngleMode::qubit_local))).total(), psi.norm2(), 1e-12);
    EXPECT_NEAR(prob_in_basis(psi, qudit_basis(gen_sqrt_prime(16))).total(), psi.norm2(), 1e-12);
  }
}

TEST(ClipNegatives, Rules) {
  std::vector<double> v = {0.5, -1e-16, 0.5};
  clip_negatives(v);
  EXPECT_EQ(v[1], 0.0);
  std::vector<double> w = {0.5, -1e-6};
  EXPECT_THROW(clip_negatives(w), Error);
}

}  // namespace
}  // namespace twobase
