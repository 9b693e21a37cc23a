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

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "twobase/bases.hpp"
#include "twobase/measure.hpp"

namespace twobase {
namespace {

// Brute-force pair-of-pairs comparison, independent of the sorted search.
bool qudit_valid_bruteforce(const std::vector<double>& t, double margin) {
  std::vector<double> diffs;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) diffs.push_back(std::abs(t[i] - t[j]));
  for (std::size_t a = 0; a < diffs.size(); ++a) {
    if (diffs[a] <= margin) return false;
    for (std::size_t b = a + 1; b < diffs.size(); ++b)
      if (std::abs(diffs[a] - diffs[b]) <= margin) return false;
  }
  return true;
}

// Every pair of sign vectors inside every subset, skipping x vs its complement.
bool local_valid_bruteforce(const std::vector<double>& a, double margin) {
  const int n = static_cast<int>(a.size());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<unsigned> subs;
    for (unsigned s = 0; s < (1u << n); ++s)
      if ((s & ~mask) == 0) subs.push_back(s);
    auto val = [&](unsigned s) {
      double v = 0;
      for (int q = 0; q < n; ++q)
        if (mask >> q & 1u) v += (s >> q & 1u) ? -a[q] : a[q];
      return v;
    };
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (std::abs(val(subs[i])) <= margin) return false;
      for (std::size_t j = i + 1; j < subs.size(); ++j) {
        if ((subs[i] ^ subs[j]) == mask) continue;
        if (std::abs(std::abs(val(subs[i])) - std::abs(val(subs[j]))) <= margin) return false;
      }
    }
  }
  return true;
}

TEST(GenGeometric, Values) {
  const auto a = gen_geometric(4, 1.0);
  EXPECT_EQ(a.angles, (std::vector<double>{0.5, 1, 2, 4}));
  ASSERT_TRUE(a.exact.has_value());
  EXPECT_EQ(a.exact->numerators, (std::vector<std::int64_t>{1, 2, 4, 8}));
  EXPECT_EQ(a.exact->denominator, 2);
  EXPECT_EQ(a.check.kind, CheckStatus::Kind::unchecked);
  EXPECT_THROW(gen_geometric(4, 0.0), Error);
  EXPECT_THROW(gen_geometric(1, 1.0), Error);
}

TEST(GenGeometric, ValidForAllSmallDimensions) {
  for (int d = 2; d <= 12; ++d) {
    const auto a = gen_geometric(d, 0.37);
    EXPECT_TRUE(check_qudit_constraints(a).valid) << d;
    EXPECT_TRUE(qudit_valid_bruteforce(a.angles, 1e-9)) << d;
  }
}

TEST(GenGeometric, ForcedZeroThetaCollides) {
  const auto a = explicit_angles({0, 1, 2, 4});
  const auto c = check_qudit_constraints(a);
  EXPECT_FALSE(c.valid);
  EXPECT_EQ(c.witness, "(0,1) vs (1,2)");
}

TEST(GenSqrtPrime, Values) {
  const auto a = gen_sqrt_prime(3);
  EXPECT_NEAR(a.angles[0], 1.414213562373095, 1e-15);
  EXPECT_NEAR(a.angles[1], 1.732050807568877, 1e-15);
  EXPECT_NEAR(a.angles[2], 2.23606797749979, 1e-15);
  const auto b = gen_sqrt_prime(2);
  EXPECT_GT(std::abs(b.angles[1] - b.angles[0]), 0.3);
  EXPECT_EQ(first_primes(10).back(), 29);
}

TEST(GenSqrtPrime, ValidUpToTwenty) {
  for (int d = 2; d <= 20; ++d) EXPECT_TRUE(check_qudit_constraints(gen_sqrt_prime(d), 1e-6).valid) << d;
}

TEST(QuditCheck, ArithmeticSetsInvalid) {
  const auto c = check_qudit_constraints(explicit_angles({0, 1, 2, 3}));
  EXPECT_FALSE(c.valid);
  EXPECT_EQ(c.witness, "(0,1) vs (1,2)");
  for (double beta : {0.1, 1.0, 2.5, 1e3}) EXPECT_FALSE(check_qudit_constraints(explicit_angles({0, beta, 2 * beta})).valid);
}

TEST(QuditCheck, AgreesWithBruteForceOnRandomSets) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> small(0, 12);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> th(5);
    for (double& v : th) v = small(rng);
    EXPECT_EQ(check_qudit_constraints(explicit_angles(th)).valid, qudit_valid_bruteforce(th, 1e-6));
  }
}

TEST(QuditCheck, WitnessReverifies) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> small(0, 9);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> th(4);
    for (double& v : th) v = small(rng);
    const auto c = check_qudit_constraints(explicit_angles(th));
    if (c.valid) continue;
    int i, j, k, l;
    if (std::sscanf(c.witness.c_str(), "(%d,%d) vs (%d,%d)", &i, &j, &k, &l) == 4) {
      EXPECT_NEAR(std::abs(th[i] - th[j]), std::abs(th[k] - th[l]), 1e-12) << c.witness;
    } else {
      ASSERT_EQ(std::sscanf(c.witness.c_str(), "theta(%d,%d)", &i, &j), 2) << c.witness;
      EXPECT_EQ(th[i], th[j]);
    }
  }
}

TEST(QuditCheck, ShiftInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> small(0, 10);
  const auto psi = random_state(5, 9, PrecisionSpec{});
  for (int t = 0; t < 100; ++t) {
    std::vector<double> th(5), sh(5);
    for (int k = 0; k < 5; ++k) {
      th[k] = small(rng);
      sh[k] = th[k] + 0.75;
    }
    EXPECT_EQ(check_qudit_constraints(explicit_angles(th)).valid, check_qudit_constraints(explicit_angles(sh)).valid);
    const auto q1 = prob_qudit_second(psi, explicit_angles(th));
    const auto q2 = prob_qudit_second(psi, explicit_angles(sh));
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(q1[j], q2[j], 1e-12);
  }
}

TEST(LocalCheck, Examples) {
  EXPECT_TRUE(check_local_constraints(gen_geometric(3, 1.0, AngleMode::qubit_local)).valid);
  const auto dup = check_local_constraints(explicit_angles({1, 1}, AngleMode::qubit_local));
  EXPECT_FALSE(dup.valid);
  EXPECT_EQ(dup.witness, "a1 - a2 = 0");
  EXPECT_TRUE(check_local_constraints(gen_sqrt_prime(3, AngleMode::qubit_local), 1e-6).valid);
}

TEST(LocalCheck, GeometricValidToSixteen) {
  for (int n = 2; n <= 16; ++n) EXPECT_TRUE(check_local_constraints(gen_geometric(n, 1.0, AngleMode::qubit_local)).valid) << n;
}

TEST(LocalCheck, AgreesWithBruteForce) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> small(1, 9);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(4);
    for (double& v : a) v = small(rng);
    EXPECT_EQ(check_local_constraints(explicit_angles(a, AngleMode::qubit_local)).valid, local_valid_bruteforce(a, 1e-6));
  }
  for (int n = 2; n <= 6; ++n) {
    const auto g = gen_geometric(n, 1.0, AngleMode::qubit_local);
    EXPECT_TRUE(local_valid_bruteforce(g.angles, 1e-9));
  }
}

TEST(LocalCheck, TooLargeAdvisesSampling) {
  try {
    check_local_constraints(gen_geometric(kMaxExhaustiveLocalQubits + 1, 1.0, AngleMode::qubit_local));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sampled"), std::string::npos);
  }
  EXPECT_TRUE(check_local_constraints_sampled(gen_geometric(20, 1.0, AngleMode::qubit_local), 20000, 1).valid);
  EXPECT_FALSE(check_local_constraints_sampled(explicit_angles(std::vector<double>(20, 1.0), AngleMode::qubit_local), 20000, 1).valid);
}

TEST(SupportCheck, WLikeTwentyQubits) {
  std::vector<std::size_t> v;
  for (int j = 0; j < 20; ++j) v.push_back(std::size_t{1} << j);
  EXPECT_TRUE(check_support_constraints(gen_geometric(20, 1.0, AngleMode::qubit_local), v).valid);
  EXPECT_TRUE(check_support_constraints(gen_sqrt_prime(20, AngleMode::qubit_local), v).valid);
}

TEST(Checked, RecordsVerdict) {
  const auto a = checked(gen_geometric(5, 1.0));
  EXPECT_EQ(a.check.kind, CheckStatus::Kind::valid);
  const auto b = checked(explicit_angles({0, 1, 2}));
  EXPECT_EQ(b.check.kind, CheckStatus::Kind::invalid);
  EXPECT_FALSE(b.check.witness.empty());
}

void expect_unitary(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd e = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  EXPECT_LT(e.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildUnitary, Examples) {
  const auto id = build_unitary(computational_basis(4));
  EXPECT_TRUE(id.isApprox(Eigen::MatrixXcd::Identity(4, 4)));
  const auto h = build_unitary(qudit_basis(explicit_angles({0, 0})));
  const double s = 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(h(0, 0) - s), 0, 1e-15);
  EXPECT_NEAR(std::abs(h(0, 1) - s), 0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 0) - s), 0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 1) + s), 0, 1e-15);
  expect_unitary(build_unitary(qudit_basis(gen_geometric(16, 0.3))));
  expect_unitary(build_unitary(local_basis(gen_sqrt_prime(5, AngleMode::qubit_local))));
  expect_unitary(build_unitary(hadamard_basis(4)));
  EXPECT_THROW(build_unitary(hadamard_basis(13)), Error);
}

TEST(BuildUnitary, LocalIsOrderedProduct) {
  // Single qubit: columns of R H are (1, e^{ia})/sqrt2 and (1, -e^{ia})/sqrt2.
  const auto u = build_unitary(local_basis(explicit_angles({0.4}, AngleMode::qubit_local)));
  const double s = 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(u(1, 0) - std::polar(s, 0.4)), 0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) + std::polar(s, 0.4)), 0, 1e-15);
  // Two qubits, qubit 1 least significant: column 0 entry 1 carries alpha_1.
  const auto v = build_unitary(local_basis(explicit_angles({0.4, 1.1}, AngleMode::qubit_local)));
  EXPECT_NEAR(std::abs(v(1, 0) - std::polar(0.5, 0.4)), 0, 1e-15);
  EXPECT_NEAR(std::abs(v(2, 0) - std::polar(0.5, 1.1)), 0, 1e-15);
  EXPECT_NEAR(std::abs(v(3, 0) - std::polar(0.5, 1.5)), 0, 1e-15);
}

TEST(MaskToSupport, Semantics) {
  const auto a = gen_geometric(4, 1.0);
  SparseSupport full{{0, 1, 2, 3}, 0, 1e-9};
  EXPECT_EQ(mask_to_support(a, full).angles, a.angles);
  SparseSupport v{{0, 3}, 0, 1e-9};
  const auto m = mask_to_support(a, v);
  EXPECT_EQ(m.angles, (std::vector<double>{0.5, 0, 0, 4}));
}

TEST(MaskToSupport, DistributionUnchanged) {
  const auto a = gen_sqrt_prime(8);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> r(8), phi(8);
    for (int k = 0; k < 8; ++k) {
      r[k] = u(rng) < 0.5 ? 0.0 : u(rng);
      phi[k] = kTwoPi * u(rng);
    }
    r[seed % 8] = 1.0;
    const auto psi = from_polar(r, phi);
    const auto sup = support_of(prob_computational(psi).values);
    const auto q1 = prob_qudit_second(psi, a);
    const auto q2 = prob_qudit_second(psi, mask_to_support(a, sup));
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(q1[j], q2[j], 1e-12);
  }
}

TEST(MeasurementBasis, PhaseRounding) {
  auto b = qudit_basis(explicit_angles({0.0, 1.0}), 3);
  EXPECT_EQ(b.phase_factor(1.0), cplx(0.54, 0.841));
  EXPECT_EQ(local_basis(explicit_angles({0.3, 0.2}, AngleMode::qubit_local)).dim, 4u);
  EXPECT_THROW(local_basis(gen_geometric(3, 1.0)), Error);
  EXPECT_THROW(qudit_basis(gen_geometric(3, 1.0, AngleMode::qubit_local)), Error);
}

}  // namespace
}  // namespace twobase
