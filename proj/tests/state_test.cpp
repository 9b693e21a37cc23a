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
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "twobase/measure.hpp"
#include "twobase/state.hpp"

namespace twobase {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(RoundDecimal, HalfAwayFromZeroOnDecimalString) {
  EXPECT_EQ(round_decimal(0.7071067811865476, 3), 0.707);
  EXPECT_EQ(round_decimal(0.0005, 3), 0.001);
  EXPECT_EQ(round_decimal(-0.0005, 3), -0.001);
  // 2.675 is stored below 2.675 but its shortest decimal text is "2.675".
  EXPECT_EQ(round_decimal(2.675, 2), 2.68);
  EXPECT_EQ(round_decimal(0.9996, 3), 1.0);
  EXPECT_EQ(round_decimal(0.00049, 3), 0.0);
  EXPECT_EQ(round_decimal(123.456, 0), 123.0);
  EXPECT_TRUE(on_decimal_grid(0.125, 3));
  EXPECT_FALSE(on_decimal_grid(0.1255, 3));
}

TEST(FromPolar, BasisState) {
  const auto s = from_polar({1.0, 0.0}, {0.0, 0.0});
  EXPECT_EQ(s[0], cplx(1, 0));
  EXPECT_EQ(s[1], cplx(0, 0));
}

TEST(FromPolar, RelativeMinusSign) {
  const auto s = from_polar({1.0, 1.0}, {0.0, kPi});
  EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[1].real(), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[1].imag(), 0.0, 1e-15);
}

TEST(FromPolar, GlobalPhaseRemoved) {
  const auto s = from_polar({0.6, 0.8}, {0.7, 0.7});
  EXPECT_EQ(s.phase(0), 0.0);
  EXPECT_NEAR(s[1].real(), 0.8, 1e-15);
  EXPECT_NEAR(s.phase(1), 0.0, 1e-15);
}

TEST(FromPolar, Errors) {
  EXPECT_THROW(from_polar({0.0, 0.0}, {0.0, 0.0}), Error);
  EXPECT_THROW(from_polar(std::vector<double>{1.0}, std::vector<double>{0.0, 0.0}), Error);
  EXPECT_THROW(from_polar({1.0, -0.5}, {0.0, 0.0}), Error);
  EXPECT_THROW(from_polar({1.0, 1.0}, {0.0, std::nan("")}), Error);
}

TEST(RandomState, DeterministicPerSeed) {
  const PrecisionSpec spec;
  const auto a = random_state(8, 42, spec);
  const auto b = random_state(8, 42, spec);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(a[k], b[k]);
  const auto c = random_state(8, 43, spec);
  EXPECT_NE(a[1], c[1]);
}

TEST(RandomState, QuantizedToThreeDecimals) {
  const PrecisionSpec spec;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = random_state(8, seed, spec);
    ASSERT_TRUE(s.quantized());
    double sum = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      const double r = s.grid()->r[k];
      EXPECT_TRUE(on_decimal_grid(r, 3)) << r;
      EXPECT_TRUE(on_decimal_grid(s.grid()->cos[k], 3));
      EXPECT_TRUE(on_decimal_grid(s.grid()->sin[k], 3));
      sum += r * r;
    }
    EXPECT_LT(std::abs(sum - 1.0), 0.5e-2);
  }
}

TEST(RandomState, SelfFidelityAndBadDimension) {
  const auto s = random_state(2, 7, PrecisionSpec{});
  EXPECT_DOUBLE_EQ(fidelity(s, s), 1.0);
  EXPECT_THROW(random_state(1, 7, PrecisionSpec{}), Error);
}

TEST(WLike, TwoQubitUniform) {
  const double r[] = {1, 1}, phi[] = {0, 0};
  const auto s = w_like(2, r, phi);
  EXPECT_EQ(s[0], cplx(0, 0));
  EXPECT_NEAR(s[1].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[2].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s[3], cplx(0, 0));
}

TEST(WLike, TwentyQubitSupport) {
  std::vector<double> r(20, 1.0), phi(20);
  for (int j = 0; j < 20; ++j) phi[j] = 0.1 * j;
  const auto s = w_like(20, r, phi);
  const auto p = prob_computational(s);
  EXPECT_EQ(support_of(p.values).size(), 20u);
}

TEST(GhzLike, ThreeQubits) {
  const auto s = ghz_like(3, 1, 1, 0);
  EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[7].real(), 1 / std::sqrt(2.0), 1e-15);
  for (int k = 1; k < 7; ++k) EXPECT_EQ(s[k], cplx(0, 0));
  EXPECT_THROW(ghz_like(3, 0, 0, 0), Error);
  const double zeros[] = {0, 0};
  EXPECT_THROW(w_like(2, zeros, zeros), Error);
}

TEST(Quantize, BasisStateUnchanged) {
  const auto s = quantize(from_polar({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), PrecisionSpec{}, QuantizeSide::target);
  EXPECT_EQ(s[0], cplx(1, 0));
  EXPECT_EQ(s[1], cplx(0, 0));
}

TEST(Quantize, EqualSuperposition) {
  const auto s = quantize(from_polar({1.0, 1.0}, {0.0, 0.0}), PrecisionSpec{}, QuantizeSide::target);
  EXPECT_EQ(s.grid()->r[0], 0.707);
  EXPECT_EQ(s.grid()->r[1], 0.707);
  EXPECT_NEAR(s.norm2(), 0.999698, 1e-12);
  EXPECT_LT(std::abs(s.norm2() - 1.0), 0.5e-2);
}

TEST(Quantize, Idempotent) {
  const PrecisionSpec spec;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> r(6), phi(6);
    for (int k = 0; k < 6; ++k) {
      r[k] = u(rng);
      phi[k] = kTwoPi * u(rng);
    }
    const auto once = quantize(from_polar(r, phi), spec, QuantizeSide::candidate);
    const auto twice = quantize(once, spec, QuantizeSide::candidate);
    for (int k = 0; k < 6; ++k) EXPECT_EQ(once[k], twice[k]);
    EXPECT_EQ(once.phase(once.reference_index()), 0.0);
  }
}

TEST(Quantize, InfeasibleReported) {
  PrecisionSpec spec;
  spec.c1 = 0;
  spec.n1 = 6;
  EXPECT_THROW(quantize(from_polar({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}), spec, QuantizeSide::target), QuantizationError);
}

TEST(PrecisionSpec, Validation) {
  PrecisionSpec spec;
  EXPECT_NO_THROW(spec.validate());
  spec.c3 = 4;
  EXPECT_THROW(spec.validate(), Error);
  spec = PrecisionSpec{};
  spec.x = 5;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Fidelity, Examples) {
  const auto zero = from_polar({1.0, 0.0}, {0.0, 0.0});
  const auto one = from_polar({0.0, 1.0}, {0.0, 0.0});
  const auto plus = from_polar({1.0, 1.0}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(fidelity(zero, zero), 1.0);
  EXPECT_DOUBLE_EQ(fidelity(zero, one), 0.0);
  EXPECT_NEAR(fidelity(zero, plus), 0.5, 1e-15);
  EXPECT_THROW(fidelity(zero, from_polar({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0})), Error);
}

TEST(Fidelity, SymmetricAndGlobalPhaseInvariant) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<cplx> a(5), b(5);
    for (int k = 0; k < 5; ++k) {
      a[k] = {n(rng), n(rng)};
      b[k] = {n(rng), n(rng)};
    }
    const auto psi = normalized(a), phi = normalized(b);
    std::vector<cplx> rotated(a);
    for (auto& x : rotated) x *= std::polar(1.0, 1.234);
    EXPECT_NEAR(fidelity(psi, phi), fidelity(phi, psi), 1e-14);
    EXPECT_NEAR(fidelity(psi, phi), fidelity(normalized(rotated), phi), 1e-14);
    EXPECT_NEAR(fidelity(canonicalize(psi), phi), fidelity(psi, phi), 1e-14);
  }
}

TEST(Support, Examples) {
  std::vector<double> p(4, 0.0);
  p[0] = 1.0;
  auto s = support_of(p, 1e-9);
  EXPECT_EQ(s.support, std::vector<std::size_t>{0});
  EXPECT_EQ(s.reference, 0u);

  const double r[] = {1, 1, 1}, phi[] = {0, 0, 0};
  s = support_of(prob_computational(w_like(3, r, phi)).values);
  EXPECT_EQ(s.support, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(s.reference, 1u);

  const std::vector<double> q = {0.5, 1e-12, 0.5 - 1e-12, 0.0};
  s = support_of(q, 1e-6);
  EXPECT_FALSE(s.contains(1));
  EXPECT_TRUE(s.contains(2));
  EXPECT_THROW(support_of(std::vector<double>(3, 0.0)), Error);
}

TEST(Constructors, NormalizedBeforeQuantization) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> r(16), phi(16);
    for (int k = 0; k < 16; ++k) {
      r[k] = u(rng);
      phi[k] = 10 * u(rng) - 5;
    }
    const auto s = from_polar(r, phi);
    EXPECT_NEAR(s.norm2(), 1.0, 1e-12);
    EXPECT_EQ(s.phase(s.reference_index()), 0.0);
    for (int k = 0; k < 16; ++k) {
      EXPECT_GE(s.phase(k), 0.0);
      EXPECT_LT(s.phase(k), kTwoPi);
    }
  }
}

}  // namespace
}  // namespace twobase
