// Copyright 2026 The cqed-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cqed/model.hpp"

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

namespace cqed {
namespace {

SystemConfig fig1_single() {
  SystemConfig c;
  c.cavity = CavityParams::symmetric(0.0, 48.0);
  EmitterParams e;
  e.g = 7.3;
  e.gamma = 0.19;
  c.emitters.push_back(e);
  return c;
}

TEST(Cooperativity, DeviceValues) {
  EXPECT_NEAR(cooperativity(7.3, 48.0, 0.19), 23.37, 0.005);
  EXPECT_NEAR(cooperativity(7.3, 39.0, 0.5), 10.93, 0.005);
  EXPECT_EQ(cooperativity(0.0, 48.0, 0.19), 0.0);
}

TEST(Cooperativity, RejectsNonPositiveRates) {
  EXPECT_THROW(cooperativity(7.3, 0.0, 0.19), std::domain_error);
  EXPECT_THROW(cooperativity(7.3, 48.0, -1.0), std::domain_error);
}

TEST(Cooperativity, InvariantUnderCommonScaling) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 50.0), s(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double g = u(rng), k = u(rng), gm = u(rng), f = s(rng);
    EXPECT_NEAR(cooperativity(f * g, f * k, f * gm), cooperativity(g, k, gm),
                1e-12 * cooperativity(g, k, gm));
  }
}

TEST(PurcellLinewidth, ResonantAndFarDetuned) {
  EXPECT_NEAR(purcell_linewidth(0.0, 7.3, 48.0, 0.19), 4.63, 0.005);
  // Value at 7 kappa frozen from an independent evaluation of the formula.
  EXPECT_NEAR(purcell_linewidth(336.0, 7.3, 48.0, 0.19), 0.21254230118443318, 1e-12);
  EXPECT_DOUBLE_EQ(purcell_linewidth(123.0, 0.0, 48.0, 0.19), 0.19);
}

TEST(PurcellLinewidth, DispersivePeakWidthNearHalfGHz) {
  // Fig-1D quotes 0.5 GHz at 79 GHz detuning; +-20%.
  EXPECT_NEAR(purcell_linewidth(79.0, 7.3, 48.0, 0.19), 0.5, 0.1);
}

TEST(PurcellLinewidth, RejectsNonPositiveKappa) {
  EXPECT_THROW(purcell_linewidth(0.0, 7.3, 0.0, 0.19), std::domain_error);
}

TEST(PurcellLinewidth, EvenAndHalvesAtHalfKappa) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 50.0), d(-500.0, 500.0);
  for (int i = 0; i < 500; ++i) {
    const double g = u(rng), k = u(rng), gm = u(rng), delta = d(rng);
    const double excess = purcell_linewidth(delta, g, k, gm) - gm;
    EXPECT_EQ(purcell_linewidth(-delta, g, k, gm) - gm, excess);
    const double peak = purcell_linewidth(0.0, g, k, gm) - gm;
    EXPECT_NEAR(purcell_linewidth(0.5 * k, g, k, gm) - gm, 0.5 * peak, 1e-12 * peak);
    EXPECT_LE(excess, peak * (1 + 1e-15));
  }
}

TEST(TransitionFrequencies, ZeroFieldDegenerate) {
  ZeemanModel z{0.0, 0.6, -0.6, 1.0};
  const auto f = transition_frequencies(z, 0.0);
  EXPECT_EQ(f.omega_up, 0.0);
  EXPECT_EQ(f.omega_down, 0.0);
  EXPECT_DOUBLE_EQ(transition_frequencies(z, 5.0).omega_up, 3.0);
  EXPECT_DOUBLE_EQ(transition_frequency(z, Spin::down, 5.0), -3.0);
}

TEST(TransitionFrequencies, ExactlyLinear) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(-200.0, 200.0), s(-3.0, 3.0), b(0.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    ZeemanModel z{w(rng), s(rng), s(rng), 1.0};
    const double b1 = b(rng), b2 = b(rng);
    const auto f1 = transition_frequencies(z, b1), f2 = transition_frequencies(z, b2);
    const auto f12 = transition_frequencies(z, b1 + b2), f0 = transition_frequencies(z, 0.0);
    EXPECT_NEAR(f1.omega_up + f2.omega_up, f12.omega_up + f0.omega_up, 1e-12 * 400);
    EXPECT_NEAR(f1.omega_down + f2.omega_down, f12.omega_down + f0.omega_down, 1e-12 * 400);
  }
}

TEST(TransitionFrequencies, OppositeSlopesCrossAtHalfOffsetOverSlope) {
  // Emitter 1 up-transition at -d0/2 + s B, emitter 2 down-transition at
  // +d0/2 - s B; solving gives B* = d0 / (2 s).
  const double s = 0.6, d0 = 5.16;
  ZeemanModel a{-0.5 * d0, s, -s, 1.0}, b{0.5 * d0, s, -s, 1.0};
  const double bstar = d0 / (2 * s);
  EXPECT_NEAR(transition_frequency(a, Spin::up, bstar), transition_frequency(b, Spin::down, bstar), 1e-12);
  EXPECT_NEAR(bstar, 4.3, 1e-12);
}

TEST(Validate, AcceptsFigureOneParameters) {
  EXPECT_NO_THROW(validate(fig1_single()));
  SystemConfig empty;
  empty.cavity = CavityParams::symmetric(0.0, 48.0);
  EXPECT_NO_THROW(validate(empty));
}

TEST(Validate, NamesPortDecomposition) {
  auto c = fig1_single();
  c.cavity.kappa_in = 30.0;
  c.cavity.kappa_out = 30.0;
  try {
    validate(c);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_NE(e.issues()[0].path.find("kappa_in+kappa_out"), std::string::npos);
  }
}

TEST(Validate, ZeroGammaRejected) {
  auto c = fig1_single();
  c.emitters[0].gamma = 0.0;
  EXPECT_THROW(validate(c), ValidationError);
}

TEST(Validate, ReportsEveryViolation) {
  auto c = fig1_single();
  c.cavity.kappa = -1.0;
  c.b_field = -2.0;
  c.emitters[0].gamma = 0.0;
  c.emitters[0].g = -1.0;
  c.emitters[0].zeeman.branching_fraction = 1.5;
  const auto issues = find_issues(c);
  std::vector<std::string> paths;
  for (const auto& i : issues) paths.push_back(i.path);
  for (const char* expected : {"cavity.kappa", "b_field", "emitters[0].gamma", "emitters[0].g",
                               "emitters[0].zeeman.branching_fraction"})
    EXPECT_NE(std::find(paths.begin(), paths.end(), expected), paths.end()) << expected;
}

TEST(SpinMixture, UnpolarizedExpandsWithEqualWeights) {
  auto c = fig1_single();
  c.emitters.push_back(c.emitters[0]);
  c.emitters.push_back(c.emitters[0]);
  c.emitters[0].prepared_spin = SpinPrep::unpolarized;
  c.emitters[1].prepared_spin = SpinPrep::down;
  c.emitters[2].prepared_spin = SpinPrep::unpolarized;
  const auto terms = spin_mixture(c);
  ASSERT_EQ(terms.size(), 4u);
  double total = 0.0;
  for (const auto& t : terms) {
    total += t.weight;
    EXPECT_EQ(t.spins[1], Spin::down);
  }
  EXPECT_DOUBLE_EQ(total, 1.0);
  EXPECT_THROW(definite_spins(c), ValidationError);
}

TEST(SpinMixture, InactiveEmitterHasNoTransition) {
  auto c = fig1_single();
  c.emitters.push_back(c.emitters[0]);
  c.emitters[1].active = false;
  const auto spins = definite_spins(c);
  EXPECT_FALSE(spins[1].has_value());
  const auto tr = probe_coupled(c, spins);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr[0].emitter, 0u);
}

TEST(Detunings, CavityMinusTransition) {
  auto c = fig1_single();
  c.cavity.omega_c = 79.0;
  c.b_field = 2.0;
  c.emitters[0].zeeman = {1.0, 0.5, -0.5, 1.0};
  EXPECT_DOUBLE_EQ(detunings(c, definite_spins(c)).at(0), 79.0 - 2.0);
}

}  // namespace
}  // namespace cqed
