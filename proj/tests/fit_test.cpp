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

#include "cqed/fit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cqed/spectrum.hpp"
#include "oracles/oracles.hpp"

namespace cqed {
namespace {

EmitterParams emitter(double omega, double g, double gamma) {
  EmitterParams e;
  e.g = g;
  e.gamma = gamma;
  e.zeeman.omega_zero = omega;
  return e;
}

SystemConfig device1(double emitter_omega = 0.0) {
  SystemConfig c;
  c.cavity = CavityParams::symmetric(0.0, 48.0);
  c.emitters = {emitter(emitter_omega, 7.3, 0.19)};
  return c;
}

FitProblem synthetic(const ModelParams& truth, std::vector<double> grid, double noise = 0.0,
                     std::uint64_t noise_seed = 0) {
  FitProblem p;
  p.omega = std::move(grid);
  p.T = model_T(p.omega, truth);
  if (noise > 0.0) {
    const double peak = *std::max_element(p.T.begin(), p.T.end());
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> n(0.0, noise * peak);
    for (auto& t : p.T) t += n(rng);
  }
  p.fixed = truth;
  return p;
}

// Dense near the emitter, coarse over the cavity line.
std::vector<double> dip_grid(std::size_t points) {
  auto g = linear_grid(-60.0, 60.0, points / 2);
  auto fine = linear_grid(-3.0, 3.0, points - points / 2);
  g.insert(g.end(), fine.begin(), fine.end());
  std::sort(g.begin(), g.end());
  return g;
}

TEST(ModelT, ReducesToSpectrum) {
  ModelParams m{device1(1.5)};
  const auto grid = linear_grid(-30.0, 30.0, 301);
  const auto spectrum = transmission_spectrum(grid, validate(m.system));
  const auto T = model_T(grid, m);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(T[k], spectrum.intensity[k]);
  m.amplitude = 0.0;
  for (double t : model_T(grid, m)) EXPECT_EQ(t, 0.0);
}

TEST(ModelT, CoherentBackgroundAddsInAmplitude) {
  ModelParams m{device1(1.5), 0.8, 0.3, 2.1};
  const auto cfg = validate(m.system);
  for (double w : {-20.0, 0.0, 1.5, 1.6, 40.0}) {
    const Complex t = steady_state_oracle(w, cfg) + std::polar(0.3, 2.1);
    EXPECT_NEAR(model_T(w, m), 0.64 * std::norm(t), 1e-13);
  }
}

TEST(Residual, ZeroAtGeneratorAndDuplicatesDouble) {
  ModelParams truth{device1(), 0.9, 0.1, 0.4};
  auto p = synthetic(truth, linear_grid(-20, 20, 60), 0.01, 3);
  p.free = {{"g[0]", 1, 20, 7.3}, {"kappa", 10, 100, 48}};
  EXPECT_GT(residual(p, std::vector<double>{7.3, 48}), 0.0);
  const double single = residual(p, std::vector<double>{7.0, 50});
  p.omega.push_back(p.omega[5]);
  p.T.push_back(p.T[5]);
  const double once_more = residual(p, std::vector<double>{7.0, 50});
  const double r5 = model_T(p.omega[5], cqed::apply(p, std::vector<double>{7.0, 50})) - p.T[5];
  EXPECT_NEAR(once_more - single, r5 * r5, 1e-15);

  auto clean = synthetic(truth, linear_grid(-20, 20, 60));
  clean.free = p.free;
  EXPECT_EQ(residual(clean, std::vector<double>{7.3, 48}), 0.0);
}

TEST(Residual, NoiselessOptimumIsLocalMinimum) {
  ModelParams truth{device1()};
  auto p = synthetic(truth, dip_grid(200));
  p.free = {{"g[0]", 1, 20, 7.3}, {"kappa", 10, 100, 48}, {"gamma[0]", 0.01, 2, 0.19}};
  const std::vector<double> best{7.3, 48, 0.19};
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c) {
        const std::vector<double> x{7.3 * (1 + 1e-3 * a), 48 * (1 + 1e-3 * b), 0.19 * (1 + 1e-3 * c)};
        EXPECT_GE(residual(p, x), residual(p, best));
      }
}

TEST(Apply, KappaKeepsPortRatiosAndOmegaIsPreparedTransition) {
  ModelParams base{device1()};
  base.system.cavity.kappa_in = 12.0;
  base.system.cavity.kappa_out = 30.0;
  base.system.b_field = 2.0;
  base.system.emitters[0].zeeman.slope_up = 0.6;
  base.system.emitters[0].zeeman.slope_down = -0.6;
  base.system.emitters[0].prepared_spin = SpinPrep::down;
  FitProblem p;
  p.fixed = base;
  p.free = {{"kappa", 10, 100, 48}, {"omega[0]", -10, 10, 0}};
  const auto m = cqed::apply(p, std::vector<double>{24.0, 3.0});
  EXPECT_DOUBLE_EQ(m.system.cavity.kappa_in, 6.0);
  EXPECT_DOUBLE_EQ(m.system.cavity.kappa_out, 15.0);
  EXPECT_DOUBLE_EQ(transition_frequency(m.system.emitters[0].zeeman, Spin::down, 2.0), 3.0);
  EXPECT_THROW(cqed::apply(p, std::vector<double>{1.0}), ValidationError);
}

TEST(FindIssues, ReportsEveryProblem) {
  FitProblem p;
  p.fixed = ModelParams{device1()};
  p.omega = {0, 1, 2, 3, 4};
  p.T = {1, 1, 1, 1, 1};
  p.free = {{"g[0]", 0.0, 20, 7.3},     // log-scaled with zero lower bound
            {"g[0]", 1, 20, 7.3},       // duplicate
            {"gamma[3]", 0.1, 1, 0.2},  // no such emitter
            {"kappa", 10, 100, 200},    // initial outside
            {"zeta", 0, 1, 0.5},        // unknown
            {"b", 1, 1, 1}};            // empty interval
  const auto issues = find_issues(p);
  auto has = [&](const std::string& path, const std::string& needle) {
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) {
      return i.path == path && i.message.find(needle) != std::string::npos;
    });
  };
  EXPECT_TRUE(has("free.g[0]", "positive lower bound"));
  EXPECT_TRUE(has("free.g[0]", "listed twice"));
  EXPECT_TRUE(has("free.gamma[3]", "out of range"));
  EXPECT_TRUE(has("free.kappa", "outside bounds"));
  EXPECT_TRUE(has("free.zeta", "unknown"));
  EXPECT_TRUE(has("free.b", "lower < upper"));
  EXPECT_TRUE(has("data", "3 data points"));
  EXPECT_THROW(fit(p), ValidationError);
}

TEST(Fit, NoiselessSingleEmitterRecovery) {
  ModelParams truth{device1()};
  auto p = synthetic(truth, dip_grid(400));
  p.free = {{"g[0]", 1, 20, 5.0}, {"kappa", 10, 150, 70}, {"gamma[0]", 0.01, 2, 0.5}};
  const auto r = fit(p);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.best[0], 7.3, 1e-4 * 7.3);
  EXPECT_NEAR(r.best[1], 48.0, 1e-4 * 48.0);
  EXPECT_NEAR(r.best[2], 0.19, 1e-4 * 0.19);
  EXPECT_LE(r.rss, r.initial_rss);
  EXPECT_EQ(r.restarts_used, 16u);
}

TEST(Fit, EmptyCavityLorentzianWidth) {
  ModelParams truth{device1()};
  truth.system.emitters[0].g = 0.0;
  auto p = synthetic(truth, linear_grid(-100, 100, 201));
  p.free = {{"kappa", 5, 200, 20}};
  const auto r = fit(p);
  EXPECT_NEAR(r.best[0], 48.0, 1e-5 * 48.0);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TEST(Fit, NoisyRecoveryMedianWithinTolerances) {
  ModelParams truth{device1()};
  std::vector<double> dg, dk, dgamma;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto p = synthetic(truth, dip_grid(400), 0.01, seed);
    p.free = {{"g[0]", 1, 20, 5.0}, {"kappa", 10, 150, 70}, {"gamma[0]", 0.01, 2, 0.5}};
    p.seed = seed;
    const auto r = fit(p);
    dg.push_back(std::abs(r.best[0] / 7.3 - 1.0));
    dk.push_back(std::abs(r.best[1] / 48.0 - 1.0));
    dgamma.push_back(std::abs(r.best[2] / 0.19 - 1.0));
  }
  EXPECT_LT(median(dg), 0.05);
  EXPECT_LT(median(dk), 0.05);
  EXPECT_LT(median(dgamma), 0.15);
}

TEST(Fit, BackgroundOnlyFitReachesNoiseFloor) {
  SystemConfig pair;
  pair.cavity = CavityParams::symmetric(0.0, 48.0);
  pair.emitters = {emitter(-79.3, 7.3, 0.19), emitter(-78.7, 7.3, 0.19)};
  ModelParams truth{pair, 1.3, 0.15, 0.8};
  auto p = synthetic(truth, linear_grid(-82.0, -76.0, 300), 0.01, 11);
  p.fixed.amplitude = 1.0;
  p.fixed.background = 0.0;
  p.fixed.background_phase = 0.0;
  p.free = {{"A", 0.1, 5, 1.0}, {"b", 0, 1, 0.0}, {"phi", -3.2, 3.2, 0.0}};
  const double floor = residual(p, std::vector<double>{1.3, 0.15, 0.8});
  const auto r = fit(p);
  EXPECT_LE(r.rss, floor);
  EXPECT_NEAR(r.best[0], 1.3, 0.02);
}

TEST(Fit, DeterministicAcrossThreads) {
  ModelParams truth{device1()};
  auto p = synthetic(truth, dip_grid(100), 0.01, 5);
  p.free = {{"g[0]", 1, 20, 5.0}, {"kappa", 10, 150, 70}};
  p.restarts = 5;
  const auto a = fit(p, 1);
  const auto b = fit(p, 4);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.rss, b.rss);
  EXPECT_EQ(a.best_start, b.best_start);
}

TEST(Fit, BudgetExhaustionReportsNotConverged) {
  ModelParams truth{device1()};
  auto p = synthetic(truth, dip_grid(100));
  p.free = {{"g[0]", 1, 20, 5.0}, {"kappa", 10, 150, 70}, {"gamma[0]", 0.01, 2, 0.5}};
  p.restarts = 0;
  p.max_evaluations = 10;
  const auto r = fit(p);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.rss, r.initial_rss);
}

TEST(Fit, TranslationInvariance) {
  ModelParams truth{device1(0.7)};
  auto p = synthetic(truth, dip_grid(200), 0.01, 9);
  p.free = {{"omega_c", -10, 10, 0}, {"omega[0]", -10, 10, 0.7}, {"g[0]", 1, 20, 7.3}};
  auto shifted = p;
  const double offset = 37.0;
  for (auto& w : shifted.omega) w += offset;
  shifted.free = {{"omega_c", 27, 47, 37}, {"omega[0]", 27, 47, 37.7}, {"g[0]", 1, 20, 7.3}};
  const auto r = fit(p);
  const double at_shift = residual(shifted, std::vector<double>{r.best[0] + offset, r.best[1] + offset, r.best[2]});
  EXPECT_NEAR(at_shift, r.rss, 1e-9 * r.rss);
}

TEST(Fit, FrequencyScaleHomogeneity) {
  ModelParams truth{device1(0.7)};
  const auto grid = dip_grid(200);
  const auto T = model_T(grid, truth);
  for (double s : {0.01, 2.0, 1000.0}) {
    ModelParams scaled = truth;
    scaled.system.cavity.omega_c *= s;
    scaled.system.cavity.kappa *= s;
    scaled.system.cavity.kappa_in *= s;
    scaled.system.cavity.kappa_out *= s;
    for (auto& e : scaled.system.emitters) {
      e.g *= s;
      e.gamma *= s;
      e.zeeman.omega_zero *= s;
    }
    std::vector<double> g2(grid);
    for (auto& w : g2) w *= s;
    const auto T2 = model_T(g2, scaled);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(T2[k], T[k], 1e-12);
    const auto& e = scaled.system.emitters[0];
    EXPECT_NEAR(cooperativity(e.g, scaled.system.cavity.kappa, e.gamma), cooperativity(7.3, 48, 0.19), 1e-12);
  }
}

}  // namespace
}  // namespace cqed
