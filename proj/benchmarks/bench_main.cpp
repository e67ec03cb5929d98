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

#include <benchmark/benchmark.h>

#include <random>

#include "cqed/dispersive.hpp"
#include "cqed/fit.hpp"
#include "cqed/readout.hpp"
#include "cqed/spectrum.hpp"

namespace cqed {
namespace {

SystemConfig chain(int n) {
  SystemConfig c;
  c.cavity = CavityParams::symmetric(0.0, 39.0);
  for (int j = 0; j < n; ++j) {
    EmitterParams e;
    e.g = 7.3;
    e.gamma = 0.5;
    e.zeeman.omega_zero = -111.58 + 5.16 * j / std::max(1, n - 1);
    e.zeeman.slope_up = 0.6;
    e.zeeman.slope_down = -0.6;
    e.prepared_spin = j % 2 ? SpinPrep::down : SpinPrep::up;
    c.emitters.push_back(e);
  }
  return c;
}

void BM_Spectrum(benchmark::State& state) {
  const auto cfg = validate(chain(static_cast<int>(state.range(0))));
  const auto grid = linear_grid(-120.0, 20.0, 2001);
  for (auto _ : state) benchmark::DoNotOptimize(transmission_spectrum(grid, cfg, 1));
  state.SetItemsProcessed(state.iterations() * 2001);
}
BENCHMARK(BM_Spectrum)->Arg(1)->Arg(2)->Arg(5);

void BM_SteadyStateOracle(benchmark::State& state) {
  const auto cfg = validate(chain(static_cast<int>(state.range(0))));
  double w = -110.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(steady_state_oracle(w, cfg));
    w += 1e-3;
  }
}
BENCHMARK(BM_SteadyStateOracle)->Arg(1)->Arg(5);

void BM_CollectiveModes(benchmark::State& state) {
  const auto cfg = validate(chain(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    const auto sys = effective_matrix(cfg);
    std::vector<double> g;
    for (const auto& t : sys.transitions) g.push_back(t.g);
    benchmark::DoNotOptimize(collective_modes(sys.matrix, g));
  }
}
BENCHMARK(BM_CollectiveModes)->Arg(2)->Arg(5);

void BM_FieldSweep(benchmark::State& state) {
  const auto cfg = validate(chain(2));
  SweepSpec spec;
  spec.b_values = linear_grid(0.0, 10.0, 200);
  spec.components = {{Spin::up, Spin::down}};
  spec.probe_grid = linear_grid(-115.0, -103.0, 2001);
  for (auto _ : state) benchmark::DoNotOptimize(field_sweep(cfg, spec, 1));
}
BENCHMARK(BM_FieldSweep)->Unit(benchmark::kMillisecond);

void BM_Readout(benchmark::State& state) {
  auto p = calibrate_rates(96.0, 16.0, 7.0, 13.95);
  p.trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_readout(p, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_Readout)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SemiAnalyticFidelity(benchmark::State& state) {
  const auto p = calibrate_rates(96.0, 16.0, 7.0, 13.95);
  for (auto _ : state) benchmark::DoNotOptimize(semi_analytic_fidelity(p));
}
BENCHMARK(BM_SemiAnalyticFidelity)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  ModelParams truth;
  truth.system = chain(1);
  truth.system.emitters[0].zeeman.omega_zero = 0.0;
  truth.system.cavity.kappa = 48.0;
  truth.system.cavity.kappa_in = truth.system.cavity.kappa_out = 24.0;
  FitProblem p;
  p.omega = linear_grid(-60.0, 60.0, 400);
  p.T = model_T(p.omega, truth);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (auto& t : p.T) t += noise(rng);
  p.fixed = truth;
  p.free = {{"g[0]", 1, 20, 5.0}, {"kappa", 10, 150, 70}, {"gamma[0]", 0.01, 2, 0.5}};
  for (auto _ : state) benchmark::DoNotOptimize(fit(p, 1));
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace cqed

BENCHMARK_MAIN();
