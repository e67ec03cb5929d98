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

// Least-squares extraction of cavity-QED parameters from transmission data.

#ifndef CQED_FIT_HPP_
#define CQED_FIT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cqed/model.hpp"

namespace cqed {

/// Physics plus the detection-side amplitude A and a coherent background
/// b e^{i phi} added to the transmitted field.
struct ModelParams {
  SystemConfig system;
  double amplitude = 1.0;
  double background = 0.0;
  double background_phase = 0.0;
};

/// |A|^2 <|t(w) + b e^{i phi}|^2>, averaged over the spin mixture.
double model_T(double omega_p, const ModelParams& params);
std::vector<double> model_T(std::span<const double> grid, const ModelParams& params);

/// A free parameter. Recognized names: omega_c, kappa, A, b, phi, and per
/// emitter g[j], gamma[j], omega[j] (the prepared transition frequency at the
/// configured field). g, gamma, kappa and A are searched in log space and need
/// a positive lower bound.
struct FreeParameter {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  double initial = 0.0;
};

struct FitProblem {
  std::vector<double> omega;  // probe frequencies
  std::vector<double> T;      // measured transmission
  ModelParams fixed;          // values of every parameter not listed in `free`
  std::vector<FreeParameter> free;
  unsigned restarts = 16;     // random starts in addition to `initial`
  std::uint64_t seed = 0;
  std::size_t max_evaluations = 20000;  // per start
};

struct FitResult {
  std::vector<double> best;  // in the order of FitProblem::free
  double rss = 0.0;
  double initial_rss = 0.0;
  std::size_t iterations = 0;  // simplex iterations of the winning start
  bool converged = false;
  unsigned restarts_used = 0;
  std::size_t best_start = 0;
};

std::vector<Issue> find_issues(const FitProblem& problem);

/// Fixed parameters with `values` substituted for the free ones.
ModelParams apply(const FitProblem& problem, std::span<const double> values);

/// Sum of squared differences between model_T and the data.
double residual(const FitProblem& problem, std::span<const double> values);

/// Bounded Nelder-Mead from the initial vector and from `restarts` further
/// starts drawn uniformly (in the search coordinates) inside the bounds. A
/// start converges when the simplex spans less than 1e-6 of the bound width
/// on every axis. Returns the lowest-rss start, lowest index on ties.
FitResult fit(const FitProblem& problem, unsigned threads = 0);

}  // namespace cqed

#endif  // CQED_FIT_HPP_
