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

// Single-shot spin readout by photon counting.
//
// A bright (up) spin transmits at `rate_bright` until it flips to the dark
// state after an exponentially distributed time; a dark (down) spin only sees
// the background `rate_dark` for the whole window. Fidelity is the balanced
// average of the two conditional success probabilities.

#ifndef CQED_READOUT_HPP_
#define CQED_READOUT_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cqed/model.hpp"

namespace cqed {

struct ReadoutParams {
  double rate_bright = 0.0;   // counts / ms
  double rate_dark = 0.0;     // counts / ms
  double flip_lifetime = 1.0; // ms; +inf disables flips
  double window = 1.0;        // ms
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

std::vector<Issue> find_issues(const ReadoutParams& params);
void validate(const ReadoutParams& params);

/// Dense photon-count histogram: freq[n] trials produced n counts.
struct Histogram {
  std::vector<std::uint64_t> freq;

  std::uint64_t total() const noexcept;
  double mean() const noexcept;
  /// Fraction of trials with fewer than `threshold` counts.
  double fraction_below(std::uint64_t threshold) const noexcept;
  void add(std::uint64_t count);
};

/// Result of picking a discrimination threshold. `up_is_bright` is false when
/// the orientation had to be reversed to keep fidelity >= 0.5.
struct ThresholdChoice {
  std::uint64_t threshold = 0;
  double fidelity = 0.5;
  bool up_is_bright = true;
  double error_up = 0.5;    // P(misassigned | up)
  double error_down = 0.5;  // P(misassigned | down)
};

struct ReadoutResult {
  Histogram histogram_up;
  Histogram histogram_down;
  std::uint64_t threshold = 0;
  double fidelity = 0.5;
  bool up_is_bright = true;
  double mean_up = 0.0;
  double mean_down = 0.0;
  double standard_error = 0.0;  // binomial s.e. of `fidelity`
};

/// Engine for one trial, derived only from (seed, spin, trial index). Trial i
/// therefore draws the same numbers under any thread count or ordering.
std::mt19937_64 trial_engine(std::uint64_t seed, Spin initial, std::uint64_t trial_index);

std::uint64_t simulate_trial(const ReadoutParams& params, Spin initial, std::mt19937_64& engine);

/// `trials` trials per initial spin; threshold fields are left at defaults.
ReadoutResult count_histograms(const ReadoutParams& params, unsigned threads = 0);

/// Maximizes 1 - (P(n < t | up) + P(n >= t | down)) / 2 over integer t, ties
/// going to the smaller t.
ThresholdChoice optimal_threshold(const Histogram& up, const Histogram& down);

/// Same, on probability mass functions indexed by count.
ThresholdChoice optimal_threshold(std::span<const double> pmf_up, std::span<const double> pmf_down);

/// count_histograms followed by optimal_threshold.
ReadoutResult simulate_readout(const ReadoutParams& params, unsigned threads = 0);

/// Count distributions with the flip time integrated out by adaptive
/// Gauss-Kronrod quadrature (no sampling).
struct CountDistributions {
  std::vector<double> pmf_up;
  std::vector<double> pmf_down;
};
CountDistributions semi_analytic_distributions(const ReadoutParams& params);
ThresholdChoice semi_analytic_threshold(const ReadoutParams& params);
double semi_analytic_fidelity(const ReadoutParams& params);

/// Expected counts in the window.
double expected_counts(const ReadoutParams& params, Spin initial);

/// Rates reproducing the given mean counts for a flip lifetime.
ReadoutParams calibrate_rates(double mean_up, double mean_down, double window,
                              double flip_lifetime);

/// Flip lifetime at which the rate-calibrated model reaches `target_fidelity`.
/// Throws NumericalError when the target is not bracketed.
double calibrate_flip_lifetime(double mean_up, double mean_down, double window,
                               double target_fidelity);

/// 1/2 sqrt(e_up (1 - e_up) / n + e_down (1 - e_down) / n).
double fidelity_standard_error(double error_up, double error_down, std::uint64_t trials);

}  // namespace cqed

#endif  // CQED_READOUT_HPP_
