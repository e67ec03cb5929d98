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

#include "cqed/readout.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cqed/parallel.hpp"

namespace cqed {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double poisson_pmf(std::uint64_t n, double mean) {
  if (mean <= 0.0) return n == 0 ? 1.0 : 0.0;
  const double k = static_cast<double>(n);
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

bool flips(const ReadoutParams& p) { return std::isfinite(p.flip_lifetime); }

// Mean bright-state exposure E[min(t_flip, window)].
double bright_exposure(const ReadoutParams& p) {
  if (!flips(p)) return p.window;
  return -p.flip_lifetime * std::expm1(-p.window / p.flip_lifetime);
}

}  // namespace

std::vector<Issue> find_issues(const ReadoutParams& p) {
  std::vector<Issue> issues;
  if (!(p.rate_bright >= 0.0) || !std::isfinite(p.rate_bright))
    issues.push_back({"readout.rate_bright", "must be finite and >= 0"});
  if (!(p.rate_dark >= 0.0) || !std::isfinite(p.rate_dark))
    issues.push_back({"readout.rate_dark", "must be finite and >= 0"});
  if (!(p.flip_lifetime > 0.0)) issues.push_back({"readout.flip_lifetime", "must be > 0"});
  if (!(p.window > 0.0) || !std::isfinite(p.window))
    issues.push_back({"readout.window", "must be finite and > 0"});
  if (p.trials < 1) issues.push_back({"readout.trials", "must be >= 1"});
  return issues;
}

void validate(const ReadoutParams& params) {
  auto issues = find_issues(params);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::uint64_t Histogram::total() const noexcept {
  std::uint64_t n = 0;
  for (auto f : freq) n += f;
  return n;
}

double Histogram::mean() const noexcept {
  const auto n = total();
  if (n == 0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < freq.size(); ++k) s += static_cast<double>(k) * static_cast<double>(freq[k]);
  return s / static_cast<double>(n);
}

double Histogram::fraction_below(std::uint64_t threshold) const noexcept {
  const auto n = total();
  if (n == 0) return 0.0;
  std::uint64_t below = 0;
  for (std::size_t k = 0; k < freq.size() && k < threshold; ++k) below += freq[k];
  return static_cast<double>(below) / static_cast<double>(n);
}

void Histogram::add(std::uint64_t count) {
  if (count >= freq.size()) freq.resize(count + 1, 0);
  ++freq[count];
}

std::mt19937_64 trial_engine(std::uint64_t seed, Spin initial, std::uint64_t trial_index) {
  const std::uint64_t stream = (trial_index << 1) | (initial == Spin::up ? 0u : 1u);
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

std::uint64_t simulate_trial(const ReadoutParams& p, Spin initial, std::mt19937_64& engine) {
  double mean = p.rate_dark * p.window;
  if (initial == Spin::up) {
    double bright_time = p.window;
    if (flips(p)) {
      std::exponential_distribution<double> flip(1.0 / p.flip_lifetime);
      bright_time = std::min(flip(engine), p.window);
    }
    mean = p.rate_bright * bright_time + p.rate_dark * (p.window - bright_time);
  }
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> counts(mean);
  return counts(engine);
}

ReadoutResult count_histograms(const ReadoutParams& params, unsigned threads) {
  validate(params);
  const std::size_t n = params.trials;
  std::vector<std::uint64_t> up(n), down(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto e_up = trial_engine(params.seed, Spin::up, i);
      up[i] = simulate_trial(params, Spin::up, e_up);
      auto e_down = trial_engine(params.seed, Spin::down, i);
      down[i] = simulate_trial(params, Spin::down, e_down);
    }
  });

  ReadoutResult r;
  for (auto c : up) r.histogram_up.add(c);
  for (auto c : down) r.histogram_down.add(c);
  // Both histograms span the same count range.
  const auto len = std::max(r.histogram_up.freq.size(), r.histogram_down.freq.size());
  r.histogram_up.freq.resize(len, 0);
  r.histogram_down.freq.resize(len, 0);
  r.mean_up = r.histogram_up.mean();
  r.mean_down = r.histogram_down.mean();
  return r;
}

ThresholdChoice optimal_threshold(std::span<const double> pmf_up, std::span<const double> pmf_down) {
  const double total_up = std::accumulate(pmf_up.begin(), pmf_up.end(), 0.0);
  const double total_down = std::accumulate(pmf_down.begin(), pmf_down.end(), 0.0);
  if (!(total_up > 0.0) || !(total_down > 0.0))
    throw ValidationError("histogram", "both count distributions must be non-empty");

  const std::size_t len = std::max(pmf_up.size(), pmf_down.size());
  ThresholdChoice best;
  best.fidelity = -1.0;
  double below_up = 0.0, below_down = 0.0;  // mass with count < t
  for (std::size_t t = 0; t <= len; ++t) {
    const double e_up = below_up / total_up;                // up read as down
    const double e_down = 1.0 - below_down / total_down;    // down read as up
    const double f = 1.0 - 0.5 * (e_up + e_down);
    if (f > best.fidelity) best = {t, f, true, e_up, e_down};
    if (1.0 - f > best.fidelity) best = {t, 1.0 - f, false, 1.0 - e_up, 1.0 - e_down};
    if (t < pmf_up.size()) below_up += pmf_up[t];
    if (t < pmf_down.size()) below_down += pmf_down[t];
  }
  return best;
}

ThresholdChoice optimal_threshold(const Histogram& up, const Histogram& down) {
  std::vector<double> pu(up.freq.begin(), up.freq.end());
  std::vector<double> pd(down.freq.begin(), down.freq.end());
  return optimal_threshold(pu, pd);
}

double fidelity_standard_error(double error_up, double error_down, std::uint64_t trials) {
  const double n = static_cast<double>(trials);
  return 0.5 * std::sqrt(error_up * (1.0 - error_up) / n + error_down * (1.0 - error_down) / n);
}

ReadoutResult simulate_readout(const ReadoutParams& params, unsigned threads) {
  auto r = count_histograms(params, threads);
  const auto choice = optimal_threshold(r.histogram_up, r.histogram_down);
  r.threshold = choice.threshold;
  r.fidelity = choice.fidelity;
  r.up_is_bright = choice.up_is_bright;
  r.standard_error = fidelity_standard_error(choice.error_up, choice.error_down, params.trials);
  return r;
}

CountDistributions semi_analytic_distributions(const ReadoutParams& p) {
  validate(p);
  const double top = std::max(p.rate_bright, p.rate_dark) * p.window;
  const auto len = static_cast<std::size_t>(std::ceil(top + 12.0 * std::sqrt(top) + 30.0));

  CountDistributions d;
  d.pmf_up.resize(len);
  d.pmf_down.resize(len);
  const double dark_mean = p.rate_dark * p.window;
  const double no_flip = flips(p) ? std::exp(-p.window / p.flip_lifetime) : 1.0;

  using boost::math::quadrature::gauss_kronrod;
  for (std::size_t n = 0; n < len; ++n) {
    d.pmf_down[n] = poisson_pmf(n, dark_mean);
    double up = no_flip * poisson_pmf(n, p.rate_bright * p.window);
    if (flips(p)) {
      const double mu_lo = std::min(dark_mean, p.rate_bright * p.window);
      const double mu_hi = std::max(dark_mean, p.rate_bright * p.window);
      const double mode = std::clamp(static_cast<double>(n), mu_lo, mu_hi);
      const double bound = poisson_pmf(n, mode) * p.window / p.flip_lifetime;
      if (bound < 1e-17) {
        d.pmf_up[n] = up;
        continue;
      }
      auto density = [&](double t) {
        const double mean = p.rate_bright * t + p.rate_dark * (p.window - t);
        return std::exp(-t / p.flip_lifetime) / p.flip_lifetime * poisson_pmf(n, mean);
      };
      // As a function of the mean, the Poisson term is a gamma density of
      // shape n + 1; integrate only over its bulk, split at the peak.
      double a = 0.0, b = p.window, peak = 0.5 * p.window;
      const double slope = p.rate_bright - p.rate_dark;
      if (slope != 0.0) {
        const double k = static_cast<double>(n) + 1.0;
        const double half = 12.0 * std::sqrt(k) + 12.0;
        const double t0 = (k - half - dark_mean) / slope;
        const double t1 = (k + half - dark_mean) / slope;
        a = std::clamp(std::min(t0, t1), 0.0, p.window);
        b = std::clamp(std::max(t0, t1), 0.0, p.window);
        peak = std::clamp((static_cast<double>(n) - dark_mean) / slope, a, b);
      }
      double error = 0.0;
      if (peak > a) up += gauss_kronrod<double, 31>::integrate(density, a, peak, 15, 1e-12, &error);
      if (b > peak) up += gauss_kronrod<double, 31>::integrate(density, peak, b, 15, 1e-12, &error);
    }
    d.pmf_up[n] = up;
  }
  return d;
}

ThresholdChoice semi_analytic_threshold(const ReadoutParams& params) {
  const auto d = semi_analytic_distributions(params);
  return optimal_threshold(d.pmf_up, d.pmf_down);
}

double semi_analytic_fidelity(const ReadoutParams& params) {
  return semi_analytic_threshold(params).fidelity;
}

double expected_counts(const ReadoutParams& p, Spin initial) {
  if (initial == Spin::down) return p.rate_dark * p.window;
  return p.rate_dark * p.window + (p.rate_bright - p.rate_dark) * bright_exposure(p);
}

ReadoutParams calibrate_rates(double mean_up, double mean_down, double window,
                              double flip_lifetime) {
  ReadoutParams p;
  p.window = window;
  p.flip_lifetime = flip_lifetime;
  p.rate_dark = mean_down / window;
  p.rate_bright = p.rate_dark + (mean_up - mean_down) / bright_exposure(p);
  validate(p);
  return p;
}

double calibrate_flip_lifetime(double mean_up, double mean_down, double window,
                               double target_fidelity) {
  auto fidelity_at = [&](double tau) {
    return semi_analytic_fidelity(calibrate_rates(mean_up, mean_down, window, tau));
  };
  double lo = std::log(0.1 * window), hi = std::log(1e4 * window);
  const double f_lo = fidelity_at(std::exp(lo)), f_hi = fidelity_at(std::exp(hi));
  if (!(f_lo < target_fidelity && target_fidelity < f_hi))
    throw NumericalError("calibrate_flip_lifetime: target fidelity not bracketed");
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fidelity_at(std::exp(mid)) < target_fidelity)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace cqed
