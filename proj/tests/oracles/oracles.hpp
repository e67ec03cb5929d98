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

// Test-only reference computations. Nothing here calls into the library's
// numerical code paths; each routine is an independent route to a quantity
// the library also computes.

#ifndef CQED_TESTS_ORACLES_HPP_
#define CQED_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cqed::oracle {

/// Poisson pmf table of length `len` by the ratio recurrence outward from the
/// mode: p(n) = p(n-1) mean / n upward, p(n-1) = p(n) n / mean downward.
inline std::vector<double> poisson_pmf_table(double mean, std::size_t len) {
  std::vector<double> p(len, 0.0);
  const auto mode = std::min(static_cast<std::size_t>(std::floor(mean)), len - 1);
  const double m = static_cast<double>(mode);
  p[mode] = std::exp(m * std::log(mean) - mean - std::lgamma(m + 1.0));
  for (std::size_t n = mode + 1; n < len; ++n) p[n] = p[n - 1] * mean / static_cast<double>(n);
  for (std::size_t n = mode; n > 0; --n) p[n - 1] = p[n] * static_cast<double>(n) / mean;
  return p;
}

/// Best balanced fidelity over integer thresholds by exhaustive tail sums.
inline double best_fidelity(const std::vector<double>& up, const std::vector<double>& down) {
  double best = 0.0;
  for (std::size_t t = 0; t <= up.size(); ++t) {
    double up_below = 0.0, down_at_or_above = 0.0;
    for (std::size_t n = 0; n < up.size(); ++n) {
      if (n < t) up_below += up[n];
      else down_at_or_above += down[n];
    }
    best = std::max(best, 1.0 - 0.5 * (up_below + down_at_or_above));
  }
  return best;
}

/// Eigenvalues of [[a, c], [c, b]] from the quadratic formula.
inline std::pair<std::complex<double>, std::complex<double>> symmetric_2x2_eigenvalues(
    std::complex<double> a, std::complex<double> b, std::complex<double> c) {
  const auto mean = 0.5 * (a + b);
  const auto root = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
  return {mean - root, mean + root};
}

/// Location of the maximum of f on [lo, hi]: dense scan, then golden section
/// around the best sample.
inline double argmax(const std::function<double(double)>& f, double lo, double hi,
                     std::size_t samples = 20001) {
  double best_x = lo, best_f = -INFINITY;
  const double step = (hi - lo) / static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = lo + step * static_cast<double>(k);
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    const double x1 = b - r * (b - a), x2 = a + r * (b - a);
    if (f(x1) > f(x2)) b = x2;
    else a = x1;
  }
  return 0.5 * (a + b);
}

/// Full width at half maximum of a single peak of f around `peak`, by
/// bisection on each flank.
inline double fwhm(const std::function<double(double)>& f, double peak, double span) {
  const double half = 0.5 * f(peak);
  auto edge = [&](double outer) {
    double in = peak, out = outer;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (in + out);
      (f(mid) > half ? in : out) = mid;
    }
    return 0.5 * (in + out);
  };
  return edge(peak + span) - edge(peak - span);
}

/// Lorentzian intensity of an empty two-port cavity.
inline double lorentzian(double omega, double omega_c, double kappa, double kin, double kout) {
  const double x = omega - omega_c;
  return kin * kout / (x * x + 0.25 * kappa * kappa);
}

struct Resonator {
  double omega;
  double g;
  double gamma;
};

/// Complex resonance frequencies of the full cavity-plus-emitters problem:
/// eigenvalues of the (N+1)-dimensional non-Hermitian coupling matrix, which
/// are the poles of the transmission amplitude. Sorted by real part.
inline std::vector<std::complex<double>> resonance_poles(double omega_c, double kappa,
                                                         const std::vector<Resonator>& emitters) {
  const auto n = static_cast<Eigen::Index>(emitters.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  h(0, 0) = {omega_c, -0.5 * kappa};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& e = emitters[static_cast<std::size_t>(j)];
    h(j + 1, j + 1) = {e.omega, -0.5 * e.gamma};
    h(0, j + 1) = e.g;
    h(j + 1, 0) = e.g;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, false);
  std::vector<std::complex<double>> out(solver.eigenvalues().data(),
                                        solver.eigenvalues().data() + n + 1);
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.real() < b.real(); });
  return out;
}

}  // namespace cqed::oracle

#endif  // CQED_TESTS_ORACLES_HPP_
