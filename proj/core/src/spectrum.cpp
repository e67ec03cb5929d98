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

#include "cqed/spectrum.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "cqed/parallel.hpp"

namespace cqed {

namespace {

constexpr Complex kI{0.0, 1.0};

// Mixture average over the classical spin configurations.
template <typename AmplitudeFn>
Complex mixed_amplitude(const SystemConfig& config, AmplitudeFn&& amplitude) {
  const auto terms = spin_mixture(config);
  if (terms.size() == 1) return amplitude(probe_coupled(config, terms.front().spins));
  double intensity = 0.0;
  Complex mean{0.0, 0.0};
  for (const auto& term : terms) {
    const Complex t = amplitude(probe_coupled(config, term.spins));
    intensity += term.weight * std::norm(t);
    mean += term.weight * t;
  }
  const double phase = std::abs(mean) > 0.0 ? std::arg(mean) : 0.0;
  return std::polar(std::sqrt(intensity), phase);
}

}  // namespace

Complex transmission_amplitude(double omega_p, const CavityParams& cavity,
                               std::span<const Transition> transitions) {
  Complex denominator{0.5 * cavity.kappa, cavity.omega_c - omega_p};
  for (const auto& tr : transitions)
    denominator += tr.g * tr.g / Complex{0.5 * tr.gamma, tr.omega - omega_p};
  return std::sqrt(cavity.kappa_in * cavity.kappa_out) / denominator;
}

Complex transmission_amplitude(double omega_p, const ValidatedConfig& config) {
  return mixed_amplitude(config.get(), [&](const std::vector<Transition>& tr) {
    return transmission_amplitude(omega_p, config->cavity, tr);
  });
}

double transmission_intensity(double omega_p, const ValidatedConfig& config) {
  return std::norm(transmission_amplitude(omega_p, config));
}

TransmissionSpectrum transmission_spectrum(std::span<const double> grid,
                                           const ValidatedConfig& config,
                                           unsigned threads) {
  if (grid.empty()) throw ValidationError("grid", "probe grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw ValidationError("grid[" + std::to_string(k) + "]", "probe grid must be strictly increasing");

  TransmissionSpectrum out;
  out.probe_grid.assign(grid.begin(), grid.end());
  out.amplitude.resize(grid.size());
  out.intensity.resize(grid.size());

  const auto terms = spin_mixture(config.get());
  std::vector<std::vector<Transition>> coupled;
  for (const auto& term : terms) coupled.push_back(probe_coupled(config.get(), term.spins));

  parallel_for(grid.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Complex t;
      if (terms.size() == 1) {
        t = transmission_amplitude(grid[k], config->cavity, coupled.front());
      } else {
        double intensity = 0.0;
        Complex mean{0.0, 0.0};
        for (std::size_t m = 0; m < terms.size(); ++m) {
          const Complex tm = transmission_amplitude(grid[k], config->cavity, coupled[m]);
          intensity += terms[m].weight * std::norm(tm);
          mean += terms[m].weight * tm;
        }
        t = std::polar(std::sqrt(intensity), std::abs(mean) > 0.0 ? std::arg(mean) : 0.0);
      }
      out.amplitude[k] = t;
      out.intensity[k] = std::norm(t);
    }
  });
  return out;
}

Complex steady_state_oracle(double omega_p, const CavityParams& cavity,
                            std::span<const Transition> transitions) {
  // Unknowns x = (alpha, s_1 .. s_N) of
  //   0 = -(i(wc - w) + kappa/2) alpha - i sum_j g_j s_j + sqrt(kappa_in)
  //   0 = -(i(w_j - w) + gamma_j/2) s_j - i g_j alpha
  const auto n = static_cast<Eigen::Index>(transitions.size()) + 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);

  a(0, 0) = Complex{0.5 * cavity.kappa, cavity.omega_c - omega_p};
  rhs(0) = std::sqrt(cavity.kappa_in);
  for (Eigen::Index j = 1; j < n; ++j) {
    const auto& tr = transitions[static_cast<std::size_t>(j - 1)];
    a(0, j) = kI * tr.g;
    a(j, 0) = kI * tr.g;
    a(j, j) = Complex{0.5 * tr.gamma, tr.omega - omega_p};
  }

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "steady-state system is singular at omega_p = " << omega_p;
    for (Eigen::Index j = 1; j < n; ++j)
      if (a(j, j) == Complex{0.0, 0.0})
        os << "; degenerate emitter " << transitions[static_cast<std::size_t>(j - 1)].emitter
           << " (zero linewidth on resonance)";
    throw NumericalError(os.str());
  }
  const Eigen::VectorXcd x = lu.solve(rhs);
  return std::sqrt(cavity.kappa_out) * x(0);
}

Complex steady_state_oracle(double omega_p, const ValidatedConfig& config) {
  return mixed_amplitude(config.get(), [&](const std::vector<Transition>& tr) {
    return steady_state_oracle(omega_p, config->cavity, tr);
  });
}

double extinction(const ValidatedConfig& config, std::size_t emitter_index) {
  const auto& emitters = config->emitters;
  const std::string at = "emitters[" + std::to_string(emitter_index) + "]";
  if (emitter_index >= emitters.size())
    throw ValidationError(at, "index out of range (" + std::to_string(emitters.size()) + " emitters)");
  const auto& e = emitters[emitter_index];
  if (!e.active) throw ValidationError(at + ".active", "extinction requires an active emitter");
  if (e.prepared_spin == SpinPrep::unpolarized)
    throw ValidationError(at + ".prepared_spin", "extinction requires a definite spin");

  const Spin spin = e.prepared_spin == SpinPrep::up ? Spin::up : Spin::down;
  const double omega = transition_frequency(e.zeeman, spin, config->b_field);

  SystemConfig without = config.get();
  without.emitters[emitter_index].active = false;
  const double t_with = transmission_intensity(omega, config);
  const double t_without = transmission_intensity(omega, validate(std::move(without)));
  if (!(t_without > 0.0))
    throw NumericalError("extinction: reference transmission is zero at the emitter frequency");
  return 1.0 - t_with / t_without;
}

std::vector<double> linear_grid(double start, double stop, std::size_t points) {
  if (points == 0) throw ValidationError("grid.points", "must be >= 1");
  if (points == 1) return {start};
  if (!(stop > start)) throw ValidationError("grid", "stop must exceed start");
  std::vector<double> grid(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) grid[k] = start + step * static_cast<double>(k);
  grid.back() = stop;
  return grid;
}

}  // namespace cqed
