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

// Domain types and closed-form cavity-QED quantities.
//
// Every frequency and rate is a linear frequency in GHz (the quantity usually
// quoted as "2pi x f"). All formulas below are homogeneous in frequency, so no
// factors of 2pi appear anywhere. Magnetic fields are in kG.

#ifndef CQED_MODEL_HPP_
#define CQED_MODEL_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cqed/error.hpp"

namespace cqed {

enum class Spin { up, down };
enum class SpinPrep { up, down, unpolarized };

struct CavityParams {
  double omega_c = 0.0;    // resonance
  double kappa = 1.0;      // total energy decay rate (FWHM)
  double kappa_in = 0.5;   // input port
  double kappa_out = 0.5;  // output port

  /// Lossless two-port cavity with kappa split evenly between the ports.
  static CavityParams symmetric(double omega_c, double kappa) {
    return {omega_c, kappa, 0.5 * kappa, 0.5 * kappa};
  }
};

/// Linear Zeeman model of the two spin-conserving optical transitions.
struct ZeemanModel {
  double omega_zero = 0.0;  // zero-field transition frequency
  double slope_up = 0.0;    // GHz/kG, up -> up' transition
  double slope_down = 0.0;  // GHz/kG, down -> down' transition
  double branching_fraction = 1.0;
};

struct EmitterParams {
  double g = 0.0;      // single-photon Rabi frequency
  double gamma = 1.0;  // bare transition FWHM (spontaneous emission + spectral diffusion)
  ZeemanModel zeeman;
  bool active = true;  // false: ionized, optically inactive
  SpinPrep prepared_spin = SpinPrep::up;
};

struct SystemConfig {
  CavityParams cavity;
  std::vector<EmitterParams> emitters;
  double b_field = 0.0;
  std::string probe_power_note;
};

/// C = 4 g^2 / (kappa gamma). Throws std::domain_error unless kappa, gamma > 0.
double cooperativity(double g, double kappa, double gamma);

/// Cavity-dressed emitter FWHM at emitter-cavity detuning `delta`:
/// gamma + (4 g^2 / kappa) / (1 + 4 delta^2 / kappa^2).
double purcell_linewidth(double delta, double g, double kappa, double gamma);

struct TransitionFrequencies {
  double omega_up = 0.0;
  double omega_down = 0.0;
};

TransitionFrequencies transition_frequencies(const ZeemanModel& zeeman, double b);
double transition_frequency(const ZeemanModel& zeeman, Spin spin, double b);

/// Checks every invariant of `config` and returns all violations (empty when
/// valid).
std::vector<Issue> find_issues(const SystemConfig& config);

/// A SystemConfig that has passed `validate`. The only way to build one is
/// through `validate`, so downstream operations never see an unchecked
/// configuration.
class ValidatedConfig {
 public:
  const SystemConfig& get() const noexcept { return config_; }
  const SystemConfig* operator->() const noexcept { return &config_; }

 private:
  friend ValidatedConfig validate(SystemConfig config);
  explicit ValidatedConfig(SystemConfig config) : config_(std::move(config)) {}

  SystemConfig config_;
};

/// Throws ValidationError listing every violated invariant.
ValidatedConfig validate(SystemConfig config);

// --- spin masking ---------------------------------------------------------

/// Per-emitter spin state for one classical spin configuration. An empty
/// entry means the emitter has no probe-coupled transition (inactive, or not
/// addressed in a sweep component).
using SpinAssignment = std::vector<std::optional<Spin>>;

/// One term of the classical spin mixture described by the prepared spins.
struct WeightedAssignment {
  double weight = 1.0;
  SpinAssignment spins;
};

/// Expands every active `unpolarized` emitter into both spin states with
/// equal weight. Inactive emitters map to empty entries. A config with only
/// definite spins yields a single assignment of weight 1.
std::vector<WeightedAssignment> spin_mixture(const SystemConfig& config);

/// The assignment for a config whose active emitters all have definite spins.
/// Throws ValidationError naming the first unpolarized emitter otherwise.
SpinAssignment definite_spins(const SystemConfig& config);

/// An optical transition that couples to the cavity for a given assignment.
struct Transition {
  std::size_t emitter = 0;
  Spin spin = Spin::up;
  double omega = 0.0;
  double g = 0.0;
  double gamma = 1.0;
};

/// Transitions addressed by `spins` at the configured field, in emitter order.
std::vector<Transition> probe_coupled(const SystemConfig& config,
                                      const SpinAssignment& spins);

/// Emitter-cavity detuning omega_c - omega for every probe-coupled transition
/// of `spins`.
std::vector<double> detunings(const SystemConfig& config,
                              const SpinAssignment& spins);

const char* to_string(Spin spin) noexcept;
const char* to_string(SpinPrep prep) noexcept;

}  // namespace cqed

#endif  // CQED_MODEL_HPP_
