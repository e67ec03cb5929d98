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

// Weak-probe cavity transmission of N emitters coupled to one cavity mode.
//
// Two independent routes to the same amplitude are provided: the closed-form
// input-output expression and a direct solve of the linearized mean-field
// steady state. They must agree to rounding.

#ifndef CQED_SPECTRUM_HPP_
#define CQED_SPECTRUM_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cqed/model.hpp"

namespace cqed {

using Complex = std::complex<double>;

struct TransmissionSpectrum {
  std::vector<double> probe_grid;
  std::vector<Complex> amplitude;
  std::vector<double> intensity;  // |amplitude|^2

  std::size_t size() const noexcept { return probe_grid.size(); }
};

/// t(w) = sqrt(kin kout) / [ i(wc - w) + kappa/2 + sum_j g_j^2 / (i(w_j - w) + gamma_j/2) ]
Complex transmission_amplitude(double omega_p, const CavityParams& cavity,
                               std::span<const Transition> transitions);

/// Amplitude for the prepared spin state of `config`. For a classical spin
/// mixture the intensities of the conditioned spectra are averaged; the
/// returned amplitude then has modulus sqrt(<|t|^2>) and the phase of <t>.
Complex transmission_amplitude(double omega_p, const ValidatedConfig& config);

/// <|t|^2> over the spin mixture.
double transmission_intensity(double omega_p, const ValidatedConfig& config);

/// Pointwise transmission on a strictly increasing grid. Throws
/// ValidationError for an empty or non-increasing grid.
TransmissionSpectrum transmission_spectrum(std::span<const double> grid,
                                           const ValidatedConfig& config,
                                           unsigned threads = 0);

/// Solves the (N+1)-dimensional linear steady-state equations for the cavity
/// field and emitter coherences and returns sqrt(kappa_out) * alpha. Does not
/// use the closed form. Throws NumericalError on a singular system.
Complex steady_state_oracle(double omega_p, const CavityParams& cavity,
                            std::span<const Transition> transitions);

/// Oracle counterpart of transmission_amplitude(omega_p, config).
Complex steady_state_oracle(double omega_p, const ValidatedConfig& config);

/// Fractional transmission dip 1 - T_with / T_without at the emitter's
/// transition frequency, where T_without deactivates only that emitter.
double extinction(const ValidatedConfig& config, std::size_t emitter_index);

/// `points` evenly spaced values from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, std::size_t points);

}  // namespace cqed

#endif  // CQED_SPECTRUM_HPP_
