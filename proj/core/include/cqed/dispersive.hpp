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

// Cavity-mediated emitter-emitter coupling after adiabatic elimination of the
// cavity mode, collective (super/subradiant) modes, and magnetic-field sweeps.

#ifndef CQED_DISPERSIVE_HPP_
#define CQED_DISPERSIVE_HPP_

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cqed/model.hpp"

namespace cqed {

using Complex = std::complex<double>;

/// Coherent flip-flop rate g1 g2 delta / (delta^2 + kappa^2/4). Reduces to
/// g^2/delta for delta >> kappa. Throws std::domain_error for delta == 0 or
/// kappa < 0.
double exchange_rate(double g1, double g2, double delta, double kappa);

/// g^2-weighted mean of the transition frequencies (plain mean when every
/// g vanishes).
double weighted_reference(std::span<const Transition> transitions);

/// M_jk = (w_j - i gamma_j/2) delta_jk - g_j g_k (D + i kappa/2) / (D^2 + kappa^2/4),
/// with D = omega_c - reference. -2 Im of an eigenvalue is a mode FWHM.
Eigen::MatrixXcd effective_matrix(const CavityParams& cavity,
                                  std::span<const Transition> transitions,
                                  double reference);

struct EffectiveSystem {
  Eigen::MatrixXcd matrix;
  std::vector<Transition> transitions;  // row/column order of `matrix`
  double reference = 0.0;
};

/// Effective matrix for the prepared (definite) spins of `config`. With no
/// explicit reference the g^2-weighted mean is used. Throws ValidationError
/// when no transition is probe-coupled or a spin is unpolarized.
EffectiveSystem effective_matrix(const ValidatedConfig& config,
                                 std::optional<double> reference = std::nullopt);

/// Same, for an explicit spin assignment.
EffectiveSystem effective_matrix(const SystemConfig& config, const SpinAssignment& spins,
                                 std::optional<double> reference = std::nullopt);

enum class ModeLabel { superradiant, subradiant, mixed };
const char* to_string(ModeLabel label) noexcept;

struct CollectiveModes {
  std::vector<Complex> eigenvalues;  // ascending real part
  Eigen::MatrixXcd eigenvectors;     // column i belongs to eigenvalue i, unit norm
  std::vector<double> cavity_weight; // |sum_j g_j v_j|^2
  std::vector<ModeLabel> labels;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  double frequency(std::size_t i) const { return eigenvalues[i].real(); }
  double linewidth(std::size_t i) const { return -2.0 * eigenvalues[i].imag(); }
};

/// Full complex eigendecomposition of `matrix`. `couplings` are the g_j of the
/// matrix rows and set the cavity-coupling weight used for labeling: the
/// largest weight is superradiant, the smallest subradiant, and any mode whose
/// weight is within 10% of another mode's is mixed. Eigenvector phases are
/// fixed so the first largest-magnitude component is real and positive.
CollectiveModes collective_modes(const Eigen::MatrixXcd& matrix,
                                 std::span<const double> couplings);

/// Re(lambda_S) - Re(lambda_D) between the largest- and smallest-weight modes.
double sd_splitting(const CollectiveModes& modes);

// --- field sweeps -----------------------------------------------------------

/// A sweep measures one or more spin components. One component is the
/// interacting case. Several components are summed incoherently (a composite of
/// separately prepared, non-interacting spectra); an empty entry marks an
/// emitter that is not addressed by the probe in that component.
struct SweepSpec {
  std::vector<double> b_values;
  std::vector<SpinAssignment> components;
  std::vector<double> probe_grid;
};

struct ModeBranch {
  std::size_t component = 0;
  std::vector<Complex> values;  // one per b value
};

struct SweepResult {
  std::vector<double> b_values;
  std::vector<double> probe_grid;
  std::vector<double> intensity;  // row-major [b][omega]
  std::vector<ModeBranch> branches;
  double min_gap = 0.0;        // smallest real-part separation of any branch pair
  double crossing_field = 0.0; // field at which it occurs
  std::size_t gap_pair_first = 0;
  std::size_t gap_pair_second = 0;

  double at(std::size_t b_index, std::size_t omega_index) const {
    return intensity[b_index * probe_grid.size() + omega_index];
  }
};

/// For every field: recomputes transition frequencies, the transmission map
/// row and the collective modes of each component. Branches are followed by
/// eigenvector overlap, and the minimum branch gap is refined between grid
/// points (bisection on sign changes, golden section otherwise).
SweepResult field_sweep(const ValidatedConfig& config, const SweepSpec& spec,
                        unsigned threads = 0);

}  // namespace cqed

#endif  // CQED_DISPERSIVE_HPP_
