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

#include "cqed/dispersive.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cqed/parallel.hpp"
#include "cqed/spectrum.hpp"

namespace cqed {

double exchange_rate(double g1, double g2, double delta, double kappa) {
  if (delta == 0.0)
    throw std::domain_error("exchange_rate: delta = 0 is outside the dispersive regime");
  if (!(kappa >= 0.0)) throw std::domain_error("exchange_rate: kappa must be >= 0");
  return g1 * g2 * delta / (delta * delta + 0.25 * kappa * kappa);
}

double weighted_reference(std::span<const Transition> transitions) {
  if (transitions.empty()) throw ValidationError("transitions", "no probe-coupled transition");
  double num = 0.0, den = 0.0;
  for (const auto& t : transitions) {
    num += t.g * t.g * t.omega;
    den += t.g * t.g;
  }
  if (den > 0.0) return num / den;
  double sum = 0.0;
  for (const auto& t : transitions) sum += t.omega;
  return sum / static_cast<double>(transitions.size());
}

Eigen::MatrixXcd effective_matrix(const CavityParams& cavity,
                                  std::span<const Transition> transitions,
                                  double reference) {
  if (transitions.empty()) throw ValidationError("transitions", "no probe-coupled transition");
  const double d = cavity.omega_c - reference;
  const Complex mediated = Complex{d, 0.5 * cavity.kappa} / (d * d + 0.25 * cavity.kappa * cavity.kappa);

  const auto n = static_cast<Eigen::Index>(transitions.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& tj = transitions[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& tk = transitions[static_cast<std::size_t>(k)];
      m(j, k) = -tj.g * tk.g * mediated;
    }
    m(j, j) += Complex{tj.omega, -0.5 * tj.gamma};
  }
  return m;
}

EffectiveSystem effective_matrix(const SystemConfig& config, const SpinAssignment& spins,
                                 std::optional<double> reference) {
  EffectiveSystem sys;
  sys.transitions = probe_coupled(config, spins);
  if (sys.transitions.empty())
    throw ValidationError("emitters", "effective matrix needs at least one probe-coupled transition");
  sys.reference = reference ? *reference : weighted_reference(sys.transitions);
  sys.matrix = effective_matrix(config.cavity, sys.transitions, sys.reference);
  return sys;
}

EffectiveSystem effective_matrix(const ValidatedConfig& config, std::optional<double> reference) {
  return effective_matrix(config.get(), definite_spins(config.get()), reference);
}

const char* to_string(ModeLabel label) noexcept {
  switch (label) {
    case ModeLabel::superradiant: return "superradiant";
    case ModeLabel::subradiant: return "subradiant";
    case ModeLabel::mixed: return "mixed";
  }
  return "?";
}

CollectiveModes collective_modes(const Eigen::MatrixXcd& matrix,
                                 std::span<const double> couplings) {
  const auto n = matrix.rows();
  if (n == 0 || matrix.cols() != n)
    throw ValidationError("matrix", "collective_modes needs a non-empty square matrix");
  if (static_cast<Eigen::Index>(couplings.size()) != n)
    throw ValidationError("couplings", "one coupling per matrix row is required");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(matrix, true);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge for matrix\n" << matrix;
    throw NumericalError(os.str());
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return values(a).real() < values(b).real();
  });

  CollectiveModes modes;
  modes.eigenvectors.resize(n, n);
  Eigen::VectorXd g(n);
  for (Eigen::Index j = 0; j < n; ++j) g(j) = couplings[static_cast<std::size_t>(j)];

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    Eigen::VectorXcd v = solver.eigenvectors().col(src);
    v.normalize();
    const double vmax = v.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(v(j)) >= vmax * (1.0 - 1e-12)) {
        v *= std::conj(v(j)) / std::abs(v(j));
        v(j) = std::abs(v(j));
        break;
      }
    }
    modes.eigenvalues.push_back(values(src));
    modes.eigenvectors.col(i) = v;
    modes.cavity_weight.push_back(std::norm((g.cast<Complex>().array() * v.array()).sum()));
  }

  const auto& w = modes.cavity_weight;
  const auto top = std::max_element(w.begin(), w.end()) - w.begin();
  const auto bottom = std::min_element(w.begin(), w.end()) - w.begin();
  modes.labels.assign(w.size(), ModeLabel::mixed);
  modes.labels[static_cast<std::size_t>(bottom)] = ModeLabel::subradiant;
  modes.labels[static_cast<std::size_t>(top)] = ModeLabel::superradiant;
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = 0; b < w.size(); ++b)
      if (a != b && std::abs(w[a] - w[b]) <= 0.1 * std::max(w[a], w[b]))
        modes.labels[a] = ModeLabel::mixed;
  if (w.size() == 1) modes.labels[0] = ModeLabel::superradiant;
  return modes;
}

double sd_splitting(const CollectiveModes& modes) {
  const auto& w = modes.cavity_weight;
  if (w.size() < 2) throw ValidationError("modes", "S-D splitting needs at least two modes");
  const auto s = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  const auto d = static_cast<std::size_t>(std::min_element(w.begin(), w.end()) - w.begin());
  return modes.frequency(s) - modes.frequency(d);
}

// --- sweeps -----------------------------------------------------------------

namespace {

struct ComponentSolution {
  std::vector<Transition> transitions;
  CollectiveModes modes;
};

ComponentSolution solve_component(const SystemConfig& base, const SpinAssignment& spins, double b) {
  SystemConfig cfg = base;
  cfg.b_field = b;
  ComponentSolution out;
  out.transitions = probe_coupled(cfg, spins);
  const auto m = effective_matrix(cfg.cavity, out.transitions, weighted_reference(out.transitions));
  std::vector<double> g;
  for (const auto& t : out.transitions) g.push_back(t.g);
  out.modes = collective_modes(m, g);
  return out;
}

// Greedy assignment of the columns of `current` to the branch vectors in
// `previous` by largest overlap. Returns branch -> mode index.
std::vector<Eigen::Index> match_branches(const Eigen::MatrixXcd& previous,
                                         const Eigen::MatrixXcd& current) {
  const Eigen::MatrixXd overlap = (previous.adjoint() * current).cwiseAbs();
  const auto n = overlap.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (Eigen::Index round = 0; round < n; ++round) {
    double best = -1.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (perm[static_cast<std::size_t>(i)] >= 0) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (taken[static_cast<std::size_t>(j)]) continue;
        if (overlap(i, j) > best) {
          best = overlap(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    perm[static_cast<std::size_t>(bi)] = bj;
    taken[static_cast<std::size_t>(bj)] = true;
  }
  return perm;
}

Eigen::MatrixXcd ordered_vectors(const CollectiveModes& modes, const std::vector<Eigen::Index>& perm) {
  Eigen::MatrixXcd v(modes.eigenvectors.rows(), static_cast<Eigen::Index>(perm.size()));
  for (std::size_t i = 0; i < perm.size(); ++i)
    v.col(static_cast<Eigen::Index>(i)) = modes.eigenvectors.col(perm[i]);
  return v;
}

void check_sweep(const SystemConfig& config, const SweepSpec& spec) {
  std::vector<Issue> issues;
  if (spec.b_values.empty()) issues.push_back({"sweep.b_values", "must be non-empty"});
  for (std::size_t k = 0; k < spec.b_values.size(); ++k) {
    if (!(spec.b_values[k] >= 0.0) || !std::isfinite(spec.b_values[k]))
      issues.push_back({"sweep.b_values[" + std::to_string(k) + "]", "must be finite and >= 0"});
    if (k > 0 && !(spec.b_values[k] > spec.b_values[k - 1]))
      issues.push_back({"sweep.b_values[" + std::to_string(k) + "]", "must be strictly increasing"});
  }
  if (spec.components.empty()) issues.push_back({"sweep.components", "need at least one spin component"});
  const auto n = config.emitters.size();
  std::vector<bool> addressed(n, false);
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    const auto& comp = spec.components[c];
    const std::string at = "sweep.components[" + std::to_string(c) + "]";
    if (comp.size() != n) {
      issues.push_back({at, "needs one entry per emitter (" + std::to_string(n) + ")"});
      continue;
    }
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (comp[j] && config.emitters[j].active) {
        addressed[j] = true;
        any = true;
      }
    }
    if (!any) issues.push_back({at, "addresses no active emitter"});
  }
  for (std::size_t j = 0; j < n; ++j)
    if (config.emitters[j].active && !addressed[j] && !spec.components.empty())
      issues.push_back({"sweep.components", "active emitter " + std::to_string(j) +
                                                " is not resolved by any spin component"});
  for (std::size_t k = 1; k < spec.probe_grid.size(); ++k)
    if (!(spec.probe_grid[k] > spec.probe_grid[k - 1])) {
      issues.push_back({"sweep.probe_grid", "must be strictly increasing"});
      break;
    }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

}  // namespace

SweepResult field_sweep(const ValidatedConfig& config, const SweepSpec& spec, unsigned threads) {
  const SystemConfig& base = config.get();
  check_sweep(base, spec);

  const std::size_t nb = spec.b_values.size();
  const std::size_t nw = spec.probe_grid.size();
  const std::size_t nc = spec.components.size();

  SweepResult out;
  out.b_values = spec.b_values;
  out.probe_grid = spec.probe_grid;
  out.intensity.assign(nb * nw, 0.0);

  std::vector<std::vector<ComponentSolution>> solved(nb, std::vector<ComponentSolution>(nc));
  parallel_for(nb, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      for (std::size_t c = 0; c < nc; ++c) {
        solved[k][c] = solve_component(base, spec.components[c], spec.b_values[k]);
        const auto& tr = solved[k][c].transitions;
        for (std::size_t w = 0; w < nw; ++w)
          out.intensity[k * nw + w] +=
              std::norm(transmission_amplitude(spec.probe_grid[w], base.cavity, tr));
      }
    }
  });

  // Branch tracking: perm[k][c][i] is the mode index of branch i at field k.
  std::vector<std::vector<std::vector<Eigen::Index>>> perm(nb, std::vector<std::vector<Eigen::Index>>(nc));
  for (std::size_t c = 0; c < nc; ++c) {
    auto& first = perm[0][c];
    first.resize(solved[0][c].modes.size());
    std::iota(first.begin(), first.end(), 0);
    for (std::size_t k = 1; k < nb; ++k) {
      const auto prev = ordered_vectors(solved[k - 1][c].modes, perm[k - 1][c]);
      perm[k][c] = match_branches(prev, solved[k][c].modes.eigenvectors);
    }
  }

  struct BranchRef {
    std::size_t component;
    std::size_t index;
  };
  std::vector<BranchRef> refs;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < perm[0][c].size(); ++i) {
      ModeBranch branch;
      branch.component = c;
      for (std::size_t k = 0; k < nb; ++k)
        branch.values.push_back(solved[k][c].modes.eigenvalues[static_cast<std::size_t>(perm[k][c][i])]);
      out.branches.push_back(std::move(branch));
      refs.push_back({c, i});
    }
  }

  // Branch value at an off-grid field, identified against grid point k.
  auto branch_at = [&](const BranchRef& ref, std::size_t k, double b) {
    const auto sol = solve_component(base, spec.components[ref.component], b);
    const auto prev = ordered_vectors(solved[k][ref.component].modes, perm[k][ref.component]);
    const auto p = match_branches(prev, sol.modes.eigenvectors);
    return sol.modes.eigenvalues[static_cast<std::size_t>(p[ref.index])].real();
  };

  out.min_gap = std::numeric_limits<double>::infinity();
  auto consider = [&](double gap, double b, std::size_t a, std::size_t c) {
    if (gap < out.min_gap) {
      out.min_gap = gap;
      out.crossing_field = b;
      out.gap_pair_first = a;
      out.gap_pair_second = c;
    }
  };

  for (std::size_t a = 0; a < refs.size(); ++a) {
    for (std::size_t c = a + 1; c < refs.size(); ++c) {
      std::vector<double> diff(nb);
      for (std::size_t k = 0; k < nb; ++k)
        diff[k] = out.branches[a].values[k].real() - out.branches[c].values[k].real();

      auto diff_at = [&](std::size_t k, double b) {
        return branch_at(refs[a], k, b) - branch_at(refs[c], k, b);
      };

      std::size_t argmin = 0;
      for (std::size_t k = 0; k < nb; ++k) {
        consider(std::abs(diff[k]), spec.b_values[k], a, c);
        if (std::abs(diff[k]) < std::abs(diff[argmin])) argmin = k;
      }

      bool crossed = false;
      for (std::size_t k = 0; k + 1 < nb; ++k) {
        if (diff[k] == 0.0 || diff[k + 1] == 0.0 || (diff[k] < 0.0) == (diff[k + 1] < 0.0)) continue;
        crossed = true;
        double lo = spec.b_values[k], hi = spec.b_values[k + 1];
        double flo = diff[k];
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = diff_at(k, mid);
          consider(std::abs(fm), mid, a, c);
          if (fm == 0.0) break;
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
      }

      if (!crossed && nb >= 2) {
        const std::size_t k0 = argmin == 0 ? 0 : argmin - 1;
        const std::size_t k1 = std::min(argmin + 1, nb - 1);
        double lo = spec.b_values[k0], hi = spec.b_values[k1];
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
        double f1 = std::abs(diff_at(argmin, x1)), f2 = std::abs(diff_at(argmin, x2));
        for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
          if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = std::abs(diff_at(argmin, x1));
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = std::abs(diff_at(argmin, x2));
          }
        }
        consider(f1, x1, a, c);
        consider(f2, x2, a, c);
      }
    }
  }
  if (refs.size() < 2) out.min_gap = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace cqed
