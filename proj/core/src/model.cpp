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

#include "cqed/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace cqed {

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
  std::ostringstream os;
  os << "invalid configuration (" << issues.size() << " issue"
     << (issues.size() == 1 ? "" : "s") << ")";
  for (const auto& issue : issues) os << "\n  " << issue.path << ": " << issue.message;
  return os.str();
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ValidationError::ValidationError(std::string path, std::string message)
    : ValidationError(std::vector<Issue>{{std::move(path), std::move(message)}}) {}

double cooperativity(double g, double kappa, double gamma) {
  if (!(kappa > 0.0)) throw std::domain_error("cooperativity: kappa must be > 0");
  if (!(gamma > 0.0)) throw std::domain_error("cooperativity: gamma must be > 0");
  return 4.0 * g * g / (kappa * gamma);
}

double purcell_linewidth(double delta, double g, double kappa, double gamma) {
  if (!(kappa > 0.0)) throw std::domain_error("purcell_linewidth: kappa must be > 0");
  const double x = 2.0 * delta / kappa;
  return gamma + (4.0 * g * g / kappa) / (1.0 + x * x);
}

TransitionFrequencies transition_frequencies(const ZeemanModel& zeeman, double b) {
  return {zeeman.omega_zero + zeeman.slope_up * b,
          zeeman.omega_zero + zeeman.slope_down * b};
}

double transition_frequency(const ZeemanModel& zeeman, Spin spin, double b) {
  const auto f = transition_frequencies(zeeman, b);
  return spin == Spin::up ? f.omega_up : f.omega_down;
}

std::vector<Issue> find_issues(const SystemConfig& config) {
  std::vector<Issue> issues;
  auto fail = [&](std::string path, std::string message) {
    issues.push_back({std::move(path), std::move(message)});
  };

  const auto& c = config.cavity;
  if (!finite(c.omega_c)) fail("cavity.omega_c", "must be finite");
  if (!(c.kappa > 0.0) || !finite(c.kappa)) fail("cavity.kappa", "must be finite and > 0");
  if (!(c.kappa_in >= 0.0) || !finite(c.kappa_in)) fail("cavity.kappa_in", "must be finite and >= 0");
  if (!(c.kappa_out >= 0.0) || !finite(c.kappa_out)) fail("cavity.kappa_out", "must be finite and >= 0");
  // Relative slack so that kappa/2 + kappa/2 never trips on rounding.
  if (c.kappa_in + c.kappa_out > c.kappa * (1.0 + 1e-12))
    fail("cavity.kappa_in+kappa_out",
         "port decomposition kappa_in + kappa_out exceeds total kappa");

  if (!(config.b_field >= 0.0) || !finite(config.b_field))
    fail("b_field", "must be finite and >= 0");

  for (std::size_t j = 0; j < config.emitters.size(); ++j) {
    const auto& e = config.emitters[j];
    const std::string at = "emitters[" + std::to_string(j) + "]";
    if (!(e.g >= 0.0) || !finite(e.g)) fail(at + ".g", "must be finite and >= 0");
    if (!(e.gamma > 0.0) || !finite(e.gamma)) fail(at + ".gamma", "must be finite and > 0");
    const auto& z = e.zeeman;
    if (!finite(z.omega_zero)) fail(at + ".zeeman.omega_zero", "must be finite");
    if (!finite(z.slope_up)) fail(at + ".zeeman.slope_up", "must be finite");
    if (!finite(z.slope_down)) fail(at + ".zeeman.slope_down", "must be finite");
    if (!(z.branching_fraction >= 0.0 && z.branching_fraction <= 1.0))
      fail(at + ".zeeman.branching_fraction", "must lie in [0, 1]");
  }
  return issues;
}

ValidatedConfig validate(SystemConfig config) {
  auto issues = find_issues(config);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return ValidatedConfig(std::move(config));
}

std::vector<WeightedAssignment> spin_mixture(const SystemConfig& config) {
  std::vector<WeightedAssignment> terms{{1.0, SpinAssignment(config.emitters.size())}};
  for (std::size_t j = 0; j < config.emitters.size(); ++j) {
    const auto& e = config.emitters[j];
    if (!e.active) continue;
    switch (e.prepared_spin) {
      case SpinPrep::up:
        for (auto& t : terms) t.spins[j] = Spin::up;
        break;
      case SpinPrep::down:
        for (auto& t : terms) t.spins[j] = Spin::down;
        break;
      case SpinPrep::unpolarized: {
        std::vector<WeightedAssignment> next;
        next.reserve(2 * terms.size());
        for (const auto& t : terms) {
          for (Spin s : {Spin::up, Spin::down}) {
            auto copy = t;
            copy.weight *= 0.5;
            copy.spins[j] = s;
            next.push_back(std::move(copy));
          }
        }
        terms = std::move(next);
        break;
      }
    }
  }
  return terms;
}

SpinAssignment definite_spins(const SystemConfig& config) {
  for (std::size_t j = 0; j < config.emitters.size(); ++j) {
    const auto& e = config.emitters[j];
    if (e.active && e.prepared_spin == SpinPrep::unpolarized)
      throw ValidationError("emitters[" + std::to_string(j) + "].prepared_spin",
                            "a definite spin (up or down) is required here");
  }
  return spin_mixture(config).front().spins;
}

std::vector<Transition> probe_coupled(const SystemConfig& config,
                                      const SpinAssignment& spins) {
  if (spins.size() != config.emitters.size())
    throw ValidationError("spins", "assignment length " + std::to_string(spins.size()) +
                                       " does not match " +
                                       std::to_string(config.emitters.size()) + " emitters");
  std::vector<Transition> out;
  for (std::size_t j = 0; j < spins.size(); ++j) {
    const auto& e = config.emitters[j];
    if (!e.active || !spins[j]) continue;
    out.push_back({j, *spins[j], transition_frequency(e.zeeman, *spins[j], config.b_field),
                   e.g, e.gamma});
  }
  return out;
}

std::vector<double> detunings(const SystemConfig& config, const SpinAssignment& spins) {
  std::vector<double> out;
  for (const auto& t : probe_coupled(config, spins)) out.push_back(config.cavity.omega_c - t.omega);
  return out;
}

const char* to_string(Spin spin) noexcept { return spin == Spin::up ? "up" : "down"; }

const char* to_string(SpinPrep prep) noexcept {
  switch (prep) {
    case SpinPrep::up: return "up";
    case SpinPrep::down: return "down";
    case SpinPrep::unpolarized: return "unpolarized";
  }
  return "?";
}

}  // namespace cqed
