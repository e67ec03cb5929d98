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

#include "cqed/fit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "cqed/parallel.hpp"
#include "cqed/spectrum.hpp"

namespace cqed {

namespace {

enum class Kind { omega_c, kappa, amplitude, background, phase, g, gamma, omega };

struct Slot {
  Kind kind = Kind::omega_c;
  std::size_t emitter = 0;
  bool log_scale = false;
};

std::optional<Slot> parse_name(const std::string& name) {
  if (name == "omega_c") return Slot{Kind::omega_c, 0, false};
  if (name == "kappa") return Slot{Kind::kappa, 0, true};
  if (name == "A") return Slot{Kind::amplitude, 0, true};
  if (name == "b") return Slot{Kind::background, 0, false};
  if (name == "phi") return Slot{Kind::phase, 0, false};

  const auto open = name.find('[');
  if (open == std::string::npos || name.back() != ']') return std::nullopt;
  const std::string head = name.substr(0, open);
  const char* first = name.data() + open + 1;
  const char* last = name.data() + name.size() - 1;
  std::size_t index = 0;
  auto [ptr, ec] = std::from_chars(first, last, index);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  if (head == "g") return Slot{Kind::g, index, true};
  if (head == "gamma") return Slot{Kind::gamma, index, true};
  if (head == "omega") return Slot{Kind::omega, index, false};
  return std::nullopt;
}

std::vector<Slot> slots_of(const FitProblem& problem) {
  std::vector<Slot> slots;
  for (const auto& p : problem.free) {
    auto s = parse_name(p.name);
    if (!s) throw ValidationError("free." + p.name, "unknown parameter name");
    slots.push_back(*s);
  }
  return slots;
}

double to_search(const Slot& s, double x) { return s.log_scale ? std::log(x) : x; }
double from_search(const Slot& s, double u) { return s.log_scale ? std::exp(u) : u; }

double prepared_slope(const EmitterParams& e) {
  return e.prepared_spin == SpinPrep::down ? e.zeeman.slope_down : e.zeeman.slope_up;
}

void assign(ModelParams& m, const SystemConfig& base, const Slot& s, double value) {
  auto& sys = m.system;
  switch (s.kind) {
    case Kind::omega_c: sys.cavity.omega_c = value; break;
    case Kind::kappa: {
      const double scale = value / base.cavity.kappa;
      sys.cavity.kappa = value;
      sys.cavity.kappa_in = base.cavity.kappa_in * scale;
      sys.cavity.kappa_out = base.cavity.kappa_out * scale;
      break;
    }
    case Kind::amplitude: m.amplitude = value; break;
    case Kind::background: m.background = value; break;
    case Kind::phase: m.background_phase = value; break;
    case Kind::g: sys.emitters[s.emitter].g = value; break;
    case Kind::gamma: sys.emitters[s.emitter].gamma = value; break;
    case Kind::omega: {
      auto& e = sys.emitters[s.emitter];
      e.zeeman.omega_zero = value - prepared_slope(e) * sys.b_field;
      break;
    }
  }
}

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

struct RunResult {
  std::vector<double> best;  // search coordinates
  double rss = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

// Bounded Nelder-Mead on the box [lo, hi]; trial points are clamped into it.
template <typename Objective>
RunResult nelder_mead(Objective&& f, std::vector<double> start, const std::vector<double>& lo,
                      const std::vector<double>& hi, std::size_t max_evaluations) {
  const std::size_t n = start.size();
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  };
  std::size_t evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  clamp(start);
  Simplex s;
  s.points.push_back(start);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = start;
    const double step = 0.1 * (hi[i] - lo[i]);
    x[i] = x[i] + step <= hi[i] ? x[i] + step : x[i] - step;
    s.points.push_back(x);
  }
  for (const auto& p : s.points) s.values.push_back(eval(p));

  RunResult result;
  std::vector<std::size_t> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
    const auto& best = s.points[order.front()];

    bool small = true;
    for (std::size_t i = 0; i < n && small; ++i) {
      double spread = 0.0;
      for (const auto& p : s.points) spread = std::max(spread, std::abs(p[i] - best[i]));
      small = spread < 1e-6 * (hi[i] - lo[i]);
    }
    if (small) {
      result.converged = true;
      break;
    }
    if (evaluations >= max_evaluations) break;
    ++result.iterations;

    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += s.points[order[k]][i] / static_cast<double>(n);

    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (s.points[worst][i] - centroid[i]);
      clamp(x);
      return x;
    };

    auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < s.values[order.front()]) {
      auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        s.points[worst] = std::move(xe);
        s.values[worst] = fe;
      } else {
        s.points[worst] = std::move(xr);
        s.values[worst] = fr;
      }
      continue;
    }
    if (fr < s.values[second]) {
      s.points[worst] = std::move(xr);
      s.values[worst] = fr;
      continue;
    }
    const bool outside = fr < s.values[worst];
    auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : s.values[worst])) {
      s.points[worst] = std::move(xc);
      s.values[worst] = fc;
      continue;
    }
    const auto anchor = s.points[order.front()];
    for (std::size_t k = 1; k <= n; ++k) {
      auto& p = s.points[order[k]];
      for (std::size_t i = 0; i < n; ++i) p[i] = anchor[i] + 0.5 * (p[i] - anchor[i]);
      s.values[order[k]] = eval(p);
    }
  }

  const auto it = std::min_element(s.values.begin(), s.values.end());
  result.best = s.points[static_cast<std::size_t>(it - s.values.begin())];
  result.rss = *it;
  return result;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double model_T(double omega_p, const ModelParams& params) {
  const double grid[] = {omega_p};
  return model_T(grid, params).front();
}

std::vector<double> model_T(std::span<const double> grid, const ModelParams& params) {
  const auto& sys = params.system;
  const auto terms = spin_mixture(sys);
  std::vector<std::vector<Transition>> coupled;
  for (const auto& term : terms) coupled.push_back(probe_coupled(sys, term.spins));

  const Complex background = std::polar(params.background, params.background_phase);
  const double gain = params.amplitude * params.amplitude;
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double t2 = 0.0;
    for (std::size_t m = 0; m < terms.size(); ++m)
      t2 += terms[m].weight *
            std::norm(transmission_amplitude(grid[k], sys.cavity, coupled[m]) + background);
    out[k] = gain * t2;
  }
  return out;
}

std::vector<Issue> find_issues(const FitProblem& problem) {
  std::vector<Issue> issues = find_issues(problem.fixed.system);
  for (auto& i : issues) i.path = "fixed." + i.path;

  if (problem.omega.size() != problem.T.size())
    issues.push_back({"data", "omega and T have different lengths"});
  for (std::size_t k = 0; k < problem.omega.size(); ++k)
    if (!std::isfinite(problem.omega[k]) || (k < problem.T.size() && !std::isfinite(problem.T[k]))) {
      issues.push_back({"data[" + std::to_string(k) + "]", "non-finite value"});
      break;
    }
  if (problem.free.empty()) issues.push_back({"free", "no free parameters"});
  if (problem.omega.size() < 3 * problem.free.size())
    issues.push_back({"data", "need at least 3 data points per free parameter (" +
                                  std::to_string(3 * problem.free.size()) + "), got " +
                                  std::to_string(problem.omega.size())});

  std::set<std::string> seen;
  for (const auto& p : problem.free) {
    const std::string at = "free." + p.name;
    if (!seen.insert(p.name).second) issues.push_back({at, "listed twice"});
    const auto slot = parse_name(p.name);
    if (!slot) {
      issues.push_back({at, "unknown parameter name"});
      continue;
    }
    if ((slot->kind == Kind::g || slot->kind == Kind::gamma || slot->kind == Kind::omega) &&
        slot->emitter >= problem.fixed.system.emitters.size())
      issues.push_back({at, "emitter index out of range"});
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper))
      issues.push_back({at, "bounds must be finite with lower < upper"});
    else if (slot->log_scale && !(p.lower > 0.0))
      issues.push_back({at, "log-scaled parameter needs a positive lower bound"});
    if (!(p.initial >= p.lower && p.initial <= p.upper))
      issues.push_back({at, "initial value outside bounds"});
  }
  return issues;
}

ModelParams apply(const FitProblem& problem, std::span<const double> values) {
  const auto slots = slots_of(problem);
  if (values.size() != slots.size())
    throw ValidationError("values", "expected " + std::to_string(slots.size()) + " values");
  ModelParams m = problem.fixed;
  for (std::size_t i = 0; i < slots.size(); ++i) assign(m, problem.fixed.system, slots[i], values[i]);
  return m;
}

double residual(const FitProblem& problem, std::span<const double> values) {
  const auto model = model_T(problem.omega, apply(problem, values));
  double rss = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double r = model[k] - problem.T[k];
    rss += r * r;
  }
  return rss;
}

FitResult fit(const FitProblem& problem, unsigned threads) {
  if (auto issues = find_issues(problem); !issues.empty()) throw ValidationError(std::move(issues));
  const auto slots = slots_of(problem);
  const std::size_t n = slots.size();

  std::vector<double> lo(n), hi(n), x0(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = to_search(slots[i], problem.free[i].lower);
    hi[i] = to_search(slots[i], problem.free[i].upper);
    x0[i] = std::clamp(to_search(slots[i], problem.free[i].initial), lo[i], hi[i]);
  }

  auto objective = [&](const std::vector<double>& u) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = from_search(slots[i], u[i]);
    return residual(problem, values);
  };

  const std::size_t starts = 1 + problem.restarts;
  std::vector<RunResult> runs(starts);
  parallel_for(starts, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      std::vector<double> start = x0;
      if (r > 0) {
        std::mt19937_64 engine(mix(problem.seed ^ mix(r)));
        for (std::size_t i = 0; i < n; ++i)
          start[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(engine);
      }
      runs[r] = nelder_mead(objective, start, lo, hi, problem.max_evaluations);
    }
  });

  std::size_t winner = 0;
  for (std::size_t r = 1; r < starts; ++r)
    if (runs[r].rss < runs[winner].rss) winner = r;

  FitResult out;
  std::vector<double> initial(n);
  for (std::size_t i = 0; i < n; ++i) initial[i] = problem.free[i].initial;
  out.initial_rss = residual(problem, initial);
  out.restarts_used = problem.restarts;
  out.best_start = winner;
  out.iterations = runs[winner].iterations;
  out.converged = runs[winner].converged;
  out.best.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.best[i] = from_search(slots[i], runs[winner].best[i]);
  out.rss = residual(problem, out.best);
  if (!(out.rss <= out.initial_rss)) {
    out.best = initial;
    out.rss = out.initial_rss;
  }
  return out;
}

}  // namespace cqed
