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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "cqed/dispersive.hpp"
#include "cqed/fit.hpp"
#include "cqed/io.hpp"
#include "cqed/parallel.hpp"
#include "cqed/readout.hpp"
#include "cqed/spectrum.hpp"

namespace cqed::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string grid;
  std::string data;
  std::string problem;
  std::optional<double> reference;
};

struct Manifest {
  std::string subcommand;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
};

unsigned thread_count(const Options& opt) {
  if (opt.threads) return *opt.threads;
  if (const char* env = std::getenv("CQED_SIM_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw ValidationError("CQED_SIM_THREADS", "expected a non-negative integer");
    }
  }
  return 0;
}

std::vector<double> probe_grid(const Options& opt, const std::optional<io::GridSpec>& fallback) {
  if (!opt.grid.empty()) return io::parse_grid(opt.grid).values();
  if (fallback) return fallback->values();
  throw ValidationError("--grid", "no probe grid given on the command line or in the config");
}

void emit(const Options& opt, Manifest& m, const std::string& name, const std::string& contents) {
  io::write_file(fs::path(opt.out) / name, contents);
  m.outputs.push_back(name);
}

void run_spectrum(const Options& opt, Manifest& m, std::ostream& out) {
  const auto doc = io::load_document(opt.config);
  const auto config = validate(doc.system);
  const auto grid = probe_grid(opt, doc.grid);
  const auto spectrum = transmission_spectrum(grid, config, thread_count(opt));
  emit(opt, m, "spectrum.csv", io::spectrum_csv(spectrum));
  out << "spectrum: " << grid.size() << " points\n";
}

void run_modes(const Options& opt, Manifest& m, std::ostream& out) {
  const auto config = load_config(opt.config);
  const auto system = effective_matrix(config, opt.reference);
  std::vector<double> g;
  for (const auto& t : system.transitions) g.push_back(t.g);
  const auto modes = collective_modes(system.matrix, g);
  emit(opt, m, "modes.json", io::modes_json(system, modes));
  for (std::size_t i = 0; i < modes.size(); ++i)
    out << "mode " << i << ": omega = " << io::format_double(modes.frequency(i))
        << " GHz, fwhm = " << io::format_double(modes.linewidth(i)) << " GHz ("
        << to_string(modes.labels[i]) << ")\n";
}

void run_sweep(const Options& opt, Manifest& m, std::ostream& out) {
  const auto doc = io::load_document(opt.config);
  if (!doc.sweep) throw ValidationError("sweep", "config has no sweep section");
  const auto config = validate(doc.system);
  SweepSpec spec;
  spec.b_values = doc.sweep->b_values;
  spec.components = doc.sweep->components;
  spec.probe_grid = probe_grid(opt, doc.sweep->probe_grid ? doc.sweep->probe_grid : doc.grid);
  const auto result = field_sweep(config, spec, thread_count(opt));
  emit(opt, m, "sweep.csv", io::sweep_csv(result));
  emit(opt, m, "sweep_summary.json", io::sweep_summary_json(result));
  out << "sweep: min gap " << io::format_double(result.min_gap) << " GHz at "
      << io::format_double(result.crossing_field) << " kG\n";
}

void run_readout(const Options& opt, Manifest& m, std::ostream& out) {
  const auto doc = io::load_document(opt.config);
  if (!doc.readout) throw ValidationError("readout", "config has no readout section");
  auto params = *doc.readout;
  if (opt.seed) params.seed = *opt.seed;
  m.seed = params.seed;
  const auto result = simulate_readout(params, thread_count(opt));
  emit(opt, m, "readout.json", io::readout_json(params, result));
  emit(opt, m, "readout_histograms.csv", io::histogram_csv(result));
  out << "readout: threshold " << result.threshold << ", fidelity "
      << io::format_double(result.fidelity) << "\n";
}

void run_fit(const Options& opt, Manifest& m, std::ostream& out) {
  if (opt.data.empty()) throw ValidationError("--data", "fit needs a data CSV");
  if (opt.problem.empty()) throw ValidationError("--problem", "fit needs a problem JSON");
  const auto config = load_config(opt.config);
  auto problem = io::parse_fit_problem(io::read_file(opt.problem), config.get(),
                                       io::parse_data_csv(io::read_file(opt.data)));
  if (opt.seed) problem.seed = *opt.seed;
  m.seed = problem.seed;
  const auto result = fit(problem, thread_count(opt));
  emit(opt, m, "fit_result.json", io::fit_result_json(problem, result));
  out << "fit: rss " << io::format_double(result.rss)
      << (result.converged ? " (converged)\n" : " (not converged)\n");
}

void run_validate(const Options& opt, Manifest&, std::ostream& out) {
  const auto doc = io::load_document(opt.config);
  const auto n = doc.system.emitters.size();
  out << opt.config << ": ok (" << n << (n == 1 ? " emitter)\n" : " emitters)\n");
}

void write_manifest(const Options& opt, const Manifest& m, double wall_seconds, unsigned threads) {
  nlohmann::json j{{"subcommand", m.subcommand},
                   {"config", opt.config},
                   {"outputs", m.outputs},
                   {"seed", m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr)},
                   {"threads", resolve_threads(threads)},
                   {"tool_version", CQED_VERSION_STRING},
                   {"wall_time_s", wall_seconds}};
  io::write_file(fs::path(opt.out) / "manifest.json", j.dump(2) + "\n");
}

}  // namespace

ValidatedConfig load_config(const fs::path& path) { return io::load_config(path); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cavity-QED transmission, collective-mode, readout and fitting toolkit", "cqed-sim"};
  app.set_version_flag("--version", CQED_VERSION_STRING);
  app.require_subcommand(1, 1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config, "System configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "Output directory (created if missing)");
  app.add_option("--seed", opt.seed, "Random seed (readout, fit)");
  app.add_option("--threads", opt.threads, "Thread cap; 0 = all cores (env CQED_SIM_THREADS)");
  app.add_option("--grid", opt.grid, "Probe grid START:STOP:POINTS in GHz");

  struct Entry {
    const char* name;
    const char* help;
    void (*fn)(const Options&, Manifest&, std::ostream&);
  };
  const Entry entries[] = {
      {"spectrum", "Weak-probe transmission spectrum", run_spectrum},
      {"modes", "Collective modes of the dispersive effective matrix", run_modes},
      {"sweep", "Magnetic-field sweep: transmission map and mode branches", run_sweep},
      {"readout", "Monte-Carlo single-shot spin readout", run_readout},
      {"fit", "Least-squares fit of a transmission spectrum", run_fit},
      {"validate", "Check a configuration file", run_validate},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) subs.push_back(app.add_subcommand(e.name, e.help));
  subs[1]->add_option("--reference", opt.reference, "Elimination reference frequency, GHz");
  subs[4]->add_option("--data", opt.data, "Measured spectrum CSV (omega_GHz,T)")->check(CLI::ExistingFile);
  subs[4]->add_option("--problem", opt.problem, "Fit problem JSON")->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CQED_VERSION_STRING << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::size_t chosen = 0;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) chosen = i;
  if (opt.config.empty()) {
    err << "error: --config is required\n\n" << app.help();
    return kExitUsage;
  }

  Manifest manifest;
  manifest.subcommand = entries[chosen].name;
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(opt.out);
    entries[chosen].fn(opt, manifest, out);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    write_manifest(opt, manifest, wall.count(), thread_count(opt));
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace cqed::cli
