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

// File formats: JSON configuration documents, CSV/JSON artifacts.
//
// Numbers are written with the shortest representation that round-trips and
// never depend on the process locale.

#ifndef CQED_IO_HPP_
#define CQED_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/dispersive.hpp"
#include "cqed/fit.hpp"
#include "cqed/model.hpp"
#include "cqed/readout.hpp"
#include "cqed/spectrum.hpp"

namespace cqed::io {

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const { return linear_grid(start, stop, points); }
};

/// Parses "START:STOP:POINTS".
GridSpec parse_grid(std::string_view text);

struct SweepSection {
  std::vector<double> b_values;
  std::vector<SpinAssignment> components;
  std::optional<GridSpec> probe_grid;
};

/// Everything a configuration file may carry: the system itself plus optional
/// sections used by individual subcommands. Objects may contain a
/// "provenance" member, which is accepted and ignored; any other unknown key is
/// an error.
struct Document {
  SystemConfig system;
  std::optional<GridSpec> grid;
  std::optional<SweepSection> sweep;
  std::optional<ReadoutParams> readout;
};

/// Throws ValidationError listing every problem found: JSON syntax errors
/// (with line and column), unknown or missing keys, wrong types, and every
/// violated SystemConfig invariant.
Document parse_document(std::string_view json_text);
Document load_document(const std::filesystem::path& path);

/// Loads and validates the system part of a configuration file.
ValidatedConfig load_config(const std::filesystem::path& path);

std::string to_json(const SystemConfig& config);

std::string format_double(double x);

/// Header `omega_GHz,re_t,im_t,T`.
std::string spectrum_csv(const TransmissionSpectrum& spectrum);

/// Long format, header `B_kG,omega_GHz,T`.
std::string sweep_csv(const SweepResult& sweep);
std::string sweep_summary_json(const SweepResult& sweep);

std::string modes_json(const EffectiveSystem& system, const CollectiveModes& modes);

std::string readout_json(const ReadoutParams& params, const ReadoutResult& result);
/// Header `count,freq_up,freq_down`.
std::string histogram_csv(const ReadoutResult& result);

struct DataSet {
  std::vector<double> omega;
  std::vector<double> T;
};
/// CSV with header `omega_GHz,T`.
DataSet parse_data_csv(std::string_view text);
std::string data_csv(const DataSet& data);

/// Fit problem document: {"free": [{"name","lower","upper","initial"}...],
/// "restarts", "seed", "max_evaluations", "amplitude", "background",
/// "background_phase"}. Physics comes from `fixed`.
FitProblem parse_fit_problem(std::string_view json_text, const SystemConfig& fixed, DataSet data);
std::string fit_result_json(const FitProblem& problem, const FitResult& result);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace cqed::io

#endif  // CQED_IO_HPP_
