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

#include "cqed/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace cqed::io {

using nlohmann::json;

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Typed access to one JSON object with key checking. Problems are appended to
// a shared issue list so the whole document is checked in one pass.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<Issue>& issues,
               std::vector<std::string_view> allowed)
      : j_(j), path_(std::move(path)), issues_(issues) {
    if (!j.is_object()) {
      fail(path_, "expected a JSON object");
      ok_ = false;
      return;
    }
    allowed.push_back("provenance");
    for (const auto& [key, value] : j.items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(join(path_, key), "unknown key");
  }

  bool ok() const { return ok_; }
  bool has(std::string_view key) const { return ok_ && j_.contains(std::string(key)); }
  const json& at(std::string_view key) const { return j_.at(std::string(key)); }
  std::string path(std::string_view key) const { return join(path_, key); }

  void number(std::string_view key, double& out, bool required) {
    if (!has(key)) {
      if (required && ok_) fail(path(key), "missing required key");
      return;
    }
    const auto& v = at(key);
    if (!v.is_number()) return fail(path(key), "expected a number");
    out = v.get<double>();
  }

  void unsigned_integer(std::string_view key, std::uint64_t& out, bool required) {
    if (!has(key)) {
      if (required && ok_) fail(path(key), "missing required key");
      return;
    }
    const auto& v = at(key);
    if (!v.is_number_unsigned()) return fail(path(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(std::string_view key, bool& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    if (!v.is_boolean()) return fail(path(key), "expected true or false");
    out = v.get<bool>();
  }

  void string(std::string_view key, std::string& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    if (!v.is_string()) return fail(path(key), "expected a string");
    out = v.get<std::string>();
  }

  void fail(std::string path, std::string message) {
    issues_.push_back({std::move(path), std::move(message)});
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<Issue>& issues_;
  bool ok_ = true;
};

std::optional<GridSpec> read_grid(const json& j, const std::string& path, std::vector<Issue>& issues) {
  ObjectReader r(j, path, issues, {"start", "stop", "points"});
  if (!r.ok()) return std::nullopt;
  GridSpec g;
  std::uint64_t points = 0;
  r.number("start", g.start, true);
  r.number("stop", g.stop, true);
  r.unsigned_integer("points", points, true);
  g.points = static_cast<std::size_t>(points);
  if (g.points == 0) r.fail(r.path("points"), "must be >= 1");
  else if (g.points > 1 && !(g.stop > g.start)) r.fail(r.path("stop"), "must exceed start");
  return g;
}

std::optional<SpinPrep> parse_prep(const std::string& s) {
  if (s == "up") return SpinPrep::up;
  if (s == "down") return SpinPrep::down;
  if (s == "unpolarized") return SpinPrep::unpolarized;
  return std::nullopt;
}

EmitterParams read_emitter(const json& j, const std::string& path, std::vector<Issue>& issues) {
  EmitterParams e;
  ObjectReader r(j, path, issues, {"g", "gamma", "zeeman", "active", "prepared_spin"});
  if (!r.ok()) return e;
  r.number("g", e.g, true);
  r.number("gamma", e.gamma, true);
  r.boolean("active", e.active);
  if (r.has("prepared_spin")) {
    std::string s;
    r.string("prepared_spin", s);
    if (auto p = parse_prep(s)) e.prepared_spin = *p;
    else if (r.at("prepared_spin").is_string())
      r.fail(r.path("prepared_spin"), "expected \"up\", \"down\" or \"unpolarized\"");
  }
  if (!r.has("zeeman")) {
    r.fail(r.path("zeeman"), "missing required key");
  } else {
    ObjectReader z(r.at("zeeman"), r.path("zeeman"), issues,
                   {"omega_zero", "slope_up", "slope_down", "branching_fraction"});
    z.number("omega_zero", e.zeeman.omega_zero, true);
    z.number("slope_up", e.zeeman.slope_up, false);
    z.number("slope_down", e.zeeman.slope_down, false);
    z.number("branching_fraction", e.zeeman.branching_fraction, false);
  }
  return e;
}

std::optional<SweepSection> read_sweep(const json& j, std::size_t emitters, std::vector<Issue>& issues) {
  ObjectReader r(j, "sweep", issues,
                 {"b_start", "b_stop", "b_points", "b_values", "components", "probe_grid"});
  if (!r.ok()) return std::nullopt;
  SweepSection s;
  if (r.has("b_values")) {
    const auto& v = r.at("b_values");
    if (!v.is_array()) r.fail(r.path("b_values"), "expected an array of numbers");
    else
      for (const auto& b : v) {
        if (!b.is_number()) {
          r.fail(r.path("b_values"), "expected an array of numbers");
          break;
        }
        s.b_values.push_back(b.get<double>());
      }
    if (r.has("b_start") || r.has("b_stop") || r.has("b_points"))
      r.fail(r.path("b_values"), "give either b_values or b_start/b_stop/b_points, not both");
  } else {
    double start = 0.0, stop = 0.0;
    std::uint64_t points = 0;
    r.number("b_start", start, true);
    r.number("b_stop", stop, true);
    r.unsigned_integer("b_points", points, true);
    if (points == 0) r.fail(r.path("b_points"), "must be >= 1");
    else if (points > 1 && !(stop > start)) r.fail(r.path("b_stop"), "must exceed b_start");
    else s.b_values = linear_grid(start, stop, static_cast<std::size_t>(points));
  }

  if (!r.has("components")) {
    r.fail(r.path("components"), "missing required key");
  } else if (!r.at("components").is_array()) {
    r.fail(r.path("components"), "expected an array of per-emitter spin lists");
  } else {
    std::size_t c = 0;
    for (const auto& comp : r.at("components")) {
      const std::string at = r.path("components") + "[" + std::to_string(c++) + "]";
      if (!comp.is_array() || comp.size() != emitters) {
        r.fail(at, "expected one of \"up\", \"down\", \"off\" per emitter (" +
                       std::to_string(emitters) + ")");
        continue;
      }
      SpinAssignment a;
      for (const auto& v : comp) {
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "up") a.push_back(Spin::up);
        else if (name == "down") a.push_back(Spin::down);
        else if (name == "off") a.push_back(std::nullopt);
        else {
          r.fail(at, "expected one of \"up\", \"down\", \"off\"");
          break;
        }
      }
      s.components.push_back(std::move(a));
    }
  }
  if (r.has("probe_grid")) s.probe_grid = read_grid(r.at("probe_grid"), r.path("probe_grid"), issues);
  return s;
}

std::optional<ReadoutParams> read_readout(const json& j, std::vector<Issue>& issues) {
  ObjectReader r(j, "readout", issues,
                 {"rate_bright", "rate_dark", "mean_up", "mean_down", "flip_lifetime", "window",
                  "trials", "seed"});
  if (!r.ok()) return std::nullopt;
  ReadoutParams p;
  r.number("flip_lifetime", p.flip_lifetime, true);
  r.number("window", p.window, true);
  r.unsigned_integer("trials", p.trials, true);
  r.unsigned_integer("seed", p.seed, false);
  const bool by_rate = r.has("rate_bright") || r.has("rate_dark");
  const bool by_mean = r.has("mean_up") || r.has("mean_down");
  if (by_rate && by_mean) {
    r.fail("readout", "give either rate_bright/rate_dark or mean_up/mean_down, not both");
  } else if (by_mean) {
    double mean_up = 0.0, mean_down = 0.0;
    r.number("mean_up", mean_up, true);
    r.number("mean_down", mean_down, true);
    if (p.window > 0.0 && p.flip_lifetime > 0.0 && mean_down >= 0.0 && mean_up >= mean_down) {
      const auto cal = calibrate_rates(mean_up, mean_down, p.window, p.flip_lifetime);
      p.rate_bright = cal.rate_bright;
      p.rate_dark = cal.rate_dark;
    } else {
      r.fail("readout", "mean counts need 0 <= mean_down <= mean_up and positive window/flip_lifetime");
    }
  } else {
    r.number("rate_bright", p.rate_bright, true);
    r.number("rate_dark", p.rate_dark, true);
  }
  for (auto& issue : find_issues(p))
    if (issue.path != "readout.trials" || p.trials == 0) issues.push_back(issue);
  return p;
}

json to_json_value(const SystemConfig& c) {
  json emitters = json::array();
  for (const auto& e : c.emitters) {
    emitters.push_back({{"g", e.g},
                        {"gamma", e.gamma},
                        {"zeeman",
                         {{"omega_zero", e.zeeman.omega_zero},
                          {"slope_up", e.zeeman.slope_up},
                          {"slope_down", e.zeeman.slope_down},
                          {"branching_fraction", e.zeeman.branching_fraction}}},
                        {"active", e.active},
                        {"prepared_spin", to_string(e.prepared_spin)}});
  }
  return {{"cavity",
           {{"omega_c", c.cavity.omega_c},
            {"kappa", c.cavity.kappa},
            {"kappa_in", c.cavity.kappa_in},
            {"kappa_out", c.cavity.kappa_out}}},
          {"emitters", emitters},
          {"b_field", c.b_field},
          {"probe_power_note", c.probe_power_note}};
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ValidationError("json (" + line_column(text, at) + ")", e.what());
  }
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

GridSpec parse_grid(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos ||
      text.find(':', b + 1) != std::string_view::npos)
    throw ValidationError("--grid", "expected START:STOP:POINTS");
  auto num = [&](std::string_view s, auto& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ValidationError("--grid", "malformed number '" + std::string(s) + "'");
  };
  GridSpec g;
  num(text.substr(0, a), g.start);
  num(text.substr(a + 1, b - a - 1), g.stop);
  num(text.substr(b + 1), g.points);
  if (g.points == 0) throw ValidationError("--grid", "POINTS must be >= 1");
  if (g.points > 1 && !(g.stop > g.start)) throw ValidationError("--grid", "STOP must exceed START");
  return g;
}

Document parse_document(std::string_view text) {
  const json root = parse_json(text);
  std::vector<Issue> issues;
  Document doc;

  ObjectReader r(root, "", issues,
                 {"cavity", "emitters", "b_field", "probe_power_note", "grid", "sweep", "readout"});
  if (!r.ok()) throw ValidationError(std::move(issues));

  if (!r.has("cavity")) {
    r.fail("cavity", "missing required key");
  } else {
    ObjectReader c(r.at("cavity"), "cavity", issues, {"omega_c", "kappa", "kappa_in", "kappa_out"});
    auto& cav = doc.system.cavity;
    c.number("omega_c", cav.omega_c, true);
    c.number("kappa", cav.kappa, true);
    cav.kappa_in = 0.5 * cav.kappa;
    cav.kappa_out = 0.5 * cav.kappa;
    c.number("kappa_in", cav.kappa_in, false);
    c.number("kappa_out", cav.kappa_out, false);
  }

  if (r.has("emitters")) {
    const auto& list = r.at("emitters");
    if (!list.is_array()) {
      r.fail("emitters", "expected an array");
    } else {
      for (std::size_t j = 0; j < list.size(); ++j)
        doc.system.emitters.push_back(read_emitter(list[j], "emitters[" + std::to_string(j) + "]", issues));
    }
  }
  r.number("b_field", doc.system.b_field, false);
  r.string("probe_power_note", doc.system.probe_power_note);

  if (r.has("grid")) doc.grid = read_grid(r.at("grid"), "grid", issues);
  if (r.has("sweep")) doc.sweep = read_sweep(r.at("sweep"), doc.system.emitters.size(), issues);
  if (r.has("readout")) doc.readout = read_readout(r.at("readout"), issues);

  for (auto& issue : find_issues(doc.system)) issues.push_back(std::move(issue));
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return doc;
}

Document load_document(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_document(text);
  } catch (const ValidationError& e) {
    auto issues = e.issues();
    for (auto& i : issues) i.path = path.string() + ": " + i.path;
    throw ValidationError(std::move(issues));
  }
}

ValidatedConfig load_config(const std::filesystem::path& path) {
  return validate(load_document(path).system);
}

std::string to_json(const SystemConfig& config) { return to_json_value(config).dump(2) + "\n"; }

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw NumericalError("format_double failed");
  return std::string(buf, ptr);
}

std::string spectrum_csv(const TransmissionSpectrum& s) {
  std::string out = "omega_GHz,re_t,im_t,T\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += format_double(s.probe_grid[k]);
    out += ',';
    out += format_double(s.amplitude[k].real());
    out += ',';
    out += format_double(s.amplitude[k].imag());
    out += ',';
    out += format_double(s.intensity[k]);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "B_kG,omega_GHz,T\n";
  for (std::size_t b = 0; b < sweep.b_values.size(); ++b) {
    const std::string field = format_double(sweep.b_values[b]);
    for (std::size_t w = 0; w < sweep.probe_grid.size(); ++w) {
      out += field;
      out += ',';
      out += format_double(sweep.probe_grid[w]);
      out += ',';
      out += format_double(sweep.at(b, w));
      out += '\n';
    }
  }
  return out;
}

std::string sweep_summary_json(const SweepResult& sweep) {
  json branches = json::array();
  for (std::size_t i = 0; i < sweep.branches.size(); ++i) {
    json rows = json::array();
    const auto& br = sweep.branches[i];
    for (std::size_t k = 0; k < br.values.size(); ++k)
      rows.push_back({{"B_kG", sweep.b_values[k]},
                      {"omega_GHz", br.values[k].real()},
                      {"fwhm_GHz", -2.0 * br.values[k].imag()}});
    branches.push_back({{"branch", i}, {"component", br.component}, {"table", rows}});
  }
  json j;
  j["crossing_field"] = std::isfinite(sweep.min_gap) ? json(sweep.crossing_field) : json(nullptr);
  j["min_gap_GHz"] = std::isfinite(sweep.min_gap) ? json(sweep.min_gap) : json(nullptr);
  j["gap_pair"] = {sweep.gap_pair_first, sweep.gap_pair_second};
  j["branches"] = branches;
  return j.dump(2) + "\n";
}

std::string modes_json(const EffectiveSystem& system, const CollectiveModes& modes) {
  json transitions = json::array();
  for (const auto& t : system.transitions)
    transitions.push_back({{"emitter", t.emitter}, {"spin", to_string(t.spin)}, {"omega_GHz", t.omega}});
  json matrix = json::array();
  for (Eigen::Index r = 0; r < system.matrix.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < system.matrix.cols(); ++c) row.push_back(complex_json(system.matrix(r, c)));
    matrix.push_back(row);
  }
  json list = json::array();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    json vec = json::array();
    for (Eigen::Index j = 0; j < modes.eigenvectors.rows(); ++j)
      vec.push_back(complex_json(modes.eigenvectors(j, static_cast<Eigen::Index>(i))));
    list.push_back({{"eigenvalue", complex_json(modes.eigenvalues[i])},
                    {"omega_GHz", modes.frequency(i)},
                    {"fwhm_GHz", modes.linewidth(i)},
                    {"cavity_weight", modes.cavity_weight[i]},
                    {"label", to_string(modes.labels[i])},
                    {"eigenvector", vec}});
  }
  json j{{"reference_GHz", system.reference},
         {"transitions", transitions},
         {"effective_matrix", matrix},
         {"modes", list}};
  return j.dump(2) + "\n";
}

std::string readout_json(const ReadoutParams& p, const ReadoutResult& r) {
  json j{{"params",
          {{"rate_bright", p.rate_bright},
           {"rate_dark", p.rate_dark},
           {"flip_lifetime", std::isfinite(p.flip_lifetime) ? json(p.flip_lifetime) : json("inf")},
           {"window", p.window},
           {"trials", p.trials},
           {"seed", p.seed}}},
         {"threshold", r.threshold},
         {"fidelity", r.fidelity},
         {"fidelity_standard_error", r.standard_error},
         {"fidelity_definition",
          "1 - (P(n < threshold | up) + P(n >= threshold | down)) / 2"},
         {"up_is_bright", r.up_is_bright},
         {"mean_up", r.mean_up},
         {"mean_down", r.mean_down}};
  return j.dump(2) + "\n";
}

std::string histogram_csv(const ReadoutResult& r) {
  std::string out = "count,freq_up,freq_down\n";
  const auto len = std::max(r.histogram_up.freq.size(), r.histogram_down.freq.size());
  for (std::size_t k = 0; k < len; ++k) {
    const auto up = k < r.histogram_up.freq.size() ? r.histogram_up.freq[k] : 0;
    const auto down = k < r.histogram_down.freq.size() ? r.histogram_down.freq[k] : 0;
    out += std::to_string(k) + ',' + std::to_string(up) + ',' + std::to_string(down) + '\n';
  }
  return out;
}

DataSet parse_data_csv(std::string_view text) {
  DataSet d;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "omega_GHz,T") throw ValidationError("data:1", "expected header 'omega_GHz,T'");
      continue;
    }
    const auto comma = line.find(',');
    double w = 0.0, t = 0.0;
    bool ok = comma != std::string_view::npos;
    if (ok) {
      auto [p1, e1] = std::from_chars(line.data(), line.data() + comma, w);
      auto [p2, e2] = std::from_chars(line.data() + comma + 1, line.data() + line.size(), t);
      ok = e1 == std::errc() && e2 == std::errc() && p1 == line.data() + comma &&
           p2 == line.data() + line.size();
    }
    if (!ok) throw ValidationError("data:" + std::to_string(line_no), "expected two numbers 'omega,T'");
    d.omega.push_back(w);
    d.T.push_back(t);
  }
  if (line_no == 0) throw ValidationError("data", "empty file");
  return d;
}

std::string data_csv(const DataSet& data) {
  std::string out = "omega_GHz,T\n";
  for (std::size_t k = 0; k < data.omega.size(); ++k)
    out += format_double(data.omega[k]) + ',' + format_double(data.T[k]) + '\n';
  return out;
}

FitProblem parse_fit_problem(std::string_view text, const SystemConfig& fixed, DataSet data) {
  const json root = parse_json(text);
  std::vector<Issue> issues;
  FitProblem p;
  p.fixed.system = fixed;
  p.omega = std::move(data.omega);
  p.T = std::move(data.T);

  ObjectReader r(root, "problem", issues,
                 {"free", "restarts", "seed", "max_evaluations", "amplitude", "background",
                  "background_phase"});
  if (!r.ok()) throw ValidationError(std::move(issues));
  std::uint64_t restarts = p.restarts, max_eval = p.max_evaluations;
  r.unsigned_integer("restarts", restarts, false);
  r.unsigned_integer("seed", p.seed, false);
  r.unsigned_integer("max_evaluations", max_eval, false);
  p.restarts = static_cast<unsigned>(restarts);
  p.max_evaluations = static_cast<std::size_t>(max_eval);
  r.number("amplitude", p.fixed.amplitude, false);
  r.number("background", p.fixed.background, false);
  r.number("background_phase", p.fixed.background_phase, false);

  if (!r.has("free") || !r.at("free").is_array()) {
    r.fail("problem.free", "expected an array of {name, lower, upper, initial}");
  } else {
    std::size_t i = 0;
    for (const auto& item : r.at("free")) {
      ObjectReader f(item, "problem.free[" + std::to_string(i++) + "]", issues,
                     {"name", "lower", "upper", "initial"});
      FreeParameter fp;
      f.string("name", fp.name);
      if (!f.has("name")) f.fail(f.path("name"), "missing required key");
      f.number("lower", fp.lower, true);
      f.number("upper", fp.upper, true);
      f.number("initial", fp.initial, true);
      p.free.push_back(std::move(fp));
    }
  }
  if (issues.empty())
    for (auto& issue : find_issues(p)) issues.push_back(std::move(issue));
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return p;
}

std::string fit_result_json(const FitProblem& problem, const FitResult& result) {
  json best = json::object();
  for (std::size_t i = 0; i < problem.free.size(); ++i) best[problem.free[i].name] = result.best[i];
  json j{{"best", best},
         {"rss", result.rss},
         {"initial_rss", result.initial_rss},
         {"iterations", result.iterations},
         {"converged", result.converged},
         {"restarts_used", result.restarts_used},
         {"best_start", result.best_start}};
  return j.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot open file for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace cqed::io
