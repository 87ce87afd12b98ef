// Copyright 2026 The coaxsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coaxsim/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace coaxsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const ConfigEntry& e) {
  const std::string_view v = trim(e.value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                      "' expects a number, got '" + e.value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ConfigError("line " + std::to_string(e.line) + ": key '" + key + "' expects true/false");
}

std::vector<double> parse_list(const std::string& key, const ConfigEntry& e) {
  std::vector<double> out;
  std::string_view rest = e.value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    ConfigEntry item{std::string(trim(rest.substr(0, comma))), e.line};
    out.push_back(parse_number(key, item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

using Handler = std::function<void(const std::string&, const ConfigEntry&)>;

// Applies handlers for every entry; unknown keys and missing required keys
// are errors.
void dispatch(const std::map<std::string, ConfigEntry>& entries,
              const std::map<std::string, Handler>& handlers,
              const std::set<std::string>& required) {
  for (const auto& [key, entry] : entries) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
    }
    it->second(key, entry);
  }
  for (const auto& key : required) {
    if (!entries.count(key)) throw ConfigError("missing required key '" + key + "'");
  }
}

Handler number_into(double& target) {
  return [&target](const std::string& k, const ConfigEntry& e) { target = parse_number(k, e); };
}

}  // namespace

std::map<std::string, ConfigEntry> parse_key_values(std::string_view text) {
  std::map<std::string, ConfigEntry> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    }
    if (!out.emplace(key, ConfigEntry{value, line_no}).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DeviceParams parse_device_params(std::string_view text) {
  DeviceParams p;
  const std::map<std::string, Handler> handlers = {
      {"f_r0_hz", number_into(p.f_r0)}, {"q_factor", number_into(p.q_factor)},
      {"f_01_hz", number_into(p.f_01)}, {"e_c_hz", number_into(p.e_c)},
      {"e_j_hz", number_into(p.e_j)},   {"g_hz", number_into(p.g)},
      {"chi_hz", number_into(p.chi)},   {"t1_s", number_into(p.t1)},
      {"t2_s", number_into(p.t2)},      {"t2e_s", number_into(p.t2e)},
  };
  std::set<std::string> required;
  for (const auto& [k, h] : handlers) required.insert(k);
  dispatch(parse_key_values(text), handlers, required);
  return p;
}

std::string format_device_params(const DeviceParams& p) {
  std::ostringstream out;
  out << "f_r0_hz = " << format_double(p.f_r0) << "\n"
      << "q_factor = " << format_double(p.q_factor) << "\n"
      << "f_01_hz = " << format_double(p.f_01) << "\n"
      << "e_c_hz = " << format_double(p.e_c) << "\n"
      << "e_j_hz = " << format_double(p.e_j) << "\n"
      << "g_hz = " << format_double(p.g) << "\n"
      << "chi_hz = " << format_double(p.chi) << "\n"
      << "t1_s = " << format_double(p.t1) << "\n"
      << "t2_s = " << format_double(p.t2) << "\n"
      << "t2e_s = " << format_double(p.t2e) << "\n";
  return out.str();
}

CircuitNetwork parse_circuit_network(std::string_view text) {
  CircuitNetwork n;
  const std::map<std::string, Handler> handlers = {
      {"c_q_f", number_into(n.c_q)}, {"c_r_f", number_into(n.c_r)},
      {"c_g_f", number_into(n.c_g)}, {"l_r_h", number_into(n.l_r)},
      {"e_j_hz", number_into(n.e_j)},
  };
  std::set<std::string> required;
  for (const auto& [k, h] : handlers) required.insert(k);
  dispatch(parse_key_values(text), handlers, required);
  return n;
}

std::string format_circuit_network(const CircuitNetwork& n) {
  std::ostringstream out;
  out << "c_q_f = " << format_double(n.c_q) << "\n"
      << "c_r_f = " << format_double(n.c_r) << "\n"
      << "c_g_f = " << format_double(n.c_g) << "\n"
      << "l_r_h = " << format_double(n.l_r) << "\n"
      << "e_j_hz = " << format_double(n.e_j) << "\n";
  return out.str();
}

ExperimentConfig parse_experiment_config(std::string_view text, const DeviceParams& params) {
  const auto entries = parse_key_values(text);
  const auto kind_it = entries.find("kind");
  if (kind_it == entries.end()) throw ConfigError("missing required key 'kind'");
  ExperimentConfig cfg;
  try {
    cfg = default_experiment(parse_experiment_kind(kind_it->second.value), params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("line " + std::to_string(kind_it->second.line) + ": " + e.what());
  }

  double start = 0.0, stop = 0.0, points = 0.0, averages = 1.0;
  double offset_re = cfg.interference_offset.real(), offset_im = cfg.interference_offset.imag();
  bool has_list = false;
  const std::map<std::string, Handler> handlers = {
      {"kind", [](const std::string&, const ConfigEntry&) {}},
      {"sweep_axis",
       [&](const std::string& k, const ConfigEntry& e) {
         cfg.sweep_axis = parse_list(k, e);
         has_list = true;
       }},
      {"sweep_start", number_into(start)},
      {"sweep_stop", number_into(stop)},
      {"sweep_points", number_into(points)},
      {"drive_power_dbm", number_into(cfg.drive_power_dbm)},
      {"readout_power_dbm", number_into(cfg.readout_power_dbm)},
      {"readout_len_s", number_into(cfg.readout_len)},
      {"readout_sample_interval_s", number_into(cfg.readout_sample_interval)},
      {"qubit_pulse_len_s", number_into(cfg.qubit_pulse_len)},
      {"detuning_hz", number_into(cfg.detuning)},
      {"averages", number_into(averages)},
      {"noise_sigma", number_into(cfg.noise_sigma)},
      {"seed",
       [&](const std::string& k, const ConfigEntry& e) {
         const std::string_view v = trim(e.value);
         const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), cfg.seed);
         if (ec != std::errc() || ptr != v.data() + v.size()) {
           throw ConfigError("line " + std::to_string(e.line) + ": key '" + k +
                             "' expects a non-negative integer");
         }
       }},
      {"pi_pulse", [&](const std::string& k, const ConfigEntry& e) { cfg.pi_pulse = parse_bool(k, e); }},
      {"interference_offset_re", number_into(offset_re)},
      {"interference_offset_im", number_into(offset_im)},
      {"rabi_hz_at_0dbm", number_into(cfg.calibration.rabi_hz_at_0dbm)},
      {"spec_rabi_hz_at_0dbm", number_into(cfg.calibration.spec_rabi_hz_at_0dbm)},
      {"readout_ref_dbm", number_into(cfg.calibration.readout_ref_dbm)},
      {"readout_ref_nbar", number_into(cfg.calibration.readout_ref_nbar)},
  };
  dispatch(entries, handlers, {"kind"});

  const int range_keys = static_cast<int>(entries.count("sweep_start")) +
                         static_cast<int>(entries.count("sweep_stop")) +
                         static_cast<int>(entries.count("sweep_points"));
  if (has_list && range_keys > 0) {
    throw ConfigError("give either sweep_axis or sweep_start/sweep_stop/sweep_points, not both");
  }
  if (range_keys > 0) {
    if (range_keys != 3) throw ConfigError("sweep_start, sweep_stop and sweep_points go together");
    if (points < 2 || points != std::floor(points)) {
      throw ConfigError("line " + std::to_string(entries.at("sweep_points").line) +
                        ": sweep_points must be an integer >= 2");
    }
    const auto n = static_cast<std::size_t>(points);
    cfg.sweep_axis.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      cfg.sweep_axis[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
  }
  if (averages < 1 || averages != std::floor(averages)) {
    throw ConfigError("averages must be an integer >= 1");
  }
  cfg.averages = static_cast<int>(averages);
  cfg.interference_offset = cplx(offset_re, offset_im);
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string format_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "kind = " << to_string(cfg.kind) << "\n";
  out << "sweep_axis = ";
  for (std::size_t k = 0; k < cfg.sweep_axis.size(); ++k) {
    out << (k ? ", " : "") << format_double(cfg.sweep_axis[k]);
  }
  out << "\n"
      << "drive_power_dbm = " << format_double(cfg.drive_power_dbm) << "\n"
      << "readout_power_dbm = " << format_double(cfg.readout_power_dbm) << "\n"
      << "readout_len_s = " << format_double(cfg.readout_len) << "\n"
      << "readout_sample_interval_s = " << format_double(cfg.readout_sample_interval) << "\n"
      << "qubit_pulse_len_s = " << format_double(cfg.qubit_pulse_len) << "\n"
      << "detuning_hz = " << format_double(cfg.detuning) << "\n"
      << "averages = " << cfg.averages << "\n"
      << "noise_sigma = " << format_double(cfg.noise_sigma) << "\n"
      << "seed = " << cfg.seed << "\n"
      << "pi_pulse = " << (cfg.pi_pulse ? "true" : "false") << "\n"
      << "interference_offset_re = " << format_double(cfg.interference_offset.real()) << "\n"
      << "interference_offset_im = " << format_double(cfg.interference_offset.imag()) << "\n"
      << "rabi_hz_at_0dbm = " << format_double(cfg.calibration.rabi_hz_at_0dbm) << "\n"
      << "spec_rabi_hz_at_0dbm = " << format_double(cfg.calibration.spec_rabi_hz_at_0dbm) << "\n"
      << "readout_ref_dbm = " << format_double(cfg.calibration.readout_ref_dbm) << "\n"
      << "readout_ref_nbar = " << format_double(cfg.calibration.readout_ref_nbar) << "\n";
  return out.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace coaxsim
