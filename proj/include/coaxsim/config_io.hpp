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

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "coaxsim/device_model.hpp"
#include "coaxsim/experiments.hpp"

namespace coaxsim {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// Flat `key = value` text. '#' starts a comment; blank lines are ignored.
/// Duplicate keys and malformed lines throw ConfigError with the line number.
std::map<std::string, ConfigEntry> parse_key_values(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

// Keys carry their SI unit: f_r0_hz, q_factor, f_01_hz, e_c_hz, e_j_hz, g_hz,
// chi_hz, t1_s, t2_s, t2e_s. Every key is required; unknown keys throw.
DeviceParams parse_device_params(std::string_view text);
std::string format_device_params(const DeviceParams& params);

// c_q_f, c_r_f, c_g_f, l_r_h, e_j_hz.
CircuitNetwork parse_circuit_network(std::string_view text);
std::string format_circuit_network(const CircuitNetwork& net);

/// `kind` is required; other keys override default_experiment(kind, params).
/// The sweep is either `sweep_axis = v0, v1, ...` or sweep_start/sweep_stop/
/// sweep_points.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const DeviceParams& params);
std::string format_experiment_config(const ExperimentConfig& cfg);

/// Shortest round-tripping decimal form.
std::string format_double(double v);

}  // namespace coaxsim
