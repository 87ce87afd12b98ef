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
#include <string>
#include <vector>

#include "coaxsim/dispersive.hpp"
#include "coaxsim/dynamics.hpp"
#include "coaxsim/experiments.hpp"

namespace coaxsim {

// Every CSV starts with a fixed header line:
//   resonator response / resonator sweep:  f_hz,re,im
//   IQ trace:                              t_s,re,im
//   population table:                      t_s,p1  or  f_hz,p1

std::string to_csv(const ResonatorResponse& resp);
std::string to_csv(const IQTrace& trace);
std::string population_csv(const Dataset& data);

/// Parsed numeric table with its header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

/// Throws ConfigError (with line numbers) on malformed input or an empty table.
CsvTable parse_csv(const std::string& text);

ResonatorResponse resonator_response_from_csv(const CsvTable& table);
IQTrace iq_trace_from_csv(const CsvTable& table);

/// Reads a dataset written by write_dataset; `kind` selects the schema.
Dataset dataset_from_csv(ExperimentKind kind, const CsvTable& table);

/// Writes <kind>.csv, <kind>.meta (key = value sidecar), and for readout
/// kinds the calibration traces <kind>_cal0.csv / <kind>_cal1.csv.
void write_dataset(const std::filesystem::path& dir, const Dataset& data,
                   const ExperimentConfig& cfg);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace coaxsim
