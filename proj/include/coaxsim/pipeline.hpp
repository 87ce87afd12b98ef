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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coaxsim/device_model.hpp"

namespace coaxsim {

struct ReportRow {
  std::string name;
  std::string unit;
  double generated = 0.0;
  double recovered = 0.0;
  double rel_error = 0.0;
  bool pass = false;
  std::string note;  // stage failure message, empty on success
};

struct PipelineReport {
  std::vector<ReportRow> rows;
  std::string config_hash;
  std::uint64_t seed = 0;
  double tolerance = 0.02;
  double snr = 0.0;  // 0 = noiseless

  bool all_pass() const;
  const ReportRow& row(const std::string& name) const;
  std::string to_text() const;
};

struct CharacterizeOptions {
  std::uint64_t seed = 0;
  double tolerance = 0.02;
  double snr = 0.0;
  std::optional<std::filesystem::path> out_dir;
};

/// FNV-1a 64 of the canonical config text, as 16 hex digits.
std::string config_hash(const std::string& canonical_text);

/// Synthesizes every experiment from `params`, fits each dataset and
/// assembles the recovered parameter table. Recovered values come only from
/// the fits: f_r0 and Q from the ground-state sweep, chi from the two-pole
/// fit after a pi pulse, f_01 and f_02/2 from two-power spectroscopy,
/// (E_J, E_C) from spectroscopy inversion, g from chi, T1/T2/T2E from the
/// time-domain fits. Throws std::invalid_argument if params are invalid.
PipelineReport characterize(const DeviceParams& params, const CharacterizeOptions& options);

}  // namespace coaxsim
