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

#include "coaxsim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "coaxsim/config_io.hpp"
#include "coaxsim/csv_io.hpp"
#include "coaxsim/dispersive.hpp"
#include "coaxsim/experiments.hpp"
#include "coaxsim/transmon.hpp"

namespace coaxsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

}  // namespace

bool PipelineReport::all_pass() const {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

const ReportRow& PipelineReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no report row '" + name + "'");
}

std::string PipelineReport::to_text() const {
  std::ostringstream out;
  out << "config_hash = " << config_hash << "\n"
      << "seed = " << seed << "\n"
      << "snr = " << (snr > 0.0 ? format_g(snr) : "inf") << "\n"
      << "tolerance = " << format_g(tolerance) << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-5s %15s %15s %11s  %s\n", "parameter", "unit",
                "generated", "recovered", "rel_error", "status");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %-5s %15s %15s %11s  %s", r.name.c_str(),
                  r.unit.c_str(), format_g(r.generated).c_str(), format_g(r.recovered).c_str(),
                  format_g(r.rel_error).c_str(), r.pass ? "PASS" : "FAIL");
    out << line;
    if (!r.note.empty()) out << "  (" << r.note << ")";
    out << "\n";
  }
  out << "overall = " << (all_pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string config_hash(const std::string& canonical_text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineReport characterize(const DeviceParams& params, const CharacterizeOptions& options) {
  validate(params);
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (options.snr < 0.0) throw std::invalid_argument("snr must be >= 0");

  PipelineReport report;
  report.config_hash = config_hash(format_device_params(params));
  report.seed = options.seed;
  report.tolerance = options.tolerance;
  report.snr = options.snr;

  int stage = 0;
  // Prepares a noisy config for one experiment; each stage draws from its
  // own seed.
  auto configure = [&](ExperimentConfig cfg) {
    cfg.seed = options.seed * 1000003ull + static_cast<std::uint64_t>(++stage);
    if (options.snr > 0.0) {
      if (cfg.kind == ExperimentKind::kResonatorSweep) {
        cfg.noise_sigma = std::sqrt(static_cast<double>(cfg.averages)) / options.snr;
      } else {
        const ReadoutPulse pulse = readout_pulse(params, cfg);
        cfg.noise_sigma = noise_sigma_for_snr(
            options.snr, measurement_trace(params, 0.0, pulse, cfg.interference_offset),
            measurement_trace(params, 1.0, pulse, cfg.interference_offset), cfg.averages);
      }
    }
    return cfg;
  };
  auto run = [&](const ExperimentConfig& cfg) {
    Dataset data = synthesize(params, cfg);
    if (options.out_dir) {
      std::string name(to_string(cfg.kind));
      if (cfg.kind == ExperimentKind::kResonatorSweep && cfg.pi_pulse) name += "_pi";
      if (cfg.kind == ExperimentKind::kQubitSpectroscopy && cfg.drive_power_dbm < -20.0) {
        name += "_low";
      }
      write_dataset(*options.out_dir / name, data, cfg);
    }
    return data;
  };

  std::map<std::string, double> recovered;
  std::map<std::string, std::string> failures;
  auto attempt = [&](const std::vector<std::string>& names, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      for (const auto& n : names) failures[n] = e.what();
    }
  };
  auto require = [](const FitResult& fit, const char* what) {
    if (!fit.converged) {
      throw std::runtime_error(std::string(what) + " fit did not converge" +
                               (fit.note.empty() ? "" : ": " + fit.note));
    }
  };

  attempt({"f_r0", "Q"}, [&] {
    const Dataset ground = run(configure(default_experiment(ExperimentKind::kResonatorSweep, params)));
    ResonatorResponse resp{ground.axis, ground.iq, ResponseMode::kTransmission};
    const FitResult single = fit_lorentzian_complex(resp);
    require(single, "resonator");
    recovered["f_r0"] = single.value("f0");
    recovered["Q"] = single.value("q_factor");
  });

  // The excited pole comes from the pi-pulse sweep; the ground pole is taken
  // from the cleaner ground-state sweep.
  if (recovered.count("f_r0")) {
    attempt({"chi"}, [&] {
      ExperimentConfig pi_cfg = default_experiment(ExperimentKind::kResonatorSweep, params);
      pi_cfg.pi_pulse = true;
      const Dataset excited = run(configure(pi_cfg));
      ResonatorResponse resp_pi{excited.axis, excited.iq, ResponseMode::kTransmission};
      const FitResult pair = fit_double_lorentzian(resp_pi, recovered["f_r0"]);
      require(pair, "two-pole resonator");
      recovered["chi"] = 0.5 * (pair.value("f_r1") - recovered["f_r0"]);
    });
  } else {
    failures["chi"] = "upstream stage failed";
  }

  attempt({"f_01", "E_C", "E_J/E_C"}, [&] {
    ExperimentConfig low = default_experiment(ExperimentKind::kQubitSpectroscopy, params);
    low.drive_power_dbm = -45.0;
    const Dataset low_data = run(configure(low));
    const Dataset high_data =
        run(configure(default_experiment(ExperimentKind::kQubitSpectroscopy, params)));
    const SpectroscopyLines lines = fit_spectroscopy(low_data, high_data);
    recovered["f_01"] = lines.f_01;
    const JosephsonCharging jc = invert_spectroscopy(lines.f_01, lines.f_02_over_2);
    recovered["E_C"] = jc.e_c;
    recovered["E_J/E_C"] = jc.e_j / jc.e_c;
  });

  if (recovered.count("chi") && recovered.count("f_01") && recovered.count("E_C")) {
    attempt({"g"}, [&] {
      recovered["g"] = g_from_chi(recovered["chi"], recovered["f_01"] - recovered["f_r0"],
                                  recovered["E_C"]);
    });
  } else {
    failures["g"] = "upstream stage failed";
  }

  auto time_domain = [&](const char* name, ExperimentKind kind) {
    attempt({name}, [&] {
      const Dataset data = run(configure(default_experiment(kind, params)));
      const FitResult fit = fit_dataset(data);
      require(fit, name);
      recovered[name] = fit.value("decay_time");
    });
  };
  time_domain("T1", ExperimentKind::kT1);
  time_domain("T2", ExperimentKind::kRamsey);
  time_domain("T2E", ExperimentKind::kEcho);

  const std::vector<std::tuple<std::string, std::string, double>> table = {
      {"f_r0", "Hz", params.f_r0},
      {"Q", "-", params.q_factor},
      {"f_01", "Hz", params.f_01},
      {"chi", "Hz", params.chi},
      {"E_C", "Hz", params.e_c},
      {"E_J/E_C", "-", params.e_j / params.e_c},
      {"g", "Hz", params.g},
      {"T1", "s", params.t1},
      {"T2", "s", params.t2},
      {"T2E", "s", params.t2e},
  };
  for (const auto& [name, unit, generated] : table) {
    ReportRow row;
    row.name = name;
    row.unit = unit;
    row.generated = generated;
    if (const auto it = recovered.find(name); it != recovered.end() && !failures.count(name)) {
      row.recovered = it->second;
      row.rel_error = std::abs(row.recovered - generated) / std::abs(generated);
      row.pass = std::isfinite(row.rel_error) && row.rel_error <= options.tolerance;
    } else {
      row.recovered = kNaN;
      row.rel_error = kNaN;
      row.note = failures.count(name) ? failures[name] : "not recovered";
    }
    report.rows.push_back(row);
  }
  if (options.out_dir) write_text_file(*options.out_dir / "report.txt", report.to_text());
  return report;
}

}  // namespace coaxsim
