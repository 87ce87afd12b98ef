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

#include "coaxsim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include "coaxsim/config_io.hpp"
#include "coaxsim/csv_io.hpp"
#include "coaxsim/device_model.hpp"
#include "coaxsim/dispersive.hpp"
#include "coaxsim/experiments.hpp"
#include "coaxsim/pipeline.hpp"
#include "coaxsim/transmon.hpp"

namespace coaxsim {

namespace {

struct Options {
  std::string config;
  std::string experiment;
  std::string out;
  std::string kind;
  std::string csv;
  std::uint64_t seed = 0;
  double snr = 0.0;
  double tolerance = 0.02;
  bool oracle = false;
  bool pi_pulse = false;
  bool double_lorentzian = false;
};

DeviceParams load_device(const std::string& path, std::ostream& err) {
  const DeviceParams params = parse_device_params(read_text_file(path));
  for (const auto& warning : validate(params)) err << "warning: " << warning << "\n";
  return params;
}

int cmd_quantize(const Options& opt, std::ostream& out, std::ostream& err) {
  const CircuitNetwork net = parse_circuit_network(read_text_file(opt.config));
  const QuantizedCircuit q = quantize_circuit(net);
  out << "f_r0_hz = " << format_double(q.f_r0) << "\n"
      << "f_r0_dressed_hz = " << format_double(q.f_r0_dressed) << "\n"
      << "e_c_hz = " << format_double(q.e_c) << "\n"
      << "e_j_hz = " << format_double(net.e_j) << "\n"
      << "g_hz = " << format_double(q.g) << "\n";
  if (!opt.oracle) return kExitOk;

  const BruteForceSpectrum bf = brute_force_spectrum(net);
  out << "oracle_f_r0_hz = " << format_double(bf.f_r0) << "\n"
      << "oracle_f_01_hz = " << format_double(bf.f_01) << "\n"
      << "oracle_g_hz = " << format_double(bf.g) << "\n"
      << "oracle_chi_hz = " << format_double(bf.chi) << "\n";
  const double scale = std::max(std::abs(bf.g), 1.0);
  const double g_err = std::abs(q.g - bf.g) / scale;
  const double f_err = std::abs(q.f_r0_dressed - bf.f_r0) / bf.f_r0;
  out << "oracle_g_rel_error = " << format_double(g_err) << "\n"
      << "oracle_f_r0_rel_error = " << format_double(f_err) << "\n";
  if (g_err > opt.tolerance || f_err > opt.tolerance) {
    err << "error: quantization disagrees with the oracle beyond tolerance "
        << format_double(opt.tolerance) << "\n";
    return kExitToleranceFailure;
  }
  return kExitOk;
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  const DeviceParams params = load_device(opt.config, err);
  const ExperimentKind kind = parse_experiment_kind(opt.kind);
  ExperimentConfig cfg = default_experiment(kind, params);
  if (!opt.experiment.empty()) {
    cfg = parse_experiment_config(read_text_file(opt.experiment), params);
    if (cfg.kind != kind) {
      throw ConfigError("experiment config kind '" + std::string(to_string(cfg.kind)) +
                        "' does not match '" + opt.kind + "'");
    }
  }
  cfg.seed = opt.seed;
  if (opt.pi_pulse) cfg.pi_pulse = true;
  if (opt.snr > 0.0) {
    if (kind == ExperimentKind::kResonatorSweep) {
      cfg.noise_sigma = std::sqrt(static_cast<double>(cfg.averages)) / opt.snr;
    } else {
      const ReadoutPulse pulse = readout_pulse(params, cfg);
      cfg.noise_sigma = noise_sigma_for_snr(
          opt.snr, measurement_trace(params, 0.0, pulse, cfg.interference_offset),
          measurement_trace(params, 1.0, pulse, cfg.interference_offset), cfg.averages);
    }
  }
  const Dataset data = synthesize(params, cfg);
  write_dataset(opt.out, data, cfg);
  out << "wrote " << (std::filesystem::path(opt.out) / (std::string(to_string(kind)) + ".csv")).string()
      << " (" << data.axis.size() << " points)\n";
  return kExitOk;
}

int cmd_fit(const Options& opt, std::ostream& out) {
  const ExperimentKind kind = parse_experiment_kind(opt.kind);
  const Dataset data = dataset_from_csv(kind, parse_csv(read_text_file(opt.csv)));
  const FitResult fit = fit_dataset(data, opt.double_lorentzian);
  out << to_text(fit);
  return fit.converged ? kExitOk : kExitNotConverged;
}

int cmd_characterize(const Options& opt, std::ostream& out, std::ostream& err) {
  const DeviceParams params = load_device(opt.config, err);
  CharacterizeOptions options;
  options.seed = opt.seed;
  options.snr = opt.snr;
  options.tolerance = opt.tolerance;
  if (!opt.out.empty()) options.out_dir = opt.out;
  const PipelineReport report = characterize(params, options);
  out << report.to_text();
  return report.all_pass() ? kExitOk : kExitToleranceFailure;
}

int cmd_report(const Options& opt, std::ostream& out, std::ostream& err) {
  const DeviceParams params = load_device(opt.config, err);
  const DerivedParams d = derived_quantities(params);
  const auto lines = transition_frequencies(diagonalize_transmon(params.e_j, params.e_c));
  out << format_device_params(params)
      << "delta0_hz = " << format_double(d.delta0) << "\n"
      << "kappa_hz = " << format_double(d.kappa) << "\n"
      << "anharmonicity_hz = " << format_double(d.anharmonicity) << "\n"
      << "e_j_over_e_c = " << format_double(params.e_j / params.e_c) << "\n"
      << "transmon_f_01_hz = " << format_double(lines.f_01) << "\n"
      << "transmon_f_02_over_2_hz = " << format_double(lines.f_02_over_2) << "\n"
      << "transmon_f_03_over_3_hz = " << format_double(lines.f_03_over_3) << "\n"
      << "transmon_f_12_hz = " << format_double(lines.f_12) << "\n"
      << "chi_dispersive_hz = "
      << format_double(chi_from_params(params.g, d.delta0, params.e_c)) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transmon-resonator simulator and characterization pipeline", "coaxsim"};
  app.require_subcommand(1);
  Options opt;

  auto* quantize = app.add_subcommand("quantize", "Quantize a lumped circuit network");
  quantize->add_option("--config", opt.config, "circuit config")->required();
  quantize->add_flag("--oracle", opt.oracle, "compare against brute-force diagonalization");
  quantize->add_option("--tolerance", opt.tolerance, "oracle tolerance (relative)");

  auto* simulate = app.add_subcommand("simulate", "Synthesize one experiment dataset");
  simulate->add_option("kind", opt.kind, "experiment kind")->required();
  simulate->add_option("--config", opt.config, "device config")->required();
  simulate->add_option("--experiment", opt.experiment, "experiment config");
  simulate->add_option("--out", opt.out, "output directory")->required();
  simulate->add_option("--seed", opt.seed, "noise seed");
  simulate->add_option("--snr", opt.snr, "signal-to-noise ratio (0 = noiseless)");
  simulate->add_flag("--pi-pulse", opt.pi_pulse, "resonator sweep after a pi pulse");

  auto* fit = app.add_subcommand("fit", "Fit a dataset CSV");
  fit->add_option("kind", opt.kind, "experiment kind")->required();
  fit->add_option("csv", opt.csv, "dataset CSV")->required();
  fit->add_flag("--double", opt.double_lorentzian, "two-pole resonator fit");

  auto* characterize_cmd =
      app.add_subcommand("characterize", "Simulate and fit every experiment");
  characterize_cmd->add_option("--config", opt.config, "device config")->required();
  characterize_cmd->add_option("--out", opt.out, "output directory");
  characterize_cmd->add_option("--seed", opt.seed, "noise seed");
  characterize_cmd->add_option("--snr", opt.snr, "signal-to-noise ratio (0 = noiseless)");
  characterize_cmd->add_option("--tolerance", opt.tolerance, "pass tolerance (relative)");

  auto* report = app.add_subcommand("report", "Print derived device quantities");
  report->add_option("--config", opt.config, "device config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (quantize->parsed()) return cmd_quantize(opt, out, err);
    if (simulate->parsed()) return cmd_simulate(opt, out, err);
    if (fit->parsed()) return cmd_fit(opt, out);
    if (characterize_cmd->parsed()) return cmd_characterize(opt, out, err);
    if (report->parsed()) return cmd_report(opt, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotConverged;
  }
  return kExitInputError;
}

}  // namespace coaxsim
