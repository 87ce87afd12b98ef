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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coaxsim/device_model.hpp"
#include "coaxsim/dispersive.hpp"
#include "coaxsim/dynamics.hpp"
#include "coaxsim/fitting.hpp"

namespace coaxsim {

enum class ExperimentKind {
  kResonatorSweep,
  kQubitSpectroscopy,
  kRabi,
  kT1,
  kRamsey,
  kEcho
};

std::string_view to_string(ExperimentKind kind);
/// Throws std::invalid_argument for unknown names.
ExperimentKind parse_experiment_kind(std::string_view name);

/// dBm-to-amplitude calibration. Absolute line attenuation is unknown, so
/// these are free constants; the defaults give a 47 MHz Rabi frequency at
/// -20 dBm and a spectroscopy drive strong enough at -5 dBm to reveal the
/// two- and three-photon lines.
struct Calibration {
  double rabi_hz_at_0dbm = 470e6;
  double spec_rabi_hz_at_0dbm = 35.5656e6;
  double readout_ref_dbm = -35.0;
  double readout_ref_nbar = 1.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kT1;
  std::vector<double> sweep_axis;  // s or Hz depending on kind
  double drive_power_dbm = -20.0;
  double readout_power_dbm = -45.0;
  double readout_len = 16e-6;
  double readout_sample_interval = 20e-9;
  double qubit_pulse_len = 8e-6;   // spectroscopy saturation pulse
  double detuning = 0.0;           // Ramsey drive detuning, Hz
  int averages = 1;
  double noise_sigma = 0.0;        // per-sample IQ noise before averaging
  std::uint64_t seed = 0;
  bool pi_pulse = false;           // resonator sweep after a pi pulse
  cplx interference_offset{};
  Calibration calibration;
};

/// Throws std::invalid_argument on empty/unsorted axes, averages < 1 or
/// negative noise.
void validate(const ExperimentConfig& cfg);

/// Dense default sweeps for each kind, noiseless.
ExperimentConfig default_experiment(ExperimentKind kind, const DeviceParams& params);

/// Rabi frequency Omega_R / 2pi (Hz) for a drive power.
double rabi_frequency(double drive_power_dbm, double hz_at_0dbm);

/// Driven-decay envelope time 1 / (3/(4 T1) + 1/(2 T_phi)).
double rabi_decay_time(const DeviceParams& params);

/// Ideal excited-state population for the time-domain kinds at sweep value x.
double ideal_population(const DeviceParams& params, const ExperimentConfig& cfg,
                        double x);

/// Saturation-broadened spectroscopy lines at f_01 (one photon), f_02/2
/// (two photons) and f_03/3 (three photons), positions from the exact
/// transmon spectrum. Multi-photon effective drives scale as Omega^2 and
/// Omega^3 (heights are qualitative).
std::vector<double> qubit_spectroscopy_model(const DeviceParams& params,
                                             double drive_power_dbm,
                                             std::span<const double> f_axis,
                                             const Calibration& cal = {});

struct Dataset {
  ExperimentKind kind = ExperimentKind::kT1;
  std::vector<double> axis;
  std::vector<double> p1;            // time-domain and spectroscopy kinds
  std::vector<cplx> iq;              // resonator sweep
  IQTrace cal0;
  IQTrace cal1;
  std::vector<IQTrace> traces;       // only when requested
};

/// Noise sigma (per IQ sample, before averaging) such that the matched-filter
/// population estimate has standard deviation 1/snr.
double noise_sigma_for_snr(double snr, const IQTrace& cal0, const IQTrace& cal1,
                           int averages);

/// Readout pulse for an experiment config.
ReadoutPulse readout_pulse(const DeviceParams& params, const ExperimentConfig& cfg);

/// Builds the dataset: for each sweep point the ideal population is mapped
/// onto a Cavity-Bloch readout trace, complex white noise of scale
/// noise_sigma / sqrt(averages) is added, and the population is re-extracted
/// with the matched filter. The resonator sweep is the steady-state complex
/// response plus noise. Deterministic in cfg.seed.
Dataset synthesize(const DeviceParams& params, const ExperimentConfig& cfg,
                   bool keep_traces = false);

// ---- fits -----------------------------------------------------------------

/// Complex single-pole fit: values f0, q_factor, amp_re, amp_im, baseline_re,
/// baseline_im.
FitResult fit_lorentzian_complex(const ResonatorResponse& resp);

/// Weighted two-pole fit with shared kappa: f_r0, f_r1, weight, kappa,
/// amp_re, amp_im, baseline_re, baseline_im and the derived two_chi =
/// f_r1 - f_r0. Without a hint the higher-frequency pole is taken as f_r0.
/// Falls back to the single-pole fit (note "fallback_single_lorentzian")
/// when two poles cannot be resolved.
FitResult fit_double_lorentzian(const ResonatorResponse& resp,
                                std::optional<double> ground_hint = std::nullopt);

/// Real Lorentzian peak A / (1 + ((f - f0)/(fwhm/2))^2) + offset.
FitResult fit_lorentzian_peak(std::span<const double> f, std::span<const double> y);

/// Local maxima above `min_height` (relative to the data minimum), strongest
/// first, separated by at least `min_separation`.
std::vector<double> find_peaks(std::span<const double> x, std::span<const double> y,
                               double min_height, double min_separation);

/// A exp(-t/T): values amplitude, decay_time.
FitResult fit_decay(std::span<const double> t, std::span<const double> y);

/// A cos(2 pi f t + phi) exp(-t/T) + offset: values amplitude, frequency,
/// phase, decay_time, offset. phi is pinned to 0 unless with_phase.
FitResult fit_damped_cosine(std::span<const double> t, std::span<const double> y,
                            bool with_phase);

struct SpectroscopyLines {
  double f_01 = 0.0;
  double f_02_over_2 = 0.0;
  double f_03_over_3 = 0.0;  // 0 when not resolved
};

/// Locates the lines in a low-power (f_01 only) and a high-power sweep.
SpectroscopyLines fit_spectroscopy(const Dataset& low_power, const Dataset& high_power);

/// Synthesizes an echo decay and fits the contrast 2 p1 - 1 with fit_decay.
FitResult run_echo(const DeviceParams& params, const ExperimentConfig& cfg);

/// Fit matching the dataset kind (time-domain and resonator kinds).
FitResult fit_dataset(const Dataset& data, bool double_lorentzian = false);

}  // namespace coaxsim
