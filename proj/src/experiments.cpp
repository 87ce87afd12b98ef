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

#include "coaxsim/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "coaxsim/constants.hpp"
#include "coaxsim/transmon.hpp"

namespace coaxsim {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {
    "resonator_sweep", "qubit_spectroscopy", "rabi", "t1", "ramsey", "echo"};

// Flat background 30 dB below the resonance peak.
const cplx kSweepBackground = std::polar(std::pow(10.0, -30.0 / 20.0), 0.3);

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return v;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ExperimentKind>(i);
  }
  throw std::invalid_argument("unsupported experiment kind '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.sweep_axis.empty()) throw std::invalid_argument("sweep_axis is empty");
  if (!std::is_sorted(cfg.sweep_axis.begin(), cfg.sweep_axis.end())) {
    throw std::invalid_argument("sweep_axis must be sorted");
  }
  if (cfg.averages < 1) throw std::invalid_argument("averages must be >= 1");
  if (!(cfg.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
  if (!(cfg.readout_len > 0.0)) throw std::invalid_argument("readout_len must be positive");
  if (!(cfg.readout_sample_interval > 0.0)) {
    throw std::invalid_argument("readout_sample_interval must be positive");
  }
  if (cfg.kind != ExperimentKind::kResonatorSweep &&
      cfg.kind != ExperimentKind::kQubitSpectroscopy && cfg.sweep_axis.front() < 0.0) {
    throw std::invalid_argument("time sweeps must start at t >= 0");
  }
}

ExperimentConfig default_experiment(ExperimentKind kind, const DeviceParams& params) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::kResonatorSweep:
      cfg.sweep_axis = linspace(params.f_r0 - 30e6, params.f_r0 + 30e6, 2401);
      cfg.readout_len = 1e-6;
      cfg.readout_power_dbm = -50.0;
      break;
    case ExperimentKind::kQubitSpectroscopy:
      cfg.sweep_axis = linspace(params.f_01 - 400e6, params.f_01 + 100e6, 50001);
      cfg.drive_power_dbm = -5.0;
      cfg.readout_len = 8e-6;
      cfg.readout_power_dbm = -35.0;
      cfg.qubit_pulse_len = 8e-6;
      break;
    case ExperimentKind::kRabi:
      cfg.sweep_axis = linspace(0.0, 2e-6, 1001);
      cfg.drive_power_dbm = -20.0;
      break;
    case ExperimentKind::kT1:
      cfg.sweep_axis = linspace(0.0, 20e-6, 4001);
      break;
    case ExperimentKind::kRamsey:
      cfg.sweep_axis = linspace(0.0, 15e-6, 10001);
      cfg.detuning = 4.5e6;
      break;
    case ExperimentKind::kEcho:
      cfg.sweep_axis = linspace(0.0, 20e-6, 4001);
      break;
  }
  return cfg;
}

double rabi_frequency(double drive_power_dbm, double hz_at_0dbm) {
  return hz_at_0dbm * dbm_amplitude_ratio(drive_power_dbm, 0.0);
}

double rabi_decay_time(const DeviceParams& params) {
  const double gamma1 = 1.0 / params.t1;
  const double gamma_phi = std::max(0.0, 1.0 / params.t2 - 0.5 * gamma1);
  return 1.0 / (0.75 * gamma1 + 0.5 * gamma_phi);
}

double ideal_population(const DeviceParams& params, const ExperimentConfig& cfg, double x) {
  switch (cfg.kind) {
    case ExperimentKind::kRabi: {
      const double omega = kTwoPi * rabi_frequency(cfg.drive_power_dbm,
                                                   cfg.calibration.rabi_hz_at_0dbm);
      return 0.5 * (1.0 - std::cos(omega * x) * std::exp(-x / rabi_decay_time(params)));
    }
    case ExperimentKind::kT1:
      return std::exp(-x / params.t1);
    case ExperimentKind::kRamsey:
      return 0.5 * (1.0 + std::cos(kTwoPi * cfg.detuning * x) * std::exp(-x / params.t2));
    case ExperimentKind::kEcho:
      return 0.5 * (1.0 + std::exp(-x / params.t2e));
    default:
      throw std::invalid_argument("ideal_population: not a time-domain kind");
  }
}

std::vector<double> qubit_spectroscopy_model(const DeviceParams& params,
                                             double drive_power_dbm,
                                             std::span<const double> f_axis,
                                             const Calibration& cal) {
  const auto lines = transition_frequencies(diagonalize_transmon(params.e_j, params.e_c));
  const double alpha = kTwoPi * std::abs(lines.f_12 - lines.f_01);
  const double omega = kTwoPi * rabi_frequency(drive_power_dbm, cal.spec_rabi_hz_at_0dbm);
  const std::array<double, 3> centers = {lines.f_01, lines.f_02_over_2, lines.f_03_over_3};
  const std::array<double, 3> drives = {omega, omega * omega / (std::sqrt(2.0) * alpha),
                                        omega * omega * omega / (alpha * alpha)};
  const double t1t2 = params.t1 * params.t2;

  std::vector<double> p(f_axis.size());
  for (std::size_t k = 0; k < f_axis.size(); ++k) {
    double acc = 0.0;
    for (int n = 0; n < 3; ++n) {
      const double sat = drives[n] * drives[n] * t1t2;
      const double x = kTwoPi * (n + 1) * (f_axis[k] - centers[n]) * params.t2;
      acc += 0.5 * sat / (1.0 + x * x + sat);
    }
    p[k] = std::min(1.0, acc);
  }
  return p;
}

double noise_sigma_for_snr(double snr, const IQTrace& cal0, const IQTrace& cal1,
                           int averages) {
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
  if (cal0.s.size() != cal1.s.size()) throw std::invalid_argument("calibration size mismatch");
  double den = 0.0;
  for (std::size_t k = 0; k < cal0.s.size(); ++k) den += std::norm(cal1.s[k] - cal0.s[k]);
  return std::sqrt(den) / snr * std::sqrt(static_cast<double>(averages));
}

ReadoutPulse readout_pulse(const DeviceParams& params, const ExperimentConfig& cfg) {
  ReadoutPulse pulse;
  pulse.length = cfg.readout_len;
  pulse.power_dbm = cfg.readout_power_dbm;
  pulse.frequency = params.f_r0;
  pulse.sample_interval = cfg.readout_sample_interval;
  pulse.ref_power_dbm = cfg.calibration.readout_ref_dbm;
  pulse.ref_nbar = cfg.calibration.readout_ref_nbar;
  return pulse;
}

Dataset synthesize(const DeviceParams& params, const ExperimentConfig& cfg,
                   bool keep_traces) {
  validate(cfg);
  Dataset data;
  data.kind = cfg.kind;
  data.axis = cfg.sweep_axis;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = cfg.noise_sigma / std::sqrt(static_cast<double>(cfg.averages));
  auto noise = [&]() {
    if (sigma == 0.0) return cplx{};
    const double re = normal(rng);
    return sigma * cplx(re, normal(rng));
  };

  if (cfg.kind == ExperimentKind::kResonatorSweep) {
    // After a pi pulse the qubit decays during the readout window; the
    // response carries the time-averaged excited weight.
    double weight = 0.0;
    if (cfg.pi_pulse) {
      const double r = cfg.readout_len / params.t1;
      weight = (1.0 - std::exp(-r)) / r;
    }
    const auto resp = mixed_state_response(params, weight, data.axis, 1.0,
                                           ResponseMode::kTransmission, kSweepBackground);
    data.iq.reserve(resp.s.size());
    for (const cplx& s : resp.s) data.iq.push_back(s + noise());
    return data;
  }

  std::vector<double> ideal;
  if (cfg.kind == ExperimentKind::kQubitSpectroscopy) {
    ideal = qubit_spectroscopy_model(params, cfg.drive_power_dbm, data.axis, cfg.calibration);
  } else {
    ideal.reserve(data.axis.size());
    for (double x : data.axis) ideal.push_back(ideal_population(params, cfg, x));
  }

  const ReadoutPulse pulse = readout_pulse(params, cfg);
  data.cal0 = measurement_trace(params, 0.0, pulse, cfg.interference_offset);
  data.cal1 = measurement_trace(params, 1.0, pulse, cfg.interference_offset);

  // The Cavity-Bloch system is linear in the initial <sz>, so a partially
  // excited qubit reads out as the population-weighted mix of the two
  // calibration traces.
  data.p1.reserve(ideal.size());
  if (!keep_traces) {
    // The matched filter is linear: per-sample noise of std sigma maps to
    // Gaussian noise of std sigma / |cal1 - cal0| on the estimate.
    double den = 0.0;
    for (std::size_t k = 0; k < data.cal0.s.size(); ++k) {
      den += std::norm(data.cal1.s[k] - data.cal0.s[k]);
    }
    if (!(den > 0.0)) throw std::invalid_argument("degenerate calibration: cal1 and cal0 coincide");
    const double sigma_p1 = sigma / std::sqrt(den);
    for (double p : ideal) data.p1.push_back(sigma_p1 > 0.0 ? p + sigma_p1 * normal(rng) : p);
    return data;
  }
  IQTrace trace;
  trace.t_axis = data.cal0.t_axis;
  trace.s.resize(trace.t_axis.size());
  for (double p : ideal) {
    for (std::size_t k = 0; k < trace.s.size(); ++k) {
      trace.s[k] = (1.0 - p) * data.cal0.s[k] + p * data.cal1.s[k] + noise();
    }
    data.p1.push_back(extract_population(trace, data.cal0, data.cal1).raw);
    data.traces.push_back(trace);
  }
  return data;
}

// ---- fits -----------------------------------------------------------------

namespace {

std::vector<double> moving_average(std::span<const double> y, std::size_t half) {
  std::vector<double> out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const std::size_t a = k >= half ? k - half : 0;
    const std::size_t b = std::min(y.size() - 1, k + half);
    double acc = 0.0;
    for (std::size_t j = a; j <= b; ++j) acc += y[j];
    out[k] = acc / static_cast<double>(b - a + 1);
  }
  return out;
}

struct PeakShape {
  std::size_t index = 0;
  double height = 0.0;
  double width = 0.0;  // full width at `level` of the peak height
};

// Walks out from the maximum until the curve drops below level * peak. Works
// on a copy smoothed over ~1% of the axis so isolated noise dips do not stop
// the walk.
PeakShape measure_peak(std::span<const double> x, std::span<const double> raw,
                       double level) {
  const std::vector<double> mag = moving_average(raw, raw.size() / 200);
  PeakShape shape;
  shape.index = static_cast<std::size_t>(
      std::max_element(mag.begin(), mag.end()) - mag.begin());
  shape.height = mag[shape.index];
  const double cut = level * mag[shape.index];
  auto crossing = [&](std::size_t a, std::size_t b) {
    const double t = (mag[a] - cut) / (mag[a] - mag[b]);
    return x[a] + t * (x[b] - x[a]);
  };
  double left = x.front(), right = x.back();
  for (std::size_t i = shape.index; i > 0; --i) {
    if (mag[i - 1] < cut) {
      left = crossing(i, i - 1);
      break;
    }
  }
  for (std::size_t i = shape.index; i + 1 < mag.size(); ++i) {
    if (mag[i + 1] < cut) {
      right = crossing(i, i + 1);
      break;
    }
  }
  shape.width = right - left;
  return shape;
}

cplx edge_mean(std::span<const cplx> s) {
  const std::size_t m = std::max<std::size_t>(1, s.size() / 20);
  cplx acc{};
  for (std::size_t k = 0; k < m; ++k) acc += s[k] + s[s.size() - 1 - k];
  return acc / (2.0 * static_cast<double>(m));
}

void finish(FitResult& fit, const LmResult& lm) {
  fit.residual_norm = std::sqrt(lm.ssr);
  fit.n_iter = lm.n_iter;
  fit.converged = lm.converged && std::isfinite(fit.residual_norm) && all_finite(fit.sigmas) &&
                  all_finite(fit.values);
}

FitResult single_pole_fit(const ResonatorResponse& resp) {
  const std::size_t n = resp.f_axis.size();
  if (n < 8 || resp.s.size() != n) {
    throw std::invalid_argument("resonator fit needs >= 8 points with matching axes");
  }
  const cplx b0 = edge_mean(resp.s);
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(resp.s[k] - b0);
  const double span = resp.f_axis.back() - resp.f_axis.front();

  FitResult fit;
  const PeakShape peak = measure_peak(resp.f_axis, mag, std::sqrt(0.5));
  const double scale = peak.height;
  if (!(scale > 1e-9 * std::max(std::abs(b0), 1e-300))) {
    fit.note = "degenerate_zero_amplitude";
    return fit;
  }
  const double kappa0 = peak.width > 0.0 ? peak.width : span / 10.0;
  if (span < 3.0 * kappa0) {
    throw std::invalid_argument("resonator sweep must span at least 3 linewidths");
  }
  const double fc = resp.f_axis[peak.index];
  const cplx amp0 = (resp.s[peak.index] - b0) / scale;

  auto model = [&](const Eigen::VectorXd& p, double f) {
    const double f0 = fc + p(0) * kappa0;
    const double kappa = kappa0 * std::exp(p(1));
    return scale * (cplx(p(2), p(3)) * lorentzian(f, f0, kappa) + cplx(p(4), p(5)));
  };
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx d = (model(p, resp.f_axis[k]) - resp.s[k]) / scale;
      r(2 * k) = d.real();
      r(2 * k + 1) = d.imag();
    }
    return r;
  };
  Eigen::VectorXd p0(6);
  p0 << 0.0, 0.0, amp0.real(), amp0.imag(), b0.real() / scale, b0.imag() / scale;
  const LmResult lm = levenberg_marquardt(residuals, p0);

  const double f0 = fc + lm.p(0) * kappa0;
  const double kappa = kappa0 * std::exp(lm.p(1));
  fit.add("f0", f0, kappa0 * lm.sigma(0));
  fit.add("q_factor", f0 / kappa, f0 / kappa * lm.sigma(1));
  fit.add("amp_re", scale * lm.p(2), scale * lm.sigma(2));
  fit.add("amp_im", scale * lm.p(3), scale * lm.sigma(3));
  fit.add("baseline_re", scale * lm.p(4), scale * lm.sigma(4));
  fit.add("baseline_im", scale * lm.p(5), scale * lm.sigma(5));
  finish(fit, lm);
  if (std::hypot(lm.p(2), lm.p(3)) < 1e-6) {
    fit.converged = false;
    fit.note = "degenerate_zero_amplitude";
  }
  return fit;
}

}  // namespace

FitResult fit_lorentzian_complex(const ResonatorResponse& resp) {
  return single_pole_fit(resp);
}

std::vector<double> find_peaks(std::span<const double> x, std::span<const double> y,
                               double min_height, double min_separation) {
  if (x.size() != y.size()) throw std::invalid_argument("find_peaks: size mismatch");
  if (y.size() < 3) return {};
  const double floor = *std::min_element(y.begin(), y.end());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] >= y[i - 1] && y[i] > y[i + 1] && y[i] - floor >= min_height) {
      candidates.push_back(i);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
  std::vector<double> peaks;
  for (std::size_t i : candidates) {
    const bool clear = std::all_of(peaks.begin(), peaks.end(), [&](double p) {
      return std::abs(p - x[i]) >= min_separation;
    });
    if (clear) peaks.push_back(x[i]);
  }
  return peaks;
}

FitResult fit_double_lorentzian(const ResonatorResponse& resp, std::optional<double> ground_hint) {
  const std::size_t n = resp.f_axis.size();
  if (n < 8 || resp.s.size() != n) {
    throw std::invalid_argument("resonator fit needs >= 8 points with matching axes");
  }
  auto fallback = [&]() {
    FitResult fit = single_pole_fit(resp);
    if (fit.note.empty()) fit.note = "fallback_single_lorentzian";
    return fit;
  };

  const cplx b0 = edge_mean(resp.s);
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(resp.s[k] - b0);
  const PeakShape main = measure_peak(resp.f_axis, mag, std::sqrt(0.5));
  const double scale = main.height;
  if (!(scale > 0.0)) return fallback();
  const double span = resp.f_axis.back() - resp.f_axis.front();
  const double kappa0 = main.width > 0.0 ? main.width : span / 10.0;
  const double f_main = resp.f_axis[main.index];

  const double f_step = span / static_cast<double>(n - 1);
  const auto smooth = moving_average(mag, static_cast<std::size_t>(0.1 * kappa0 / f_step));
  const auto peaks = find_peaks(resp.f_axis, smooth, 0.1 * scale, 0.5 * kappa0);
  double f_ground = 0.0, f_excited = 0.0;
  if (ground_hint) {
    f_ground = *ground_hint;
    auto other = std::find_if(peaks.begin(), peaks.end(), [&](double f) {
      return std::abs(f - f_ground) > 0.5 * kappa0;
    });
    if (other == peaks.end()) return fallback();
    f_excited = *other;
  } else {
    if (peaks.size() < 2) return fallback();
    f_ground = std::max(peaks[0], peaks[1]);
    f_excited = std::min(peaks[0], peaks[1]);
  }

  auto height_at = [&](double f) {
    const auto it = std::lower_bound(resp.f_axis.begin(), resp.f_axis.end(), f);
    const std::size_t k = std::min<std::size_t>(it - resp.f_axis.begin(), n - 1);
    return mag[k];
  };
  const double h0 = height_at(f_ground), h1 = height_at(f_excited);
  const double w0 = h1 / (h0 + h1);
  const cplx amp0 = (resp.s[main.index] - b0) / scale / std::max(w0, 1.0 - w0);

  auto model = [&](const Eigen::VectorXd& p, double f) {
    const double fa = f_main + p(0) * kappa0;
    const double fb = f_main + p(1) * kappa0;
    const double w = 1.0 / (1.0 + std::exp(-p(2)));
    const double kappa = kappa0 * std::exp(p(3));
    const cplx l = (1.0 - w) * lorentzian(f, fa, kappa) + w * lorentzian(f, fb, kappa);
    return scale * (cplx(p(4), p(5)) * l + cplx(p(6), p(7)));
  };
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx d = (model(p, resp.f_axis[k]) - resp.s[k]) / scale;
      r(2 * k) = d.real();
      r(2 * k + 1) = d.imag();
    }
    return r;
  };
  Eigen::VectorXd p0(8);
  const double w_init = std::clamp(w0, 0.02, 0.98);
  p0 << (f_ground - f_main) / kappa0, (f_excited - f_main) / kappa0,
      std::log(w_init / (1.0 - w_init)), 0.0, amp0.real(),
      amp0.imag(), b0.real() / scale, b0.imag() / scale;
  // Settle the strong pole with the weak one pinned, then release it.
  auto pinned = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd full(8);
    full << p0(0), q;
    return residuals(full);
  };
  const LmResult stage1 = levenberg_marquardt(pinned, p0.tail(7));
  p0.tail(7) = stage1.p;
  const LmResult lm = levenberg_marquardt(residuals, p0);

  FitResult fit;
  const double fa = f_main + lm.p(0) * kappa0;
  const double fb = f_main + lm.p(1) * kappa0;
  const double kappa = kappa0 * std::exp(lm.p(3));
  fit.add("f_r0", fa, kappa0 * lm.sigma(0));
  fit.add("f_r1", fb, kappa0 * lm.sigma(1));
  const double weight = 1.0 / (1.0 + std::exp(-lm.p(2)));
  fit.add("weight", weight, weight * (1.0 - weight) * lm.sigma(2));
  fit.add("kappa", kappa, kappa * lm.sigma(3));
  fit.add("amp_re", scale * lm.p(4), scale * lm.sigma(4));
  fit.add("amp_im", scale * lm.p(5), scale * lm.sigma(5));
  fit.add("baseline_re", scale * lm.p(6), scale * lm.sigma(6));
  fit.add("baseline_im", scale * lm.p(7), scale * lm.sigma(7));
  fit.add("two_chi", fb - fa, kappa0 * std::hypot(lm.sigma(0), lm.sigma(1)));
  finish(fit, lm);
  if (std::abs(fb - fa) < 0.5 * kappa) {
    fit.note = "poles_unresolved";
    fit.converged = false;
  }
  return fit;
}

namespace {

// Lorentzian peak fit from explicit initial center, width, height and offset.
FitResult peak_fit_from(std::span<const double> f, std::span<const double> y, double fc,
                        double w0, double a0, double c0) {
  const std::size_t n = f.size();
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    const double f0 = fc + p(0) * w0;
    const double half = 0.5 * w0 * std::exp(p(1));
    for (std::size_t k = 0; k < n; ++k) {
      const double u = (f[k] - f0) / half;
      r(k) = (a0 * p(2) / (1.0 + u * u) + a0 * p(3) - y[k]) / a0;
    }
    return r;
  };
  Eigen::VectorXd p0(4);
  p0 << 0.0, 0.0, 1.0, c0 / a0;
  const LmResult lm = levenberg_marquardt(residuals, p0);
  FitResult fit;
  const double width = w0 * std::exp(lm.p(1));
  fit.add("f0", fc + lm.p(0) * w0, w0 * lm.sigma(0));
  fit.add("fwhm", width, width * lm.sigma(1));
  fit.add("amplitude", a0 * lm.p(2), a0 * lm.sigma(2));
  fit.add("offset", a0 * lm.p(3), a0 * lm.sigma(3));
  finish(fit, lm);
  return fit;
}

// Full width at half height of the peak containing index k.
double local_width(std::span<const double> f, std::span<const double> y, std::size_t k,
                   double floor) {
  const double cut = floor + 0.5 * (y[k] - floor);
  std::size_t a = k, b = k;
  while (a > 0 && y[a] > cut) --a;
  while (b + 1 < y.size() && y[b] > cut) ++b;
  return std::max(f[b] - f[a], f[1] - f[0]);
}

}  // namespace

FitResult fit_lorentzian_peak(std::span<const double> f, std::span<const double> y) {
  const std::size_t n = f.size();
  if (n < 5 || y.size() != n) throw std::invalid_argument("peak fit needs >= 5 points");
  const double c0 = *std::min_element(y.begin(), y.end());
  std::vector<double> lifted(n);
  for (std::size_t k = 0; k < n; ++k) lifted[k] = y[k] - c0;
  const PeakShape peak = measure_peak(f, lifted, 0.5);
  const double a0 = peak.height;
  if (!(a0 > 0.0)) {
    FitResult fit;
    fit.note = "no_peak";
    return fit;
  }
  const double w0 = peak.width > 0.0 ? peak.width : (f.back() - f.front()) / 10.0;
  return peak_fit_from(f, y, f[peak.index], w0, a0, c0);
}

FitResult fit_decay(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n < 8 || y.size() != n) throw std::invalid_argument("fit_decay needs >= 8 points");
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw std::invalid_argument("fit_decay needs an increasing time axis");

  // Log-linear regression on the positive samples.
  double sw = 0.0, st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(y[k] > 0.0)) continue;
    const double l = std::log(y[k]);
    sw += 1.0;
    st += t[k];
    sl += l;
    stt += t[k] * t[k];
    stl += t[k] * l;
  }
  if (sw == 0.0) throw std::invalid_argument("fit_decay: no positive samples");
  double rate0 = 1.0 / span, amp0 = *std::max_element(y.begin(), y.end());
  const double denom = sw * stt - st * st;
  if (sw >= 2.0 && denom > 0.0) {
    const double slope = (sw * stl - st * sl) / denom;
    const double intercept = (sl - slope * st) / sw;
    if (slope < 0.0) rate0 = -slope;
    amp0 = std::exp(intercept);
  }

  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    const double rate = p(1) / span;
    for (std::size_t k = 0; k < n; ++k) r(k) = amp0 * p(0) * std::exp(-rate * t[k]) - y[k];
    return r;
  };
  Eigen::VectorXd p0(2);
  p0 << 1.0, rate0 * span;
  const LmResult lm = levenberg_marquardt(residuals, p0);

  FitResult fit;
  const double rate = lm.p(1) / span;
  const double sigma_rate = lm.sigma(1) / span;
  fit.add("amplitude", amp0 * lm.p(0), std::abs(amp0) * lm.sigma(0));
  if (rate > 0.0) {
    fit.add("decay_time", 1.0 / rate, sigma_rate / (rate * rate));
  } else {
    fit.add("decay_time", kInf, kInf);
  }
  finish(fit, lm);
  if (!(rate * span > 0.01)) {
    fit.converged = false;
    fit.note = "decay_unbounded";
  } else if (span < 1.5 / rate) {
    fit.note = "span_short";
  }
  return fit;
}

FitResult fit_damped_cosine(std::span<const double> t, std::span<const double> y,
                            bool with_phase) {
  const std::size_t n = t.size();
  if (n < 8 || y.size() != n) throw std::invalid_argument("fit_damped_cosine needs >= 8 points");
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw std::invalid_argument("fit_damped_cosine needs an increasing axis");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double dt = span / static_cast<double>(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs(t[k] - t[k - 1] - dt) > 1e-6 * dt) {
      throw std::invalid_argument("fit_damped_cosine needs a uniform axis");
    }
  }

  // Zero-padded spectrum up to Nyquist.
  const std::size_t padded = 4 * n;
  std::vector<double> centered(padded, 0.0);
  for (std::size_t k = 0; k < n; ++k) centered[k] = y[k] - mean;
  std::vector<cplx> full;
  Eigen::FFT<double> fft;
  fft.fwd(full, centered);
  const std::size_t nf = padded / 2;
  const double df = 1.0 / (static_cast<double>(padded) * dt);
  std::vector<cplx> spectrum(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(nf + 1));
  std::vector<double> power(nf + 1);
  for (std::size_t j = 0; j <= nf; ++j) power[j] = std::abs(spectrum[j]);
  const std::size_t jmax =
      static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
  double f_peak = jmax * df;
  if (jmax > 0 && jmax < nf) {
    const double a = power[jmax - 1], b = power[jmax], c = power[jmax + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) f_peak += 0.5 * (a - c) / denom * df;
  }
  if (!with_phase && f_peak < 1.0 / span) {
    throw std::invalid_argument("fit_damped_cosine: Fourier peak at DC, no oscillation");
  }

  double amp0 = 2.0 * power[jmax] / static_cast<double>(n);
  double phase0 = 0.0;
  if (with_phase) {
    phase0 = std::arg(spectrum[jmax]);
  } else {
    amp0 = y[0] - mean;
  }
  const double scale = std::max(std::abs(amp0), 1e-12);
  const double t0 = t.front();
  // Parameters: amplitude, frequency offset, [phase], rate, offset.
  const Eigen::Index np = with_phase ? 5 : 4;
  auto expand = [&](const Eigen::VectorXd& q, double fill) {
    if (with_phase) return q;
    Eigen::VectorXd full(5);
    full << q(0), q(1), fill, q(2), q(3);
    return full;
  };
  auto residuals = [&](const Eigen::VectorXd& q) {
    const Eigen::VectorXd p = expand(q, 0.0);
    Eigen::VectorXd r(n);
    const double f = f_peak + p(1) / span;
    const double rate = p(3) / span;
    for (std::size_t k = 0; k < n; ++k) {
      const double tk = t[k] - t0;
      r(k) = (scale * (p(0) * std::cos(kTwoPi * f * tk + p(2)) * std::exp(-rate * tk) + p(4)) -
              y[k]) / scale;
    }
    return r;
  };
  Eigen::VectorXd p0(np);
  if (with_phase) {
    p0 << amp0 / scale, 0.0, phase0, 1.0, mean / scale;
  } else {
    p0 << amp0 / scale, 0.0, 1.0, mean / scale;
  }
  LmResult lm = levenberg_marquardt(residuals, p0);
  lm.p = expand(lm.p, 0.0);
  lm.sigma = expand(lm.sigma, 0.0);

  double amp = scale * lm.p(0);
  double phase = with_phase ? lm.p(2) : 0.0;
  if (with_phase) {
    if (amp < 0.0) {
      amp = -amp;
      phase += std::numbers::pi;
    }
    phase = std::remainder(phase, kTwoPi);
  }
  const double rate = lm.p(3) / span;
  FitResult fit;
  fit.add("amplitude", amp, scale * lm.sigma(0));
  fit.add("frequency", f_peak + lm.p(1) / span, lm.sigma(1) / span);
  fit.add("phase", phase, with_phase ? lm.sigma(2) : 0.0);
  if (rate > 0.0) {
    fit.add("decay_time", 1.0 / rate, lm.sigma(3) / span / (rate * rate));
  } else {
    fit.add("decay_time", kInf, kInf);
  }
  fit.add("offset", scale * lm.p(4), scale * lm.sigma(4));
  finish(fit, lm);
  const double f_fit = fit.value("frequency");
  if (!(rate * span > 0.01)) {
    fit.converged = false;
    fit.note = "decay_unbounded";
  } else if (f_fit * dt > 0.25 || f_fit * span < 2.0) {
    fit.note = "undersampled_or_short";
  }
  return fit;
}

namespace {

// Lorentzian fit on the samples within `half_window` of `center`.
FitResult local_peak_fit(std::span<const double> f, std::span<const double> y, double center,
                         double half_window) {
  const auto lo = std::lower_bound(f.begin(), f.end(), center - half_window) - f.begin();
  const auto hi = std::upper_bound(f.begin(), f.end(), center + half_window) - f.begin();
  return fit_lorentzian_peak(f.subspan(lo, hi - lo), y.subspan(lo, hi - lo));
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

SpectroscopyLines fit_spectroscopy(const Dataset& low, const Dataset& high) {
  if (low.axis.size() < 16 || high.axis.size() < 16 || low.p1.size() != low.axis.size() ||
      high.p1.size() != high.axis.size()) {
    throw std::invalid_argument("spectroscopy datasets need >= 16 population samples");
  }
  const std::span<const double> fl(low.axis), yl(low.p1);
  const std::span<const double> fh(high.axis), yh(high.p1);
  const double step = fl[1] - fl[0];
  SpectroscopyLines lines;

  // f_01: the dominant low-power line.
  const auto smooth_low = moving_average(yl, 2);
  const std::size_t kmax = static_cast<std::size_t>(
      std::max_element(smooth_low.begin(), smooth_low.end()) - smooth_low.begin());
  const PeakShape low_shape = measure_peak(fl, smooth_low, 0.5);
  const double low_window = std::max(3.0 * low_shape.width, 20.0 * step);
  const FitResult f01_fit = local_peak_fit(fl, yl, fl[kmax], low_window);
  if (!f01_fit.converged) throw std::runtime_error("f_01 line fit did not converge");
  lines.f_01 = f01_fit.value("f0");

  // High power: remove the power-broadened f_01 line, then look for narrow
  // multi-photon lines below it.
  const auto smooth_high = moving_average(yh, 2);
  const std::size_t k01 = static_cast<std::size_t>(
      std::lower_bound(fh.begin(), fh.end(), lines.f_01) - fh.begin());
  if (k01 >= fh.size()) throw std::runtime_error("f_01 lies outside the high-power sweep");
  const double floor_high = *std::min_element(smooth_high.begin(), smooth_high.end());
  const FitResult broad =
      peak_fit_from(fh, yh, lines.f_01, local_width(fh, smooth_high, k01, floor_high),
                    std::max(smooth_high[k01] - floor_high, 1e-6), floor_high);
  std::vector<double> resid(yh.size());
  for (std::size_t k = 0; k < yh.size(); ++k) {
    double model = broad.converged ? broad.value("offset") : 0.0;
    if (broad.converged) {
      const double u = (fh[k] - broad.value("f0")) / (0.5 * broad.value("fwhm"));
      model += broad.value("amplitude") / (1.0 + u * u);
    }
    resid[k] = yh[k] - model;
  }
  const auto smooth = moving_average(resid, 2);
  std::vector<double> dev(smooth.size());
  const double center = median(smooth);
  for (std::size_t k = 0; k < smooth.size(); ++k) dev[k] = std::abs(smooth[k] - center);
  const double noise = 1.4826 * median(dev);
  const double threshold = std::max(8.0 * noise, 0.02);
  const double high_step = fh[1] - fh[0];

  std::vector<double> candidates;
  for (double f : find_peaks(fh, smooth, threshold, 50.0 * high_step)) {
    if (f < lines.f_01 - 10.0 * low_shape.width - 20.0 * high_step) candidates.push_back(f);
  }
  if (candidates.empty()) throw std::runtime_error("no two-photon line found in high-power sweep");

  auto refine = [&](double guess) {
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(fh.begin(), fh.end(), guess) - fh.begin());
    const double half_window =
        std::max(3.0 * local_width(fh, smooth, k, center), 20.0 * high_step);
    const FitResult fit = local_peak_fit(fh, resid, guess, half_window);
    return fit.converged ? fit.value("f0") : guess;
  };
  // The strongest multi-photon line is the two-photon one.
  lines.f_02_over_2 = refine(candidates.front());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i] < lines.f_02_over_2) {
      lines.f_03_over_3 = refine(candidates[i]);
      break;
    }
  }
  return lines;
}

FitResult run_echo(const DeviceParams& params, const ExperimentConfig& cfg) {
  if (cfg.kind != ExperimentKind::kEcho) throw std::invalid_argument("run_echo needs an echo config");
  return fit_dataset(synthesize(params, cfg));
}

FitResult fit_dataset(const Dataset& data, bool double_lorentzian) {
  switch (data.kind) {
    case ExperimentKind::kResonatorSweep: {
      ResonatorResponse resp;
      resp.f_axis = data.axis;
      resp.s = data.iq;
      return double_lorentzian ? fit_double_lorentzian(resp) : fit_lorentzian_complex(resp);
    }
    case ExperimentKind::kQubitSpectroscopy:
      return fit_lorentzian_peak(data.axis, data.p1);
    case ExperimentKind::kRabi:
      return fit_damped_cosine(data.axis, data.p1, false);
    case ExperimentKind::kRamsey:
      return fit_damped_cosine(data.axis, data.p1, true);
    case ExperimentKind::kT1:
      return fit_decay(data.axis, data.p1);
    case ExperimentKind::kEcho: {
      std::vector<double> contrast(data.p1.size());
      for (std::size_t k = 0; k < contrast.size(); ++k) contrast[k] = 2.0 * data.p1[k] - 1.0;
      return fit_decay(data.axis, contrast);
    }
  }
  throw std::invalid_argument("unsupported experiment kind");
}

}  // namespace coaxsim
