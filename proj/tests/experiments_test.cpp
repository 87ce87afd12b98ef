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
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>
#include <unsupported/Eigen/FFT>

#include "coaxsim/constants.hpp"
#include "coaxsim/transmon.hpp"

namespace coaxsim {
namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ExperimentConfig with_snr(const DeviceParams& p, ExperimentConfig cfg, double snr,
                          std::uint64_t seed) {
  cfg.seed = seed;
  const ReadoutPulse pulse = readout_pulse(p, cfg);
  cfg.noise_sigma = noise_sigma_for_snr(snr, measurement_trace(p, 0.0, pulse, cfg.interference_offset),
                                        measurement_trace(p, 1.0, pulse, cfg.interference_offset),
                                        cfg.averages);
  return cfg;
}

double quantile(std::vector<double> v, double q) {
  const auto k = static_cast<std::size_t>(q * (v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

TEST(Kinds, NamesRoundTrip) {
  for (auto k : {ExperimentKind::kResonatorSweep, ExperimentKind::kQubitSpectroscopy,
                 ExperimentKind::kRabi, ExperimentKind::kT1, ExperimentKind::kRamsey,
                 ExperimentKind::kEcho}) {
    EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_experiment_kind("tomography"), std::invalid_argument);
}

TEST(Config, Validation) {
  const DeviceParams p = reference_device();
  ExperimentConfig cfg = default_experiment(ExperimentKind::kT1, p);
  EXPECT_NO_THROW(validate(cfg));
  cfg.averages = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = default_experiment(ExperimentKind::kT1, p);
  std::swap(cfg.sweep_axis[3], cfg.sweep_axis[4]);
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = default_experiment(ExperimentKind::kT1, p);
  cfg.noise_sigma = -1.0;
  EXPECT_THROW(synthesize(p, cfg), std::invalid_argument);
  cfg.sweep_axis.clear();
  cfg.noise_sigma = 0.0;
  EXPECT_THROW(synthesize(p, cfg), std::invalid_argument);
}

TEST(Calibration, RabiAtMinus20dBm) {
  const double f = rabi_frequency(-20.0, Calibration{}.rabi_hz_at_0dbm);
  EXPECT_NEAR(f, 47e6, 1.0);
  EXPECT_NEAR(1.0 / f, 21.3e-9, 0.05e-9);
}

TEST(Synthesize, T1StartsExcited) {
  const DeviceParams p = reference_device();
  const Dataset d = synthesize(p, default_experiment(ExperimentKind::kT1, p));
  EXPECT_NEAR(d.p1.front(), 1.0, 1e-9);
  EXPECT_NEAR(d.p1.back(), std::exp(-20e-6 / p.t1), 1e-9);
}

TEST(Synthesize, RabiPeriod) {
  const DeviceParams p = reference_device();
  const Dataset d = synthesize(p, default_experiment(ExperimentKind::kRabi, p));
  // First maximum of p1 sits half a period in.
  std::size_t k = 1;
  while (d.p1[k + 1] > d.p1[k] || d.p1[k] < 0.5) ++k;
  EXPECT_NEAR(2.0 * d.axis[k], 1.0 / 47e6, 2.0 * (d.axis[1] - d.axis[0]));
}

TEST(Synthesize, RamseyFourierPeak) {
  const DeviceParams p = reference_device();
  const Dataset d = synthesize(p, default_experiment(ExperimentKind::kRamsey, p));
  std::vector<double> y(d.p1);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  for (double& v : y) v -= mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, y);
  std::size_t best = 1;
  for (std::size_t k = 1; k < spec.size() / 2; ++k) {
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  }
  const double df = 1.0 / (d.axis.size() * (d.axis[1] - d.axis[0]));
  EXPECT_NEAR(best * df, 4.5e6, df);
}

TEST(Synthesize, DeterministicInSeed) {
  const DeviceParams p = reference_device();
  const ExperimentConfig cfg = with_snr(p, default_experiment(ExperimentKind::kEcho, p), 10.0, 42);
  const Dataset a = synthesize(p, cfg);
  const Dataset b = synthesize(p, cfg);
  EXPECT_EQ(a.p1, b.p1);
  ExperimentConfig other = cfg;
  other.seed = 43;
  EXPECT_NE(synthesize(p, other).p1, a.p1);
}

TEST(Synthesize, ResonatorPiPulseShowsExcitedPole) {
  const DeviceParams p = reference_device();
  ExperimentConfig cfg = default_experiment(ExperimentKind::kResonatorSweep, p);
  cfg.pi_pulse = true;
  const Dataset d = synthesize(p, cfg);
  std::size_t best = 0;
  for (std::size_t k = 0; k < d.iq.size(); ++k) {
    if (std::abs(d.iq[k]) > std::abs(d.iq[best])) best = k;
  }
  EXPECT_NEAR(d.axis[best], 10.217e9, 0.5e6);
}

// Fast noise path (noise mapped through the linear matched filter) against
// explicit per-sample noisy traces: same mean and spread of p1.
TEST(Synthesize, FastNoisePathMatchesExplicitTraces) {
  const DeviceParams p = reference_device();
  ExperimentConfig cfg = default_experiment(ExperimentKind::kT1, p);
  cfg.sweep_axis = std::vector<double>(400, 2e-6);
  cfg = with_snr(p, cfg, 10.0, 5);
  const Dataset fast = synthesize(p, cfg, false);
  const Dataset slow = synthesize(p, cfg, true);
  ASSERT_EQ(slow.traces.size(), cfg.sweep_axis.size());
  auto stats = [](const std::vector<double>& v) {
    double m = 0.0, s = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, std::sqrt(s / (v.size() - 1))};
  };
  const auto [mf, sf] = stats(fast.p1);
  const auto [ms, ss] = stats(slow.p1);
  const double truth = std::exp(-2e-6 / p.t1);
  // 400 draws: the mean is good to ~3 sigma/sqrt(400), the spread to ~15%.
  EXPECT_NEAR(mf, truth, 0.015);
  EXPECT_NEAR(ms, truth, 0.015);
  EXPECT_NEAR(sf, 0.1, 0.015);
  EXPECT_NEAR(ss, 0.1, 0.015);
}

TEST(SpectroscopyModel, LowPowerWidth) {
  const DeviceParams p = reference_device();
  const double f01 = diagonalize_transmon(p.e_j, p.e_c).energies[1];
  std::vector<double> f;
  for (double x = f01 - 2e6; x <= f01 + 2e6; x += 100.0) f.push_back(x);
  for (double dbm : {-60.0, -45.0, -30.0}) {
    const auto y = qubit_spectroscopy_model(p, dbm, f);
    const double peak = *std::max_element(y.begin(), y.end());
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (y[k] >= 0.5 * peak) {
        if (lo == 0.0) lo = f[k];
        hi = f[k];
      }
    }
    const double omega = kTwoPi * rabi_frequency(dbm, Calibration{}.spec_rabi_hz_at_0dbm);
    const double expect = std::sqrt(1.0 + omega * omega * p.t1 * p.t2) / (std::numbers::pi * p.t2);
    EXPECT_NEAR(hi - lo, expect, 300.0) << dbm;
  }
  // Unsaturated limit.
  const auto y = qubit_spectroscopy_model(p, -100.0, f);
  EXPECT_LT(*std::max_element(y.begin(), y.end()), 1e-3);
}

TEST(SpectroscopyModel, HighPowerThreeLines) {
  const DeviceParams p = reference_device();
  const ExperimentConfig cfg = default_experiment(ExperimentKind::kQubitSpectroscopy, p);
  const auto y = qubit_spectroscopy_model(p, cfg.drive_power_dbm, cfg.sweep_axis);
  const auto peaks = find_peaks(cfg.sweep_axis, y, 0.02, 50e6);
  ASSERT_GE(peaks.size(), 3u);
  std::vector<double> top(peaks.begin(), peaks.begin() + 3);
  std::sort(top.rbegin(), top.rend());
  EXPECT_LT(rel(top[0], 7.23e9), 0.01);
  EXPECT_LT(rel(top[1], 7.08e9), 0.01);
  EXPECT_LT(rel(top[2], 6.93e9), 0.01);
}

TEST(FitSpectroscopy, RecoversModelLines) {
  const DeviceParams p = reference_device();
  ExperimentConfig low = default_experiment(ExperimentKind::kQubitSpectroscopy, p);
  low.drive_power_dbm = -45.0;
  const ExperimentConfig high = default_experiment(ExperimentKind::kQubitSpectroscopy, p);
  const auto lines = fit_spectroscopy(synthesize(p, low), synthesize(p, high));
  const auto exact = transition_frequencies(diagonalize_transmon(p.e_j, p.e_c));
  EXPECT_NEAR(lines.f_01, exact.f_01, 20e3);
  EXPECT_NEAR(lines.f_02_over_2, exact.f_02_over_2, 50e3);
  EXPECT_NEAR(lines.f_03_over_3, exact.f_03_over_3, 200e3);
}

struct RoundTrip {
  ExperimentKind kind;
  const char* name;
  double truth;
};

TEST(RoundTrip, NoiselessWithinHalfPercent) {
  const DeviceParams p = reference_device();
  const RoundTrip cases[] = {
      {ExperimentKind::kT1, "decay_time", p.t1},
      {ExperimentKind::kRamsey, "decay_time", p.t2},
      {ExperimentKind::kRamsey, "frequency", 4.5e6},
      {ExperimentKind::kRabi, "frequency", 47e6},
      {ExperimentKind::kRabi, "decay_time", rabi_decay_time(p)},
      {ExperimentKind::kEcho, "decay_time", p.t2e},
      {ExperimentKind::kResonatorSweep, "q_factor", p.q_factor},
      {ExperimentKind::kResonatorSweep, "f0", p.f_r0},
  };
  for (const auto& c : cases) {
    const FitResult fit = fit_dataset(synthesize(p, default_experiment(c.kind, p)));
    ASSERT_TRUE(fit.converged) << to_string(c.kind) << " " << fit.note;
    EXPECT_LT(rel(fit.value(c.name), c.truth), 0.005) << to_string(c.kind) << " " << c.name;
  }
}

TEST(RoundTrip, EchoEqualToRamseyTime) {
  DeviceParams p = reference_device();
  p.t2e = p.t2;
  const FitResult fit = run_echo(p, default_experiment(ExperimentKind::kEcho, p));
  EXPECT_LT(rel(fit.value("decay_time"), p.t2), 0.005);
  EXPECT_THROW(run_echo(p, default_experiment(ExperimentKind::kT1, p)), std::invalid_argument);
}

TEST(RoundTrip, FitsAreDeterministic) {
  const DeviceParams p = reference_device();
  const ExperimentConfig cfg = with_snr(p, default_experiment(ExperimentKind::kRamsey, p), 10.0, 9);
  const FitResult a = fit_dataset(synthesize(p, cfg));
  const FitResult b = fit_dataset(synthesize(p, cfg));
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.sigmas, b.sigmas);
  EXPECT_EQ(a.n_iter, b.n_iter);
}

// Property: coherence times fitted from one device respect T2 <= 2 T1.
TEST(RoundTrip, FittedT2WithinTwiceT1) {
  DeviceParams p = reference_device();
  p.t2 = 2.0 * p.t1;  // boundary case
  p.t2e = p.t2;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FitResult t1 = fit_dataset(synthesize(p, with_snr(p, default_experiment(ExperimentKind::kT1, p), 10.0, seed)));
    const FitResult t2 = fit_dataset(synthesize(p, with_snr(p, default_experiment(ExperimentKind::kRamsey, p), 10.0, seed + 100)));
    const double slack = 3.0 * std::hypot(t2.sigma("decay_time"), 2.0 * t1.sigma("decay_time"));
    EXPECT_LE(t2.value("decay_time"), 2.0 * t1.value("decay_time") + slack) << seed;
  }
}

TEST(MonteCarlo, DecayTimesAtSnr10) {
  const DeviceParams p = reference_device();
  const RoundTrip cases[] = {
      {ExperimentKind::kT1, "decay_time", p.t1},
      {ExperimentKind::kEcho, "decay_time", p.t2e},
      {ExperimentKind::kRamsey, "decay_time", p.t2},
  };
  for (const auto& c : cases) {
    std::vector<double> err;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const FitResult fit = fit_dataset(synthesize(p, with_snr(p, default_experiment(c.kind, p), 10.0, seed)));
      err.push_back(fit.converged ? rel(fit.value(c.name), c.truth) : 1.0);
    }
    EXPECT_LT(quantile(err, 0.5), 0.05) << to_string(c.kind);
    EXPECT_LT(quantile(err, 0.95), 0.05) << to_string(c.kind);
  }
}

TEST(MonteCarlo, PiPulseMixtureAtSnr10) {
  const DeviceParams p = reference_device();
  ExperimentConfig cfg = default_experiment(ExperimentKind::kResonatorSweep, p);
  cfg.pi_pulse = true;
  std::vector<double> err;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    cfg.seed = seed;
    cfg.noise_sigma = 0.1;
    const Dataset d = synthesize(p, cfg);
    const FitResult fit = fit_double_lorentzian({d.axis, d.iq, ResponseMode::kTransmission}, p.f_r0);
    err.push_back(fit.converged ? rel(fit.value("f_r1"), p.f_r0 + 2.0 * p.chi) : 1.0);
  }
  EXPECT_LT(quantile(err, 0.95), 1e-4);
}

}  // namespace
}  // namespace coaxsim
