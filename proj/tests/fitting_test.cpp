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

#include "coaxsim/fitting.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "coaxsim/constants.hpp"
#include "coaxsim/experiments.hpp"

namespace coaxsim {
namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

TEST(LevenbergMarquardt, RecoversExponential) {
  const auto t = linspace(0.0, 3.0, 40);
  const ResidualFn res = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) r(i) = p(0) * std::exp(-p(1) * t[i]) - 2.0 * std::exp(-1.3 * t[i]);
    return r;
  };
  const LmResult out = levenberg_marquardt(res, Eigen::Vector2d(1.0, 0.5));
  EXPECT_TRUE(out.converged);
  EXPECT_NEAR(out.p(0), 2.0, 1e-8);
  EXPECT_NEAR(out.p(1), 1.3, 1e-8);
  EXPECT_LT(out.ssr, 1e-20);
}

TEST(LevenbergMarquardt, RosenbrockValley) {
  const ResidualFn res = [](const Eigen::VectorXd& p) {
    return Eigen::Vector2d(10.0 * (p(1) - p(0) * p(0)), 1.0 - p(0));
  };
  const LmResult out = levenberg_marquardt(res, Eigen::Vector2d(-1.2, 1.0));
  EXPECT_TRUE(out.converged);
  EXPECT_NEAR(out.p(0), 1.0, 1e-6);
  EXPECT_NEAR(out.p(1), 1.0, 1e-6);
}

TEST(LevenbergMarquardt, IterationCap) {
  const ResidualFn res = [](const Eigen::VectorXd& p) {
    return Eigen::Vector2d(10.0 * (p(1) - p(0) * p(0)), 1.0 - p(0));
  };
  LmOptions opt;
  opt.max_iter = 2;
  const LmResult out = levenberg_marquardt(res, Eigen::Vector2d(-1.2, 1.0), opt);
  EXPECT_FALSE(out.converged);
  EXPECT_EQ(out.n_iter, 2);
}

TEST(LevenbergMarquardt, SigmaScalesWithNoise) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.01);
  const auto x = linspace(0.0, 1.0, 200);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.5 + 2.0 * x[i] + n(rng);
  const ResidualFn res = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r(i) = p(0) + p(1) * x[i] - y[i];
    return r;
  };
  const LmResult out = levenberg_marquardt(res, Eigen::Vector2d(0.0, 0.0));
  // Ordinary least squares: sigma of the slope is s / sqrt(sum (x - xbar)^2).
  const double sxx = x.size() / 12.0 * (1.0 + 2.0 / (x.size() - 1));
  EXPECT_NEAR(out.sigma(1), 0.01 / std::sqrt(sxx), 0.002);
}

TEST(FitResult, LookupAndText) {
  FitResult f;
  f.add("a", 1.5, 0.1);
  f.converged = true;
  EXPECT_EQ(f.value("a"), 1.5);
  EXPECT_EQ(f.sigma("a"), 0.1);
  EXPECT_THROW(f.value("b"), std::out_of_range);
  EXPECT_NE(to_text(f).find("a = 1.5"), std::string::npos);
}

TEST(FitDecay, Noiseless) {
  const auto t = linspace(0.0, 20e-6, 401);
  std::vector<double> y;
  for (double x : t) y.push_back(std::exp(-x / 4.10e-6));
  const FitResult f = fit_decay(t, y);
  ASSERT_TRUE(f.converged) << f.note;
  EXPECT_LT(rel(f.value("decay_time"), 4.10e-6), 1e-3);
  EXPECT_LT(rel(f.value("amplitude"), 1.0), 1e-3);
}

TEST(FitDecay, ConstantIsUnbounded) {
  const auto t = linspace(0.0, 20e-6, 101);
  const std::vector<double> y(t.size(), 0.8);
  const FitResult f = fit_decay(t, y);
  EXPECT_FALSE(f.converged);
  EXPECT_EQ(f.note, "decay_unbounded");
}

TEST(FitDecay, Preconditions) {
  const auto t = linspace(0.0, 1.0, 20);
  EXPECT_THROW(fit_decay(t, std::vector<double>(20, -0.1)), std::invalid_argument);
  EXPECT_THROW(fit_decay(linspace(0.0, 1.0, 5), std::vector<double>(5, 1.0)),
               std::invalid_argument);
}

TEST(FitDampedCosine, Rabi47MHz) {
  const double f0 = 47e6, tr = 2.5e-6;
  const auto t = linspace(0.0, 2e-6, 1001);
  std::vector<double> y;
  for (double x : t) y.push_back(0.5 - 0.5 * std::cos(kTwoPi * f0 * x) * std::exp(-x / tr));
  const FitResult f = fit_damped_cosine(t, y, false);
  ASSERT_TRUE(f.converged) << f.note;
  EXPECT_LT(rel(f.value("frequency"), f0), 1e-4);
  EXPECT_LT(rel(f.value("decay_time"), tr), 5e-3);
  EXPECT_NEAR(f.value("amplitude"), -0.5, 1e-3);
  EXPECT_NEAR(f.value("offset"), 0.5, 1e-3);
  EXPECT_EQ(f.value("phase"), 0.0);
}

TEST(FitDampedCosine, RamseyWithPhase) {
  const auto t = linspace(0.0, 15e-6, 10001);
  std::vector<double> y;
  for (double x : t) y.push_back(0.5 + 0.5 * std::cos(kTwoPi * 4.5e6 * x + 0.4) * std::exp(-x / 5.65e-6));
  const FitResult f = fit_damped_cosine(t, y, true);
  ASSERT_TRUE(f.converged) << f.note;
  EXPECT_LT(rel(f.value("frequency"), 4.5e6), 1e-5);
  EXPECT_LT(rel(f.value("decay_time"), 5.65e-6), 5e-3);
  EXPECT_NEAR(f.value("phase"), 0.4, 1e-3);
}

TEST(FitDampedCosine, UndampedFlagged) {
  const auto t = linspace(0.0, 1e-6, 501);
  std::vector<double> y;
  for (double x : t) y.push_back(0.5 + 0.5 * std::cos(kTwoPi * 20e6 * x));
  const FitResult f = fit_damped_cosine(t, y, false);
  EXPECT_FALSE(f.converged);
  EXPECT_EQ(f.note, "decay_unbounded");
  EXPECT_GT(f.value("decay_time"), t.back());
}

TEST(FitDampedCosine, DcPeakWithoutPhase) {
  const auto t = linspace(0.0, 1e-6, 200);
  std::vector<double> y;
  for (double x : t) y.push_back(std::exp(-x / 0.3e-6));
  EXPECT_THROW(fit_damped_cosine(t, y, false), std::invalid_argument);
}

TEST(FitDampedCosine, NonUniformAxis) {
  auto t = linspace(0.0, 1e-6, 200);
  t[5] += 1e-10;
  EXPECT_THROW(fit_damped_cosine(t, std::vector<double>(200, 0.0), true), std::invalid_argument);
}

TEST(FitLorentzianPeak, RecoversShape) {
  const auto f = linspace(7.0e9, 7.4e9, 4001);
  std::vector<double> y;
  for (double x : f) {
    const double u = (x - 7.21e9) / 2.5e6;
    y.push_back(0.3 / (1.0 + u * u) + 0.01);
  }
  const FitResult r = fit_lorentzian_peak(f, y);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.value("f0"), 7.21e9, 1e3);
  EXPECT_LT(rel(r.value("fwhm"), 5e6), 1e-3);
  EXPECT_LT(rel(r.value("amplitude"), 0.3), 1e-3);
}

TEST(FindPeaks, OrderedAndSeparated) {
  const auto x = linspace(0.0, 10.0, 1001);
  std::vector<double> y;
  for (double v : x) {
    y.push_back(1.0 / (1.0 + 100 * (v - 2) * (v - 2)) + 0.5 / (1.0 + 100 * (v - 7) * (v - 7)) +
                0.02 / (1.0 + 100 * (v - 5) * (v - 5)));
  }
  const auto peaks = find_peaks(x, y, 0.1, 1.0);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_NEAR(peaks[0], 2.0, 0.01);
  EXPECT_NEAR(peaks[1], 7.0, 0.01);
}

TEST(FitLorentzianComplex, ReferenceResponse) {
  const DeviceParams p = reference_device();
  const auto f = linspace(p.f_r0 - 30e6, p.f_r0 + 30e6, 2401);
  const auto r = steady_state_response(p, 0, f, cplx(0.8, 0.3), ResponseMode::kTransmission,
                                       cplx(0.02, -0.01));
  const FitResult fit = fit_lorentzian_complex(r);
  ASSERT_TRUE(fit.converged);
  EXPECT_LT(rel(fit.value("f0"), 10.23e9), 1e-6);
  EXPECT_LT(rel(fit.value("q_factor"), 2080.0), 1e-4);
  EXPECT_NEAR(fit.value("amp_re"), 0.8, 1e-6);
  EXPECT_NEAR(fit.value("baseline_im"), -0.01, 1e-6);
}

TEST(FitLorentzianComplex, ZeroAmplitudeDegenerate) {
  const DeviceParams p = reference_device();
  const auto f = linspace(p.f_r0 - 30e6, p.f_r0 + 30e6, 601);
  const auto r = steady_state_response(p, 0, f, 0.0, ResponseMode::kTransmission, cplx(0.1, 0.0));
  const FitResult fit = fit_lorentzian_complex(r);
  EXPECT_FALSE(fit.converged);
}

TEST(FitLorentzianComplex, NarrowSpanRejected) {
  const DeviceParams p = reference_device();
  const auto f = linspace(p.f_r0 - 3e6, p.f_r0 + 3e6, 601);
  const auto r = steady_state_response(p, 0, f, 1.0, ResponseMode::kTransmission);
  EXPECT_THROW(fit_lorentzian_complex(r), std::invalid_argument);
}

TEST(FitLorentzianComplex, MedianQErrorAtSnr20) {
  const DeviceParams p = reference_device();
  const auto f = linspace(p.f_r0 - 30e6, p.f_r0 + 30e6, 2401);
  const auto clean = steady_state_response(p, 0, f, 1.0, ResponseMode::kTransmission);
  std::vector<double> err;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0 / 20.0);
    auto noisy = clean;
    for (auto& s : noisy.s) s += cplx(n(rng), n(rng));
    err.push_back(rel(fit_lorentzian_complex(noisy).value("q_factor"), 2080.0));
  }
  std::nth_element(err.begin(), err.begin() + 100, err.end());
  EXPECT_LT(err[100], 0.02);
}

TEST(FitDoubleLorentzian, MixtureRecoversTwoChi) {
  const DeviceParams p = reference_device();
  const auto f = linspace(p.f_r0 - 30e6, p.f_r0 + 30e6, 2401);
  const auto r = mixed_state_response(p, 0.7, f, cplx(1.0, 0.2), ResponseMode::kTransmission);
  const FitResult fit = fit_double_lorentzian(r);
  ASSERT_TRUE(fit.converged) << fit.note;
  EXPECT_TRUE(fit.note.empty()) << fit.note;
  EXPECT_LT(rel(-fit.value("two_chi"), 12.68e6), 0.02);
  EXPECT_NEAR(fit.value("weight"), 0.7, 0.05);
  EXPECT_LT(rel(fit.value("kappa"), p.f_r0 / p.q_factor), 1e-3);
}

TEST(FitDoubleLorentzian, WeightAcrossRange) {
  const DeviceParams p = reference_device();
  const auto f = linspace(p.f_r0 - 30e6, p.f_r0 + 30e6, 2401);
  for (double w : {0.2, 0.4, 0.6, 0.88}) {
    const auto r = mixed_state_response(p, w, f, 1.0, ResponseMode::kTransmission);
    const FitResult fit = fit_double_lorentzian(r, p.f_r0);
    EXPECT_NEAR(fit.value("weight"), w, 0.05) << w;
    EXPECT_NEAR(fit.value("f_r1") - fit.value("f_r0"), 2.0 * p.chi, 10e3) << w;
  }
}

TEST(FitDoubleLorentzian, SinglePoleFallsBack) {
  const DeviceParams p = reference_device();
  const auto f = linspace(p.f_r0 - 30e6, p.f_r0 + 30e6, 2401);
  const auto r = mixed_state_response(p, 0.0, f, 1.0, ResponseMode::kTransmission);
  const FitResult fit = fit_double_lorentzian(r);
  EXPECT_EQ(fit.note, "fallback_single_lorentzian");
}

}  // namespace
}  // namespace coaxsim
