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

#include "coaxsim/dispersive.hpp"

#include <cmath>
#include <stdexcept>

namespace coaxsim {

double chi_from_params(double g, double delta0, double e_c) {
  if (delta0 == 0.0 || delta0 == e_c) {
    throw std::invalid_argument("dispersive relation has a pole at delta0 = 0 or delta0 = e_c");
  }
  return -g * g * e_c / (delta0 * (delta0 - e_c));
}

double g_from_chi(double chi, double delta0, double e_c) {
  if (delta0 == 0.0 || delta0 == e_c) {
    throw std::invalid_argument("dispersive relation has a pole at delta0 = 0 or delta0 = e_c");
  }
  const double radicand = -chi * delta0 * (delta0 - e_c) / e_c;
  if (radicand < 0.0) {
    throw std::invalid_argument(
        "chi sign inconsistent with delta0 and e_c (negative radicand)");
  }
  return std::sqrt(radicand);
}

bool in_dispersive_regime(double g, double delta0) {
  return std::abs(delta0) > 10.0 * std::abs(g);
}

std::complex<double> lorentzian(double f, double f_pole, double kappa) {
  const double half = 0.5 * kappa;
  return half / std::complex<double>(half, f - f_pole);
}

double resonator_pole(const DeviceParams& params, int qubit_state) {
  if (qubit_state != 0 && qubit_state != 1) {
    throw std::invalid_argument("qubit_state must be 0 or 1");
  }
  return params.f_r0 + 2.0 * qubit_state * params.chi;
}

namespace {

ResonatorResponse response_from_weight(const DeviceParams& params, double weight,
                                       std::span<const double> f_axis,
                                       std::complex<double> drive_amp,
                                       ResponseMode mode,
                                       std::complex<double> baseline) {
  if (f_axis.empty()) throw std::invalid_argument("f_axis is empty");
  if (!(params.q_factor > 0.0)) throw std::invalid_argument("q_factor must be positive");
  const double kappa = params.f_r0 / params.q_factor;
  const double f0 = resonator_pole(params, 0);
  const double f1 = resonator_pole(params, 1);

  ResonatorResponse out;
  out.mode = mode;
  out.f_axis.assign(f_axis.begin(), f_axis.end());
  out.s.reserve(f_axis.size());
  for (double f : f_axis) {
    std::complex<double> l{};
    if (weight != 1.0) l += (1.0 - weight) * lorentzian(f, f0, kappa);
    if (weight != 0.0) l += weight * lorentzian(f, f1, kappa);
    const std::complex<double> line =
        mode == ResponseMode::kTransmission ? l : 1.0 - 2.0 * l;
    out.s.push_back(drive_amp * line + baseline);
  }
  return out;
}

}  // namespace

ResonatorResponse steady_state_response(const DeviceParams& params, int qubit_state,
                                        std::span<const double> f_axis,
                                        std::complex<double> drive_amp, ResponseMode mode,
                                        std::complex<double> baseline) {
  resonator_pole(params, qubit_state);
  return response_from_weight(params, qubit_state, f_axis, drive_amp, mode, baseline);
}

ResonatorResponse mixed_state_response(const DeviceParams& params, double weight,
                                       std::span<const double> f_axis,
                                       std::complex<double> drive_amp, ResponseMode mode,
                                       std::complex<double> baseline) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw std::invalid_argument("excited-state weight must lie in [0, 1]");
  }
  return response_from_weight(params, weight, f_axis, drive_amp, mode, baseline);
}

}  // namespace coaxsim
