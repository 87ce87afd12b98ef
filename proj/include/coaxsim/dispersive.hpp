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

#include <complex>
#include <span>
#include <vector>

#include "coaxsim/device_model.hpp"

namespace coaxsim {

// Dispersive relation in ordinary-frequency units:
//   chi = -g^2 E_C / (delta0 (delta0 - E_C))
// The resonator sits at f_r0 with the qubit in |0> and at f_r0 + 2 chi with
// the qubit in |1>.

double chi_from_params(double g, double delta0, double e_c);

/// Exact inverse of chi_from_params. Throws std::invalid_argument if the
/// signs of chi and delta0 (delta0 - E_C) are inconsistent.
double g_from_chi(double chi, double delta0, double e_c);

/// |delta0| > 10 g.
bool in_dispersive_regime(double g, double delta0);

enum class ResponseMode { kTransmission, kReflection };

struct ResonatorResponse {
  std::vector<double> f_axis;
  std::vector<std::complex<double>> s;
  ResponseMode mode = ResponseMode::kTransmission;
};

/// Single-pole line shape (kappa/2) / (i (f - f_pole) + kappa/2); unit height.
std::complex<double> lorentzian(double f, double f_pole, double kappa);

/// Pole position for qubit state 0 or 1.
double resonator_pole(const DeviceParams& params, int qubit_state);

/// Steady-state resonator response with the qubit frozen in `qubit_state`.
/// Transmission is drive_amp * L(f); reflection is the overcoupled one-port
/// drive_amp * (1 - 2 L(f)). `baseline` is added as a flat complex background.
ResonatorResponse steady_state_response(const DeviceParams& params,
                                        int qubit_state,
                                        std::span<const double> f_axis,
                                        std::complex<double> drive_amp,
                                        ResponseMode mode,
                                        std::complex<double> baseline = {});

/// (1 - w) * response(|0>) + w * response(|1>), summed in the complex plane.
ResonatorResponse mixed_state_response(const DeviceParams& params, double weight,
                                       std::span<const double> f_axis,
                                       std::complex<double> drive_amp,
                                       ResponseMode mode,
                                       std::complex<double> baseline = {});

}  // namespace coaxsim
