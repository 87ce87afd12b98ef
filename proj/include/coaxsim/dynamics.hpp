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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coaxsim/device_model.hpp"

namespace coaxsim {

using cplx = std::complex<double>;

/// <a>, <sigma_z>, <a sigma_z> at time t (s).
struct CavityBlochState {
  cplx a{};
  double sz = -1.0;
  cplx asz{};
  double t = 0.0;
};

/// Readout drive in the frame rotating at the drive frequency. `envelope`
/// returns the angular drive amplitude epsilon_m(t) (rad/s); `detuning` is
/// Delta_rm = omega_mid - omega_d (rad/s), where omega_mid = 2 pi (f_r0 + chi)
/// is the resonator frequency midway between the two qubit-state poles.
struct CavityDrive {
  std::function<cplx(double)> envelope;
  double detuning = 0.0;
};

/// Constant drive of amplitude `epsilon` on [t_on, t_off).
CavityDrive rectangular_drive(const DeviceParams& params, cplx epsilon,
                              double f_drive, double t_on, double t_off);

/// Drive detuning Delta_rm (rad/s) for a tone at f_drive.
double drive_detuning(const DeviceParams& params, double f_drive);

/// Largest admissible step 1 / (50 max(|Delta_rm|, kappa, |2 pi chi|)).
double max_cavity_bloch_step(const DeviceParams& params, double detuning);

/// Uniform axis t0, t0 + dt, ..., with n points.
std::vector<double> uniform_axis(double t0, double dt, std::size_t n);

/// Integrates the Cavity-Bloch equations
///   d<a>/dt    = -i D <a> - i X <a sz> - i eps - (k/2) <a>
///   d<sz>/dt   = -g1 (1 + <sz>)
///   d<a sz>/dt = -i D <a sz> - i X <a> - i eps <sz> - (k/2 + g1) <a sz> - g1 <a>
/// with D = Delta_rm, X = 2 pi chi, k = 2 pi f_r0/Q, g1 = 1/T1, using fixed
/// RK4 steps. `t_axis` must be uniform and start at init.t. `substeps` is the
/// number of RK4 steps per output interval; 0 picks the smallest count that
/// satisfies the step bound, an explicit value violating it throws.
std::vector<CavityBlochState> integrate_cavity_bloch(
    const DeviceParams& params, const CavityDrive& drive,
    const CavityBlochState& init, std::span<const double> t_axis,
    int substeps = 0);

struct ExpectationRecord {
  cplx a{};
  double sz = 0.0;
  cplx asz{};
};

/// Resonator (Fock, n < fock_cutoff) x qubit density matrix with the qubit
/// as the fast index: basis |n, q> -> 2 n + q, q = 0 ground.
Eigen::MatrixXcd product_density(int fock_cutoff, double excited_population);

/// Full master-equation evolution of
///   H = Delta_rm a^dag a + 2 pi chi a^dag a sz + eps a^dag + eps^* a
/// with collapse operators sqrt(kappa) a and sqrt(1/T1) sigma_-.
/// Throws std::runtime_error when the top Fock level exceeds 1e-6.
std::vector<ExpectationRecord> lindblad_reference(
    const DeviceParams& params, const CavityDrive& drive,
    const Eigen::MatrixXcd& rho0, std::span<const double> t_axis,
    int fock_cutoff, int substeps = 0);

/// Driven-cavity steady-state photon number with the qubit in |0>.
double steady_state_photons(const DeviceParams& params, cplx epsilon,
                            double detuning);

struct ReadoutPulse {
  double length = 16e-6;           // s
  double power_dbm = -45.0;
  double frequency = 0.0;          // Hz; 0 selects f_r0
  double sample_interval = 20e-9;  // s
  // Calibration: ref_power_dbm maps to ref_nbar photons on resonance.
  double ref_power_dbm = -35.0;
  double ref_nbar = 1.0;
};

/// Angular drive amplitude for the pulse's power under its calibration.
double readout_epsilon(const DeviceParams& params, const ReadoutPulse& pulse);

struct IQTrace {
  std::vector<double> t_axis;
  std::vector<cplx> s;
  std::map<std::string, std::string> meta;
};

/// Modeled ADC record over the pulse window: <a>(t) from the Cavity-Bloch
/// equations for a qubit starting with the given excited population, plus
/// the constant interference offset from the directly reflected pulse.
IQTrace measurement_trace(const DeviceParams& params, double excited_population,
                          const ReadoutPulse& pulse, cplx interference_offset);

struct PopulationEstimate {
  double p1 = 0.0;   // clamped to [-0.05, 1.05]
  double raw = 0.0;  // unclamped matched-filter value
  bool clamped = false;
};

/// Matched-filter projection of `trace` onto the cal1 - cal0 difference.
PopulationEstimate extract_population(const IQTrace& trace, const IQTrace& cal0,
                                      const IQTrace& cal1);

}  // namespace coaxsim
