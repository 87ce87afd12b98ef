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

#include <string>
#include <vector>

namespace coaxsim {

/// Device parameter record. All frequencies are ordinary frequencies in Hz
/// (energies are E/h), all times in seconds.
struct DeviceParams {
  double f_r0 = 0.0;       // dressed ground-state resonator frequency
  double q_factor = 0.0;   // loaded quality factor
  double f_01 = 0.0;       // qubit transition frequency
  double e_c = 0.0;        // charging energy E_C/h
  double e_j = 0.0;        // Josephson energy E_J/h
  double g = 0.0;          // qubit-resonator coupling g/2pi
  double chi = 0.0;        // dispersive shift chi/2pi (signed)
  double t1 = 0.0;
  double t2 = 0.0;
  double t2e = 0.0;

  bool operator==(const DeviceParams&) const = default;
};

/// The unit cell as characterized: f_r0 = 10.23 GHz, Q = 2080,
/// f_01 = 7.23 GHz, E_C/h = 294 MHz, E_J/E_C = 81.8, g/2pi = 462 MHz,
/// chi/2pi = -6.34 MHz, T1 = 4.10 us, T2 = 5.65 us, T2E = 6.67 us.
DeviceParams reference_device();

struct DerivedParams {
  double delta0 = 0.0;         // f_01 - f_r0, Hz
  double kappa = 0.0;          // f_r0 / Q, Hz
  double anharmonicity = 0.0;  // -E_C to leading order, Hz
};

DerivedParams derived_quantities(const DeviceParams& params);

/// Checks the hard invariants (positivity, T2 <= 2 T1) and throws
/// std::invalid_argument on violation. Soft conditions (transmon regime,
/// dispersive regime, f_01 consistent with E_J/E_C) come back as warnings.
std::vector<std::string> validate(const DeviceParams& params);

/// Lumped-element network: qubit shunt capacitance, resonator capacitance,
/// coupling capacitance (F), resonator inductance (H), Josephson energy (Hz).
/// The qubit node capacitance is C_qq = c_q + c_g.
struct CircuitNetwork {
  double c_q = 0.0;
  double c_r = 0.0;
  double c_g = 0.0;
  double l_r = 0.0;
  double e_j = 0.0;

  bool operator==(const CircuitNetwork&) const = default;
};

void validate(const CircuitNetwork& net);

struct QuantizedCircuit {
  double f_r0 = 0.0;          // bare LC frequency with the loaded node capacitance
  double f_r0_dressed = 0.0;  // f_r0 pulled by the qubit in its ground state
  double e_c = 0.0;
  double g = 0.0;
};

/// Closed-form quantization of the two-node network: charging energy from
/// the inverse capacitance matrix, resonator frequency from L_R and the
/// effective resonator capacitance, and the charge-charge coupling between
/// the transmon 0-1 charge matrix element and the resonator zero-point charge.
QuantizedCircuit quantize_circuit(const CircuitNetwork& net);

enum class CouplingExtraction {
  kMatrixElement,   // beta * |<1|n|0>| with exact transmon eigenvectors
  kDispersiveShift  // invert the dressed chi through the dispersive relation
};

struct BruteForceSpectrum {
  double f_r0 = 0.0;  // dressed |g,1> - |g,0>
  double f_01 = 0.0;  // dressed |e,0> - |g,0>
  double g = 0.0;
  double chi = 0.0;   // half the dressed resonator pull between |g> and |e>
};

/// Diagonalizes transmon (charge basis) x resonator (Fock basis) with
/// charge-charge coupling. Reruns with both cutoffs raised by 2 and throws
/// std::runtime_error if any output moves by more than 0.1%.
BruteForceSpectrum brute_force_spectrum(
    const CircuitNetwork& net, int charge_cutoff = 15, int fock_cutoff = 8,
    CouplingExtraction extraction = CouplingExtraction::kMatrixElement);

}  // namespace coaxsim
