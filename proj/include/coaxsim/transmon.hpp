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

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace coaxsim {

inline constexpr int kDefaultChargeCutoff = 15;

struct TransmonLevels {
  std::vector<double> energies;  // E_n/h relative to the ground state, Hz
  double n_g = 0.0;
  int charge_cutoff = kDefaultChargeCutoff;
};

/// Cooper-pair-box Hamiltonian 4 E_C (n - n_g)^2 - (E_J/2)(|n><n+1| + h.c.)
/// on n in [-cutoff, cutoff], in Hz.
Eigen::MatrixXd transmon_hamiltonian(double e_j, double e_c, double n_g,
                                     int charge_cutoff);

/// Lowest `n_levels` eigenenergies, ground referenced. Throws
/// std::invalid_argument for bad inputs and std::runtime_error when the
/// truncated basis tops out within 5 E_J of the highest requested level.
TransmonLevels diagonalize_transmon(double e_j, double e_c, double n_g = 0.0,
                                    int charge_cutoff = kDefaultChargeCutoff,
                                    int n_levels = 6);

struct TransitionFrequencies {
  double f_01 = 0.0;
  double f_02_over_2 = 0.0;
  double f_03_over_3 = 0.0;
  double f_12 = 0.0;
};

TransitionFrequencies transition_frequencies(const TransmonLevels& levels);

/// Asymptotic large-E_J/E_C levels
///   E_n = -E_J + sqrt(8 E_J E_C)(n + 1/2) - (E_C/12)(6n^2 + 6n + 3),
/// returned for n = 0..n_max. Requires E_J/E_C > 20.
TransmonLevels perturbative_levels(double e_j, double e_c, int n_max);

/// |<1|n|0>| from exact diagonalization at n_g = 0.
double charge_matrix_element_01(double e_j, double e_c,
                                int charge_cutoff = kDefaultChargeCutoff);

struct JosephsonCharging {
  double e_j = 0.0;
  double e_c = 0.0;
};

class SpectroscopyInversionError : public std::runtime_error {
 public:
  SpectroscopyInversionError(const std::string& what, JosephsonCharging best)
      : std::runtime_error(what), best_(best) {}
  const JosephsonCharging& best_estimate() const { return best_; }

 private:
  JosephsonCharging best_;
};

/// Recovers (E_J, E_C) from the measured f_01 and two-photon f_02/2 lines.
/// Starts from the asymptotic relations and refines with Newton steps on the
/// exact spectrum until both lines match within `tol_hz`.
JosephsonCharging invert_spectroscopy(double f_01, double f_02_over_2,
                                      double tol_hz = 1e4);

}  // namespace coaxsim
