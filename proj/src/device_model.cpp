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

#include "coaxsim/device_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "coaxsim/constants.hpp"
#include "coaxsim/dispersive.hpp"
#include "coaxsim/transmon.hpp"

namespace coaxsim {

double dbm_amplitude_ratio(double p_dbm, double ref_dbm) {
  return std::pow(10.0, (p_dbm - ref_dbm) / 20.0);
}

DeviceParams reference_device() {
  DeviceParams p;
  p.f_r0 = 10.23e9;
  p.q_factor = 2080.0;
  p.f_01 = 7.23e9;
  p.e_c = 294e6;
  p.e_j = 81.8 * 294e6;
  p.g = 462e6;
  p.chi = -6.34e6;
  p.t1 = 4.10e-6;
  p.t2 = 5.65e-6;
  p.t2e = 6.67e-6;
  return p;
}

DerivedParams derived_quantities(const DeviceParams& params) {
  if (!(params.q_factor > 0.0)) {
    throw std::invalid_argument("q_factor must be positive");
  }
  DerivedParams d;
  d.delta0 = params.f_01 - params.f_r0;
  d.kappa = params.f_r0 / params.q_factor;
  d.anharmonicity = -params.e_c;
  return d;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    std::ostringstream msg;
    msg << name << " must be finite and strictly positive (got " << v << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

std::vector<std::string> validate(const DeviceParams& p) {
  require_positive(p.f_r0, "f_r0");
  require_positive(p.q_factor, "q_factor");
  require_positive(p.f_01, "f_01");
  require_positive(p.e_c, "e_c");
  require_positive(p.e_j, "e_j");
  require_positive(p.g, "g");
  require_positive(p.t1, "t1");
  require_positive(p.t2, "t2");
  require_positive(p.t2e, "t2e");
  if (!std::isfinite(p.chi)) throw std::invalid_argument("chi must be finite");
  if (p.t2 > 2.0 * p.t1 * (1.0 + 1e-9)) {
    throw std::invalid_argument("t2 exceeds 2*t1");
  }

  std::vector<std::string> warnings;
  const double ratio = p.e_j / p.e_c;
  if (ratio <= 20.0) {
    warnings.push_back("e_j/e_c = " + std::to_string(ratio) +
                       " is outside the transmon regime (> 20)");
  } else {
    const double f01 = std::sqrt(8.0 * p.e_j * p.e_c) - p.e_c;
    if (std::abs(f01 / p.f_01 - 1.0) > 0.01) {
      warnings.push_back("f_01 differs from sqrt(8 e_j e_c) - e_c by more than 1%");
    }
  }
  const double delta0 = p.f_01 - p.f_r0;
  if (!in_dispersive_regime(p.g, delta0)) {
    warnings.push_back("|f_01 - f_r0| < 10 g: outside the dispersive regime");
  }
  if (delta0 != 0.0 && delta0 != p.e_c) {
    const double chi = chi_from_params(p.g, delta0, p.e_c);
    if (std::abs(chi - p.chi) > 0.05 * std::abs(chi)) {
      warnings.push_back("chi differs from the dispersive relation by more than 5%");
    }
  }
  return warnings;
}

namespace {

struct InverseCapacitance {
  double qq, rr, qr;
};

InverseCapacitance invert_capacitance(const CircuitNetwork& net) {
  Eigen::Matrix2d c;
  c << net.c_q + net.c_g, -net.c_g, -net.c_g, net.c_r + net.c_g;
  // Relative determinant test: entries are ~1e-14 so an absolute one is useless.
  const double det = c.determinant();
  if (!(det > 1e-12 * c(0, 0) * c(1, 1))) {
    throw std::invalid_argument("capacitance matrix is singular or not positive definite");
  }
  const Eigen::Matrix2d inv = c.inverse();
  return {inv(0, 0), inv(1, 1), inv(0, 1)};
}

}  // namespace

// c_g = 0 is accepted: it is the decoupled limit.
void validate(const CircuitNetwork& net) {
  require_positive(net.c_q, "c_q");
  require_positive(net.c_r, "c_r");
  require_positive(net.l_r, "l_r");
  require_positive(net.e_j, "e_j");
  if (!(net.c_g >= 0.0) || !std::isfinite(net.c_g)) {
    throw std::invalid_argument("c_g must be finite and non-negative");
  }
  invert_capacitance(net);
}

namespace {

double charging_energy(const InverseCapacitance& ci) {
  return kElementaryCharge * kElementaryCharge * ci.qq / (2.0 * kPlanck);
}

double lc_frequency(const InverseCapacitance& ci, double l_r) {
  return std::sqrt(ci.rr / l_r) / kTwoPi;
}

// Charge-charge coupling per unit Cooper-pair number and per unit (a + a^dag),
// in Hz: (C^-1)_qr * 2e * Q_zpf / h.
double coupling_scale(const InverseCapacitance& ci, double f_r) {
  const double q_zpf = std::sqrt(kPlanck * f_r / (2.0 * ci.rr));
  return std::abs(ci.qr) * 2.0 * kElementaryCharge * q_zpf / kPlanck;
}

}  // namespace

QuantizedCircuit quantize_circuit(const CircuitNetwork& net) {
  validate(net);
  const InverseCapacitance ci = invert_capacitance(net);
  QuantizedCircuit out;
  out.e_c = charging_energy(ci);
  out.f_r0 = lc_frequency(ci, net.l_r);

  // Harmonic zero-point charge with the first anharmonic correction.
  const double xi = std::sqrt(2.0 * out.e_c / net.e_j);
  const double n01 =
      std::pow(net.e_j / (8.0 * out.e_c), 0.25) / std::sqrt(2.0) * (1.0 - xi / 8.0);
  out.g = coupling_scale(ci, out.f_r0) * n01;

  // Ground-state pull from the 0-1 transition, rotating plus counter-rotating.
  const double f01 = std::sqrt(8.0 * net.e_j * out.e_c) - out.e_c;
  const double detuning = out.f_r0 - f01;
  out.f_r0_dressed = out.f_r0;
  if (out.g > 0.0 && std::abs(detuning) > out.g) {
    out.f_r0_dressed += out.g * out.g * (1.0 / detuning - 1.0 / (out.f_r0 + f01));
  }
  return out;
}

namespace {

BruteForceSpectrum solve_coupled(const CircuitNetwork& net, int charge_cutoff,
                                 int fock_cutoff, CouplingExtraction extraction) {
  const InverseCapacitance ci = invert_capacitance(net);
  const double e_c = charging_energy(ci);
  const double f_r = lc_frequency(ci, net.l_r);
  const double beta = coupling_scale(ci, f_r);

  const Eigen::MatrixXd ht = transmon_hamiltonian(net.e_j, e_c, 0.0, charge_cutoff);
  const int dq = static_cast<int>(ht.rows());
  const int nf = fock_cutoff;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> transmon(ht);
  const Eigen::MatrixXd& v = transmon.eigenvectors();

  Eigen::VectorXd charge(dq);
  for (int i = 0; i < dq; ++i) charge(i) = i - charge_cutoff;

  // Index of |charge i> (x) |fock k> is i * nf + k.
  const int dim = dq * nf;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dq; ++i) {
    for (int j = 0; j < dq; ++j) {
      if (ht(i, j) == 0.0) continue;
      for (int k = 0; k < nf; ++k) h(i * nf + k, j * nf + k) += ht(i, j);
    }
    for (int k = 0; k < nf; ++k) {
      h(i * nf + k, i * nf + k) += f_r * k;
      if (k + 1 < nf) {
        const double c = beta * charge(i) * std::sqrt(k + 1.0);
        h(i * nf + k, i * nf + k + 1) += c;
        h(i * nf + k + 1, i * nf + k) += c;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(h);
  const Eigen::VectorXd& w = full.eigenvalues();
  const Eigen::MatrixXd& u = full.eigenvectors();

  auto dressed = [&](int q, int k) {
    Eigen::VectorXd bare = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dq; ++i) bare(i * nf + k) = v(i, q);
    Eigen::Index best = 0;
    (u.transpose() * bare).cwiseAbs().maxCoeff(&best);
    return w(best);
  };

  BruteForceSpectrum out;
  const double e00 = dressed(0, 0);
  out.f_r0 = dressed(0, 1) - e00;
  out.f_01 = dressed(1, 0) - e00;
  const double f_r_excited = dressed(1, 1) - dressed(1, 0);
  out.chi = 0.5 * (f_r_excited - out.f_r0);
  if (beta == 0.0) {
    out.g = 0.0;
  } else if (extraction == CouplingExtraction::kMatrixElement) {
    out.g = beta * std::abs(v.col(1).dot(charge.asDiagonal() * v.col(0)));
  } else {
    out.g = g_from_chi(out.chi, out.f_01 - out.f_r0, e_c);
  }
  return out;
}

bool moved(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 && std::abs(a - b) > 1e-3 * scale;
}

}  // namespace

BruteForceSpectrum brute_force_spectrum(const CircuitNetwork& net, int charge_cutoff,
                                        int fock_cutoff, CouplingExtraction extraction) {
  validate(net);
  if (charge_cutoff < 8) throw std::invalid_argument("charge_cutoff must be >= 8");
  if (fock_cutoff < 5) throw std::invalid_argument("fock_cutoff must be >= 5");
  const BruteForceSpectrum a = solve_coupled(net, charge_cutoff, fock_cutoff, extraction);
  const BruteForceSpectrum b =
      solve_coupled(net, charge_cutoff + 2, fock_cutoff + 2, extraction);
  if (moved(a.f_r0, b.f_r0) || moved(a.f_01, b.f_01) || moved(a.g, b.g)) {
    throw std::runtime_error(
        "brute_force_spectrum not converged in cutoff (>0.1% change at cutoff+2); "
        "increase charge_cutoff/fock_cutoff");
  }
  return a;
}

}  // namespace coaxsim
