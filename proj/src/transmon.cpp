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

#include "coaxsim/transmon.hpp"

#include <cmath>
#include <sstream>

namespace coaxsim {

namespace {

void check_energies(double e_j, double e_c) {
  if (!(e_j > 0.0 && std::isfinite(e_j)) || !(e_c > 0.0 && std::isfinite(e_c))) {
    throw std::invalid_argument("e_j and e_c must be finite and positive");
  }
}

}  // namespace

Eigen::MatrixXd transmon_hamiltonian(double e_j, double e_c, double n_g,
                                     int charge_cutoff) {
  const int dim = 2 * charge_cutoff + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double n = i - charge_cutoff - n_g;
    h(i, i) = 4.0 * e_c * n * n;
    if (i + 1 < dim) {
      h(i, i + 1) = -0.5 * e_j;
      h(i + 1, i) = -0.5 * e_j;
    }
  }
  return h;
}

TransmonLevels diagonalize_transmon(double e_j, double e_c, double n_g,
                                    int charge_cutoff, int n_levels) {
  check_energies(e_j, e_c);
  if (charge_cutoff < 10) throw std::invalid_argument("charge_cutoff must be >= 10");
  const int dim = 2 * charge_cutoff + 1;
  if (n_levels < 1 || n_levels > dim) throw std::invalid_argument("bad n_levels");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      transmon_hamiltonian(e_j, e_c, n_g, charge_cutoff), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending

  if (ev(dim - 1) - ev(n_levels - 1) < 5.0 * e_j) {
    std::ostringstream msg;
    msg << "charge_cutoff " << charge_cutoff
        << " too small: basis tops out within 5 e_j of level " << n_levels - 1;
    throw std::runtime_error(msg.str());
  }

  TransmonLevels out;
  out.n_g = n_g;
  out.charge_cutoff = charge_cutoff;
  out.energies.resize(n_levels);
  for (int k = 0; k < n_levels; ++k) out.energies[k] = ev(k) - ev(0);
  return out;
}

TransitionFrequencies transition_frequencies(const TransmonLevels& levels) {
  const auto& e = levels.energies;
  if (e.size() < 4) throw std::invalid_argument("need at least 4 levels");
  return {e[1], e[2] / 2.0, e[3] / 3.0, e[2] - e[1]};
}

TransmonLevels perturbative_levels(double e_j, double e_c, int n_max) {
  check_energies(e_j, e_c);
  if (e_j / e_c <= 20.0) {
    throw std::invalid_argument("perturbative_levels requires e_j/e_c > 20");
  }
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const double plasma = std::sqrt(8.0 * e_j * e_c);
  auto level = [&](int n) {
    return -e_j + plasma * (n + 0.5) - e_c / 12.0 * (6.0 * n * n + 6.0 * n + 3.0);
  };
  TransmonLevels out;
  out.charge_cutoff = 0;
  const double e0 = level(0);
  for (int n = 0; n <= n_max; ++n) out.energies.push_back(level(n) - e0);
  return out;
}

double charge_matrix_element_01(double e_j, double e_c, int charge_cutoff) {
  check_energies(e_j, e_c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      transmon_hamiltonian(e_j, e_c, 0.0, charge_cutoff));
  const Eigen::MatrixXd& v = solver.eigenvectors();
  double acc = 0.0;
  for (int i = 0; i < v.rows(); ++i) acc += v(i, 1) * (i - charge_cutoff) * v(i, 0);
  return std::abs(acc);
}

JosephsonCharging invert_spectroscopy(double f_01, double f_02_over_2, double tol_hz) {
  if (!(f_01 > f_02_over_2) || !(f_02_over_2 > 0.0)) {
    throw std::invalid_argument(
        "invert_spectroscopy requires f_01 > f_02/2 > 0 (negative anharmonicity)");
  }
  auto lines = [](const Eigen::Vector2d& x) {
    const auto levels = diagonalize_transmon(x(0), x(1), 0.0, kDefaultChargeCutoff, 3);
    return Eigen::Vector2d(levels.energies[1], levels.energies[2] / 2.0);
  };
  const Eigen::Vector2d target(f_01, f_02_over_2);

  const double e_c0 = 2.0 * (f_01 - f_02_over_2);
  Eigen::Vector2d x((f_01 + e_c0) * (f_01 + e_c0) / (8.0 * e_c0), e_c0);
  Eigen::Vector2d r = lines(x) - target;
  Eigen::Vector2d best = x;
  double best_err = r.cwiseAbs().maxCoeff();

  for (int iter = 0; iter < 100; ++iter) {
    if (best_err < tol_hz) return {best(0), best(1)};
    Eigen::Matrix2d jac;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d xp = x, xm = x;
      const double h = 1e-6 * x(k);
      xp(k) += h;
      xm(k) -= h;
      jac.col(k) = (lines(xp) - lines(xm)) / (2.0 * h);
    }
    Eigen::Vector2d step = jac.fullPivLu().solve(-r);
    // Keep both energies positive.
    while ((x + step).minCoeff() <= 0.0) step *= 0.5;
    x += step;
    r = lines(x) - target;
    const double err = r.cwiseAbs().maxCoeff();
    if (err < best_err) {
      best_err = err;
      best = x;
    }
  }
  if (best_err < tol_hz) return {best(0), best(1)};
  std::ostringstream msg;
  msg << "invert_spectroscopy did not converge in 100 iterations (residual "
      << best_err << " Hz)";
  throw SpectroscopyInversionError(msg.str(), {best(0), best(1)});
}

}  // namespace coaxsim
