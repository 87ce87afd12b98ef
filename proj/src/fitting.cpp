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
#include <sstream>
#include <stdexcept>

namespace coaxsim {

namespace {

std::size_t index_of(const FitResult& fit, std::string_view name) {
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    if (fit.names[i] == name) return i;
  }
  throw std::out_of_range("FitResult has no parameter '" + std::string(name) + "'");
}

Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& p, Eigen::Index m) {
  Eigen::MatrixXd jac(m, p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = 1e-6 * (1.0 + std::abs(p(j)));
    Eigen::VectorXd pp = p, pm = p;
    pp(j) += h;
    pm(j) -= h;
    jac.col(j) = (f(pp) - f(pm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace

double FitResult::value(std::string_view name) const { return values[index_of(*this, name)]; }

double FitResult::sigma(std::string_view name) const { return sigmas[index_of(*this, name)]; }

void FitResult::add(std::string name, double v, double s) {
  names.push_back(std::move(name));
  values.push_back(v);
  sigmas.push_back(s);
}

std::string to_text(const FitResult& fit) {
  std::ostringstream out;
  out.precision(10);
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    out << fit.names[i] << " = " << fit.values[i] << "\n";
    out << fit.names[i] << "_sigma = " << fit.sigmas[i] << "\n";
  }
  out << "residual_norm = " << fit.residual_norm << "\n";
  out << "converged = " << (fit.converged ? "true" : "false") << "\n";
  out << "n_iter = " << fit.n_iter << "\n";
  if (!fit.note.empty()) out << "note = " << fit.note << "\n";
  return out.str();
}

LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd p0,
                             const LmOptions& options) {
  LmResult out;
  out.p = std::move(p0);
  Eigen::VectorXd r = residuals(out.p);
  if (!r.allFinite()) throw std::invalid_argument("residuals not finite at the initial point");
  const Eigen::Index m = r.size();
  const Eigen::Index n = out.p.size();
  if (m < n) throw std::invalid_argument("fewer residuals than parameters");

  double ssr = r.squaredNorm();
  double lambda = options.lambda0;
  Eigen::MatrixXd jac = jacobian(residuals, out.p, m);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    out.n_iter = iter;
    if (ssr == 0.0) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index j = 0; j < n; ++j) a(j, j) += lambda * std::max(jtj(j, j), 1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd trial = out.p + step;
      const Eigen::VectorXd r_trial = residuals(trial);
      const double ssr_trial = r_trial.allFinite() ? r_trial.squaredNorm()
                                                    : std::numeric_limits<double>::infinity();
      if (ssr_trial < ssr) {
        const double rel = (ssr - ssr_trial) / ssr;
        out.p = trial;
        r = r_trial;
        ssr = ssr_trial;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel < options.rel_tol) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    // No descent direction left at any damping: a numerical minimum.
    if (!accepted) {
      out.converged = true;
      break;
    }
    if (out.converged) break;
    jac = jacobian(residuals, out.p, m);
  }

  jac = jacobian(residuals, out.p, m);
  out.ssr = ssr;
  const double dof = static_cast<double>(std::max<Eigen::Index>(1, m - n));
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  out.sigma = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  if (lu.isInvertible()) {
    const Eigen::MatrixXd cov = lu.inverse() * (ssr / dof);
    for (Eigen::Index j = 0; j < n; ++j) out.sigma(j) = std::sqrt(std::max(0.0, cov(j, j)));
  }
  return out;
}

}  // namespace coaxsim
