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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace coaxsim {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> sigmas;
  double residual_norm = 0.0;
  bool converged = false;
  int n_iter = 0;
  std::string note;  // e.g. "fallback_single_lorentzian", "decay_unbounded"

  /// Throws std::out_of_range for unknown names.
  double value(std::string_view name) const;
  double sigma(std::string_view name) const;
  void add(std::string name, double value, double sigma);
};

/// key = value text, one line per parameter plus status lines.
std::string to_text(const FitResult& fit);

struct LmOptions {
  int max_iter = 200;
  double lambda0 = 1e-3;
  double rel_tol = 1e-9;
};

struct LmResult {
  Eigen::VectorXd p;
  Eigen::VectorXd sigma;  // sqrt(diag((J^T J)^-1) * SSR / (n - p))
  double ssr = 0.0;
  bool converged = false;
  int n_iter = 0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Damped Gauss-Newton with Marquardt scaling. lambda is multiplied by 10
/// on a rejected step and divided by 10 on an accepted one; iteration stops
/// once an accepted step changes the residual sum of squares by less than
/// rel_tol relative, or after max_iter iterations. The Jacobian is taken by
/// central differences, so parameters should be O(1).
LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd p0,
                             const LmOptions& options = {});

}  // namespace coaxsim
