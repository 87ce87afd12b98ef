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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "coaxsim/device_model.hpp"
#include "coaxsim/fitting.hpp"

namespace coaxsim {

/// Physical single-qubit pulses. kIdle lasts one gate time with no rotation.
enum class Primitive { kIdle, kX, kY, kX90, kXm90, kY90, kYm90 };

std::string_view to_string(Primitive p);
Eigen::Matrix2cd primitive_unitary(Primitive p);

struct CliffordElement {
  Eigen::Matrix2cd unitary;
  int index = 0;
  int primitive_count = 0;
  std::vector<Primitive> decomposition;  // in time order
};

/// The 24-element single-qubit Clifford group with composition and inverse
/// tables. Decompositions are shortest words over {+-X/2, +-Y/2, X, Y}
/// found breadth-first; the identity is one idle primitive.
class CliffordGroup {
 public:
  CliffordGroup();

  std::size_t size() const { return elements_.size(); }
  const CliffordElement& operator[](int i) const { return elements_[i]; }
  std::span<const CliffordElement> elements() const { return elements_; }

  /// Index of the element applying `first` then `second`.
  int compose(int first, int second) const { return table_[first][second]; }
  int inverse(int i) const { return inverse_[i]; }
  /// Index of `u` up to global phase, or -1.
  int find(const Eigen::Matrix2cd& u) const;
  double mean_primitive_count() const { return mean_primitives_; }

 private:
  std::vector<CliffordElement> elements_;
  std::vector<std::array<int, 24>> table_;
  std::vector<int> inverse_;
  double mean_primitives_ = 0.0;
};

const CliffordGroup& clifford_group();

struct RbSequence {
  std::vector<int> indices;
  int recovery = 0;
};

RbSequence rb_sequence(int m, std::uint64_t seed);

enum class NoiseKind { kAmplitudeDampingDephasing, kDepolarizing, kIdentity };

struct NoiseChannel {
  NoiseKind kind = NoiseKind::kIdentity;
  double t_gate = 20e-9;
  double t1 = 0.0;
  double t2 = 0.0;
  double p_depol = 0.0;
};

/// Throws std::invalid_argument for non-CPTP parameters.
void validate(const NoiseChannel& channel);
Eigen::Matrix2cd apply_channel(const NoiseChannel& channel, const Eigen::Matrix2cd& rho);

enum class NoiseApplication { kPerPrimitive, kPerClifford };

struct RbPoint {
  int m = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Survival <0|rho|0> after m random Cliffords plus recovery, averaged over
/// n_seq sequences. Sequence k of length m draws from its own seed stream, so
/// results do not depend on thread count.
std::vector<RbPoint> simulate_rb(const NoiseChannel& channel, std::span<const int> m_list,
                                 int n_seq, std::uint64_t seed,
                                 NoiseApplication mode = NoiseApplication::kPerPrimitive);

/// Fits A p^m + B. Values A, B, p, r_clifford = (1 - p)/2 and
/// f_primitive = 1 - r_clifford / mean_primitives.
FitResult fit_rb(std::span<const RbPoint> table, double mean_primitives = 1.875);

/// Two-level Boltzmann temperature (K) for a residual excited population.
double temperature_bound(double p1_residual, double f_01);
/// Inverse map p1 = 1 / (1 + exp(h f_01 / k_B T)).
double thermal_population(double temperature, double f_01);

struct ThermometryResult {
  double rabi_amp_with_pi = 0.0;
  double rabi_amp_without_pi = 0.0;
  double p1_estimate = 0.0;
};

/// Residual-population thermometry on a three-level transmon: Rabi
/// oscillations on the 1-2 transition with and without a preceding 0-1 pi
/// pulse. Amplitudes are projected out at the known 1-2 Rabi frequency.
ThermometryResult simulate_thermometry(const DeviceParams& params, double p1_thermal,
                                       std::uint64_t seed, double noise_sigma = 0.0);

}  // namespace coaxsim
