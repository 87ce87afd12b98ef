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

#include "coaxsim/benchmarking.hpp"

#include <cmath>
#include <complex>
#include <deque>
#include <random>
#include <stdexcept>

#include "coaxsim/constants.hpp"
#include "coaxsim/parallel.hpp"
#include "coaxsim/transmon.hpp"

namespace coaxsim {

namespace {

using Mat2 = Eigen::Matrix2cd;
using cd = std::complex<double>;

Mat2 rotation(double theta, bool about_x) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Mat2 u;
  if (about_x) {
    u << c, cd(0.0, -s), cd(0.0, -s), c;
  } else {
    u << c, -s, s, c;
  }
  return u;
}

// Equal up to a global phase.
bool same_up_to_phase(const Mat2& a, const Mat2& b, double tol = 1e-10) {
  const cd overlap = (a.adjoint() * b).trace() / 2.0;
  return std::abs(std::abs(overlap) - 1.0) < tol;
}

std::uint64_t stream_seed(std::uint64_t seed, int m, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(k)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::kIdle: return "I";
    case Primitive::kX: return "X";
    case Primitive::kY: return "Y";
    case Primitive::kX90: return "X/2";
    case Primitive::kXm90: return "-X/2";
    case Primitive::kY90: return "Y/2";
    case Primitive::kYm90: return "-Y/2";
  }
  return "?";
}

Mat2 primitive_unitary(Primitive p) {
  const double pi = std::numbers::pi;
  switch (p) {
    case Primitive::kIdle: return Mat2::Identity();
    case Primitive::kX: return rotation(pi, true);
    case Primitive::kY: return rotation(pi, false);
    case Primitive::kX90: return rotation(pi / 2, true);
    case Primitive::kXm90: return rotation(-pi / 2, true);
    case Primitive::kY90: return rotation(pi / 2, false);
    case Primitive::kYm90: return rotation(-pi / 2, false);
  }
  throw std::invalid_argument("unknown primitive");
}

CliffordGroup::CliffordGroup() {
  constexpr std::array<Primitive, 6> gens = {Primitive::kX,   Primitive::kY,    Primitive::kX90,
                                             Primitive::kXm90, Primitive::kY90, Primitive::kYm90};
  CliffordElement id;
  id.unitary = Mat2::Identity();
  id.decomposition = {Primitive::kIdle};
  id.primitive_count = 1;
  elements_.push_back(id);

  // Breadth-first search yields shortest words; the first word to reach an
  // element becomes its canonical decomposition.
  std::deque<std::pair<Mat2, std::vector<Primitive>>> queue;
  queue.emplace_back(Mat2::Identity(), std::vector<Primitive>{});
  while (!queue.empty()) {
    auto [u, word] = queue.front();
    queue.pop_front();
    for (Primitive g : gens) {
      const Mat2 next = primitive_unitary(g) * u;
      if (find(next) >= 0) continue;
      auto w = word;
      w.push_back(g);
      CliffordElement e;
      e.unitary = next;
      e.index = static_cast<int>(elements_.size());
      e.primitive_count = static_cast<int>(w.size());
      e.decomposition = w;
      elements_.push_back(e);
      queue.emplace_back(next, std::move(w));
    }
  }
  if (elements_.size() != 24) throw std::logic_error("Clifford generation did not close at 24");

  table_.resize(24);
  inverse_.assign(24, -1);
  int total = 0;
  for (int a = 0; a < 24; ++a) {
    total += elements_[a].primitive_count;
    for (int b = 0; b < 24; ++b) {
      const int c = find(elements_[b].unitary * elements_[a].unitary);
      if (c < 0) throw std::logic_error("Clifford table not closed");
      table_[a][b] = c;
      if (c == 0) inverse_[a] = b;
    }
  }
  mean_primitives_ = total / 24.0;
}

int CliffordGroup::find(const Mat2& u) const {
  for (const auto& e : elements_) {
    if (same_up_to_phase(e.unitary, u)) return e.index;
  }
  return -1;
}

const CliffordGroup& clifford_group() {
  static const CliffordGroup group;
  return group;
}

RbSequence rb_sequence(int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("rb_sequence: m must be >= 1");
  const auto& group = clifford_group();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 23);
  RbSequence seq;
  seq.indices.reserve(m);
  int net = 0;
  for (int i = 0; i < m; ++i) {
    const int c = pick(rng);
    seq.indices.push_back(c);
    net = group.compose(net, c);
  }
  seq.recovery = group.inverse(net);
  return seq;
}

void validate(const NoiseChannel& ch) {
  switch (ch.kind) {
    case NoiseKind::kIdentity:
      return;
    case NoiseKind::kDepolarizing:
      if (!(ch.p_depol >= 0.0 && ch.p_depol <= 1.0)) {
        throw std::invalid_argument("p_depol must lie in [0, 1]");
      }
      return;
    case NoiseKind::kAmplitudeDampingDephasing:
      if (!(ch.t_gate >= 0.0) || !(ch.t1 > 0.0) || !(ch.t2 > 0.0)) {
        throw std::invalid_argument("channel needs t_gate >= 0 and positive t1, t2");
      }
      if (ch.t2 > 2.0 * ch.t1 * (1.0 + 1e-12)) {
        throw std::invalid_argument("channel needs t2 <= 2 t1");
      }
      return;
  }
}

Mat2 apply_channel(const NoiseChannel& ch, const Mat2& rho) {
  switch (ch.kind) {
    case NoiseKind::kIdentity:
      return rho;
    case NoiseKind::kDepolarizing:
      return (1.0 - ch.p_depol) * rho + ch.p_depol * 0.5 * rho.trace() * Mat2::Identity();
    case NoiseKind::kAmplitudeDampingDephasing: {
      const double decay = std::exp(-ch.t_gate / ch.t1);
      const double coherence = std::exp(-ch.t_gate / ch.t2);
      Mat2 out;
      out(1, 1) = rho(1, 1) * decay;
      out(0, 0) = rho(0, 0) + rho(1, 1) * (1.0 - decay);
      out(0, 1) = rho(0, 1) * coherence;
      out(1, 0) = rho(1, 0) * coherence;
      return out;
    }
  }
  return rho;
}

std::vector<RbPoint> simulate_rb(const NoiseChannel& channel, std::span<const int> m_list,
                                 int n_seq, std::uint64_t seed, NoiseApplication mode) {
  validate(channel);
  if (n_seq < 1) throw std::invalid_argument("simulate_rb: n_seq must be >= 1");
  const auto& group = clifford_group();

  // Primitive unitaries of every element, precomputed once.
  std::vector<std::vector<Mat2>> steps(24);
  for (int c = 0; c < 24; ++c) {
    for (Primitive p : group[c].decomposition) steps[c].push_back(primitive_unitary(p));
  }

  std::vector<RbPoint> table;
  for (int m : m_list) {
    std::vector<double> survival(n_seq);
    parallel_for(static_cast<std::size_t>(n_seq), [&](std::size_t k) {
      const RbSequence seq = rb_sequence(m, stream_seed(seed, m, static_cast<int>(k)));
      Mat2 rho = Mat2::Zero();
      rho(0, 0) = 1.0;
      auto apply = [&](int c) {
        for (const Mat2& u : steps[c]) {
          rho = u * rho * u.adjoint();
          if (mode == NoiseApplication::kPerPrimitive) rho = apply_channel(channel, rho);
        }
        if (mode == NoiseApplication::kPerClifford) rho = apply_channel(channel, rho);
      };
      for (int c : seq.indices) apply(c);
      apply(seq.recovery);
      survival[k] = rho(0, 0).real();
    });
    RbPoint pt;
    pt.m = m;
    double sum = 0.0, sq = 0.0;
    for (double s : survival) sum += s;
    pt.mean = sum / n_seq;
    for (double s : survival) sq += (s - pt.mean) * (s - pt.mean);
    pt.stderr_ = n_seq > 1 ? std::sqrt(sq / (n_seq - 1) / n_seq) : 0.0;
    table.push_back(pt);
  }
  return table;
}

FitResult fit_rb(std::span<const RbPoint> table, double mean_primitives) {
  std::vector<int> ms;
  for (const auto& pt : table) {
    if (std::find(ms.begin(), ms.end(), pt.m) == ms.end()) ms.push_back(pt.m);
  }
  if (ms.size() < 4) throw std::invalid_argument("fit_rb needs >= 4 distinct m values");

  // Initial decay base from the log of the excess over the unital fixed point.
  double p0 = 0.99;
  {
    const RbPoint& a = table.front();
    const RbPoint& b = table.back();
    const double ea = a.mean - 0.5, eb = b.mean - 0.5;
    if (ea > 0.0 && eb > 0.0 && b.m != a.m) {
      p0 = std::exp(std::log(eb / ea) / (b.m - a.m));
      p0 = std::clamp(p0, 0.5, 1.0 - 1e-9);
    }
  }
  const double a0 = (table.front().mean - 0.5) / std::pow(p0, table.front().m);
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(table.size()));
    for (std::size_t k = 0; k < table.size(); ++k) {
      r(static_cast<Eigen::Index>(k)) =
          p(0) * std::pow(p(2), table[k].m) + p(1) - table[k].mean;
    }
    return r;
  };
  Eigen::VectorXd start(3);
  start << a0, 0.5, p0;
  const LmResult lm = levenberg_marquardt(residuals, start);

  FitResult fit;
  const double p = lm.p(2);
  const double r = 0.5 * (1.0 - p);
  fit.add("A", lm.p(0), lm.sigma(0));
  fit.add("B", lm.p(1), lm.sigma(1));
  fit.add("p", p, lm.sigma(2));
  fit.add("r_clifford", r, 0.5 * lm.sigma(2));
  fit.add("f_primitive", 1.0 - r / mean_primitives, 0.5 * lm.sigma(2) / mean_primitives);
  fit.residual_norm = std::sqrt(lm.ssr);
  fit.n_iter = lm.n_iter;
  fit.converged = lm.converged && std::isfinite(fit.residual_norm);
  for (double s : fit.sigmas) fit.converged = fit.converged && std::isfinite(s);
  if (!(p > 0.0 && p <= 1.0)) {
    fit.converged = false;
    fit.note = "decay_base_out_of_range";
  }
  return fit;
}

double temperature_bound(double p1_residual, double f_01) {
  if (!(p1_residual > 0.0 && p1_residual < 0.5)) {
    throw std::invalid_argument("temperature_bound: p1 must lie in (0, 0.5)");
  }
  if (!(f_01 > 0.0)) throw std::invalid_argument("temperature_bound: f_01 must be positive");
  return kPlanck * f_01 / kBoltzmann / std::log((1.0 - p1_residual) / p1_residual);
}

double thermal_population(double temperature, double f_01) {
  if (temperature <= 0.0) return 0.0;
  return 1.0 / (1.0 + std::exp(kPlanck * f_01 / (kBoltzmann * temperature)));
}

ThermometryResult simulate_thermometry(const DeviceParams& params, double p1_thermal,
                                       std::uint64_t seed, double noise_sigma) {
  if (!(p1_thermal >= 0.0 && p1_thermal <= 0.3)) {
    throw std::invalid_argument("simulate_thermometry: p1_thermal must lie in [0, 0.3]");
  }
  // Boltzmann populations of the lowest three levels at the temperature
  // implied by p1 relative to p0.
  const auto lines = transition_frequencies(diagonalize_transmon(params.e_j, params.e_c));
  double p0 = 1.0 - p1_thermal, p2 = 0.0;
  if (p1_thermal > 0.0) {
    for (int it = 0; it < 50; ++it) {
      const double ratio = p1_thermal / p0;
      p2 = p1_thermal * std::pow(ratio, lines.f_12 / lines.f_01);
      p0 = 1.0 - p1_thermal - p2;
    }
  }

  // f_12 Rabi oscillations of the level-2 population. A 0-1 pi pulse first
  // swaps p0 and p1.
  constexpr int kSamples = 201;
  const double omega = kTwoPi * 10e6;
  const double t_max = 1e-6;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto amplitude = [&](double lower, double upper) {
    Eigen::MatrixXd basis(kSamples, 2);
    Eigen::VectorXd signal(kSamples);
    for (int k = 0; k < kSamples; ++k) {
      const double t = t_max * k / (kSamples - 1);
      const double c = std::cos(omega * t);
      basis(k, 0) = 1.0;
      basis(k, 1) = c;
      signal(k) = upper + 0.5 * (lower - upper) * (1.0 - c);
      if (noise_sigma > 0.0) signal(k) += noise_sigma * normal(rng);
    }
    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(signal);
    return std::abs(coef(1));
  };
  ThermometryResult out;
  out.rabi_amp_without_pi = amplitude(p1_thermal, p2);
  out.rabi_amp_with_pi = amplitude(p0, p2);
  const double total = out.rabi_amp_with_pi + out.rabi_amp_without_pi;
  out.p1_estimate = total > 0.0 ? out.rabi_amp_without_pi / total : 0.0;
  return out;
}

}  // namespace coaxsim
