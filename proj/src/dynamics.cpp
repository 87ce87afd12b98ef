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

#include "coaxsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>

#include "coaxsim/constants.hpp"
#include "coaxsim/rk4.hpp"

namespace coaxsim {

namespace {

constexpr cplx kI{0.0, 1.0};

double kappa_angular(const DeviceParams& p) {
  if (!(p.q_factor > 0.0)) throw std::invalid_argument("q_factor must be positive");
  return kTwoPi * p.f_r0 / p.q_factor;
}

double gamma1(const DeviceParams& p) {
  if (!(p.t1 > 0.0)) throw std::invalid_argument("t1 must be positive");
  return 1.0 / p.t1;
}

cplx drive_at(const CavityDrive& drive, double t) {
  return drive.envelope ? drive.envelope(t) : cplx{};
}

// Output spacing of a uniform axis, validated.
double axis_step(std::span<const double> t_axis) {
  if (t_axis.size() < 2) return 0.0;
  const double dt = t_axis[1] - t_axis[0];
  if (!(dt > 0.0)) throw std::invalid_argument("t_axis must be increasing");
  for (std::size_t k = 2; k < t_axis.size(); ++k) {
    const double step = t_axis[k] - t_axis[k - 1];
    if (std::abs(step - dt) > 1e-6 * dt) {
      throw std::invalid_argument("t_axis must be uniformly sampled");
    }
  }
  return dt;
}

int resolve_substeps(double dt_out, double max_step, int substeps) {
  if (substeps < 0) throw std::invalid_argument("substeps must be >= 0");
  if (dt_out == 0.0) return 1;
  if (substeps == 0) {
    return std::max(1, static_cast<int>(std::ceil(dt_out / max_step - 1e-9)));
  }
  if (dt_out / substeps > max_step * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "integration step " << dt_out / substeps << " s exceeds the bound "
        << max_step << " s";
    throw std::invalid_argument(msg.str());
  }
  return substeps;
}

}  // namespace

double drive_detuning(const DeviceParams& params, double f_drive) {
  return kTwoPi * (params.f_r0 + params.chi - f_drive);
}

CavityDrive rectangular_drive(const DeviceParams& params, cplx epsilon, double f_drive,
                              double t_on, double t_off) {
  CavityDrive d;
  d.detuning = drive_detuning(params, f_drive);
  d.envelope = [epsilon, t_on, t_off](double t) {
    return (t >= t_on && t <= t_off) ? epsilon : cplx{};
  };
  return d;
}

double max_cavity_bloch_step(const DeviceParams& params, double detuning) {
  const double rate = std::max({std::abs(detuning), kappa_angular(params),
                                std::abs(kTwoPi * params.chi)});
  return rate > 0.0 ? 1.0 / (50.0 * rate) : 1e-9;
}

std::vector<double> uniform_axis(double t0, double dt, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = t0 + dt * static_cast<double>(k);
  return t;
}

std::vector<CavityBlochState> integrate_cavity_bloch(const DeviceParams& params,
                                                     const CavityDrive& drive,
                                                     const CavityBlochState& init,
                                                     std::span<const double> t_axis,
                                                     int substeps) {
  if (t_axis.empty()) throw std::invalid_argument("t_axis is empty");
  if (std::abs(t_axis[0] - init.t) > 1e-15 + 1e-9 * std::abs(init.t)) {
    throw std::invalid_argument("t_axis must start at the initial state's time");
  }
  const double kappa = kappa_angular(params);
  const double g1 = gamma1(params);
  const double x = kTwoPi * params.chi;
  const double delta = drive.detuning;
  const double dt_out = axis_step(t_axis);
  const int n_sub = resolve_substeps(dt_out, max_cavity_bloch_step(params, delta), substeps);
  const double h = dt_out / n_sub;

  auto rhs = [&](double t, const Eigen::Vector3cd& y) {
    const cplx eps = drive_at(drive, t);
    const cplx a = y(0), sz = y(1), asz = y(2);
    Eigen::Vector3cd dy;
    dy(0) = -kI * delta * a - kI * x * asz - kI * eps - 0.5 * kappa * a;
    dy(1) = -g1 * (1.0 + sz);
    dy(2) = -kI * delta * asz - kI * x * a - kI * eps * sz - (0.5 * kappa + g1) * asz -
            g1 * a;
    return dy;
  };

  std::vector<CavityBlochState> out;
  out.reserve(t_axis.size());
  Eigen::Vector3cd y(init.a, cplx(init.sz, 0.0), init.asz);
  out.push_back({init.a, init.sz, init.asz, t_axis[0]});
  for (std::size_t k = 1; k < t_axis.size(); ++k) {
    double t = t_axis[k - 1];
    for (int s = 0; s < n_sub; ++s) {
      y = rk4_step(rhs, t, y, h);
      t += h;
    }
    if (!y.allFinite()) throw std::runtime_error("NaN during Cavity-Bloch integration");
    CavityBlochState st{y(0), y(1).real(), y(2), t_axis[k]};
    if (std::abs(st.sz) > 1.0 + 1e-9) {
      throw std::runtime_error("<sz> left [-1, 1] during Cavity-Bloch integration");
    }
    out.push_back(st);
  }
  return out;
}

Eigen::MatrixXcd product_density(int fock_cutoff, double excited_population) {
  if (fock_cutoff < 2) throw std::invalid_argument("fock_cutoff must be >= 2");
  if (!(excited_population >= 0.0 && excited_population <= 1.0)) {
    throw std::invalid_argument("excited population must lie in [0, 1]");
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2 * fock_cutoff, 2 * fock_cutoff);
  rho(0, 0) = 1.0 - excited_population;
  rho(1, 1) = excited_population;
  return rho;
}

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

cplx trace_product(const SpMat& op, const Eigen::MatrixXcd& rho) {
  cplx acc{};
  for (int col = 0; col < op.outerSize(); ++col) {
    for (SpMat::InnerIterator it(op, col); it; ++it) acc += it.value() * rho(it.col(), it.row());
  }
  return acc;
}

}  // namespace

std::vector<ExpectationRecord> lindblad_reference(const DeviceParams& params,
                                                  const CavityDrive& drive,
                                                  const Eigen::MatrixXcd& rho0,
                                                  std::span<const double> t_axis,
                                                  int fock_cutoff, int substeps) {
  if (t_axis.empty()) throw std::invalid_argument("t_axis is empty");
  if (fock_cutoff < 2) throw std::invalid_argument("fock_cutoff must be >= 2");
  const int dim = 2 * fock_cutoff;
  if (rho0.rows() != dim || rho0.cols() != dim) {
    throw std::invalid_argument("rho0 dimension does not match 2 * fock_cutoff");
  }
  const double kappa = kappa_angular(params);
  const double g1 = gamma1(params);
  const double x = kTwoPi * params.chi;
  const double delta = drive.detuning;

  std::vector<Eigen::Triplet<cplx>> ta, tm, tsz;
  Eigen::VectorXcd h0(dim);
  for (int n = 0; n < fock_cutoff; ++n) {
    for (int q = 0; q < 2; ++q) {
      const int i = 2 * n + q;
      const double sz = q == 1 ? 1.0 : -1.0;
      h0(i) = delta * n + x * n * sz;
      tsz.emplace_back(i, i, sz);
      if (n > 0) ta.emplace_back(2 * (n - 1) + q, i, std::sqrt(static_cast<double>(n)));
    }
    tm.emplace_back(2 * n, 2 * n + 1, 1.0);
  }
  SpMat a(dim, dim), sm(dim, dim), sz(dim, dim);
  a.setFromTriplets(ta.begin(), ta.end());
  sm.setFromTriplets(tm.begin(), tm.end());
  sz.setFromTriplets(tsz.begin(), tsz.end());
  const SpMat ad = a.adjoint();
  const SpMat sp = sm.adjoint();
  const SpMat num = ad * a;
  const SpMat excited = sp * sm;
  const SpMat asz = a * sz;

  auto rhs = [&](double t, const Eigen::MatrixXcd& rho) {
    const cplx eps = drive_at(drive, t);
    // H rho, with H = diag(h0) + eps a^dag + eps^* a
    Eigen::MatrixXcd m = h0.asDiagonal() * rho;
    if (eps != cplx{}) m += eps * (ad * rho) + std::conj(eps) * (a * rho);
    Eigen::MatrixXcd d = -kI * (m - m.adjoint());

    const Eigen::MatrixXcd arho = a * rho;
    const Eigen::MatrixXcd nrho = num * rho;
    d += kappa * (arho * ad) - 0.5 * kappa * (nrho + nrho.adjoint());

    const Eigen::MatrixXcd srho = sm * rho;
    const Eigen::MatrixXcd erho = excited * rho;
    d += g1 * (srho * sp) - 0.5 * g1 * (erho + erho.adjoint());
    return d;
  };

  const double dt_out = axis_step(t_axis);
  const int n_sub = resolve_substeps(dt_out, max_cavity_bloch_step(params, delta), substeps);
  const double h = dt_out / n_sub;

  auto record = [&](const Eigen::MatrixXcd& rho) {
    double top = 0.0;
    for (int q = 0; q < 2; ++q) top += rho(dim - 2 + q, dim - 2 + q).real();
    if (top > 1e-6) {
      std::ostringstream msg;
      msg << "Fock truncation violated (top level population " << top
          << "); increase fock_cutoff";
      throw std::runtime_error(msg.str());
    }
    return ExpectationRecord{trace_product(a, rho), trace_product(sz, rho).real(),
                             trace_product(asz, rho)};
  };

  std::vector<ExpectationRecord> out;
  out.reserve(t_axis.size());
  Eigen::MatrixXcd rho = rho0;
  out.push_back(record(rho));
  for (std::size_t k = 1; k < t_axis.size(); ++k) {
    double t = t_axis[k - 1];
    for (int s = 0; s < n_sub; ++s) {
      rho = rk4_step(rhs, t, rho, h);
      t += h;
    }
    if (!rho.allFinite()) throw std::runtime_error("NaN during master-equation integration");
    out.push_back(record(rho));
  }
  return out;
}

double steady_state_photons(const DeviceParams& params, cplx epsilon, double detuning) {
  const double half_kappa = 0.5 * kappa_angular(params);
  const double eff = detuning - kTwoPi * params.chi;
  return std::norm(epsilon) / (half_kappa * half_kappa + eff * eff);
}

double readout_epsilon(const DeviceParams& params, const ReadoutPulse& pulse) {
  const double nbar = pulse.ref_nbar * std::pow(10.0, (pulse.power_dbm - pulse.ref_power_dbm) / 10.0);
  return 0.5 * kappa_angular(params) * std::sqrt(nbar);
}

IQTrace measurement_trace(const DeviceParams& params, double excited_population,
                          const ReadoutPulse& pulse, cplx interference_offset) {
  if (!(pulse.length > 0.0)) throw std::invalid_argument("readout length must be positive");
  if (!(pulse.sample_interval > 0.0)) {
    throw std::invalid_argument("readout sample interval must be positive");
  }
  if (!(excited_population >= 0.0 && excited_population <= 1.0)) {
    throw std::invalid_argument("excited population must lie in [0, 1]");
  }
  const double f_drive = pulse.frequency > 0.0 ? pulse.frequency : params.f_r0;
  const std::size_t n =
      static_cast<std::size_t>(std::llround(pulse.length / pulse.sample_interval)) + 1;
  const std::vector<double> t = uniform_axis(0.0, pulse.sample_interval, n);
  const CavityDrive drive = rectangular_drive(params, readout_epsilon(params, pulse),
                                              f_drive, 0.0, t.back());
  CavityBlochState init;
  init.sz = 2.0 * excited_population - 1.0;
  const auto states = integrate_cavity_bloch(params, drive, init, t);

  IQTrace trace;
  trace.t_axis = t;
  trace.s.reserve(n);
  for (const auto& st : states) trace.s.push_back(st.a + interference_offset);
  std::ostringstream p;
  p.precision(17);
  p << excited_population;
  trace.meta["excited_population"] = p.str();
  return trace;
}

PopulationEstimate extract_population(const IQTrace& trace, const IQTrace& cal0,
                                      const IQTrace& cal1) {
  const std::size_t n = trace.s.size();
  if (cal0.s.size() != n || cal1.s.size() != n || trace.t_axis.size() != n ||
      cal0.t_axis.size() != n || cal1.t_axis.size() != n) {
    throw std::invalid_argument("trace and calibrations must share the time axis");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double tol = 1e-9 * std::max(1e-12, std::abs(trace.t_axis[k]));
    if (std::abs(cal0.t_axis[k] - trace.t_axis[k]) > tol ||
        std::abs(cal1.t_axis[k] - trace.t_axis[k]) > tol) {
      throw std::invalid_argument("trace and calibrations must share the time axis");
    }
  }
  double den = 0.0, scale = 0.0, num = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx d = cal1.s[k] - cal0.s[k];
    den += std::norm(d);
    scale += std::norm(cal0.s[k]) + std::norm(cal1.s[k]);
    num += ((trace.s[k] - cal0.s[k]) * std::conj(d)).real();
  }
  if (!(den > 1e-20 * scale) || den == 0.0) {
    throw std::invalid_argument("degenerate calibration: cal1 and cal0 coincide");
  }
  PopulationEstimate est;
  est.raw = num / den;
  est.p1 = std::clamp(est.raw, -0.05, 1.05);
  est.clamped = est.p1 != est.raw;
  return est;
}

}  // namespace coaxsim
