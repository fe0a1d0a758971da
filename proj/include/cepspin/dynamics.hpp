#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cepspin/constants.hpp"
#include "cepspin/integrator.hpp"
#include "cepspin/pulse.hpp"
#include "cepspin/spin_system.hpp"

namespace cepspin {

template <class State>
struct Trajectory {
  std::vector<double> times;   // strictly increasing, endpoints at -/+ t_cut
  std::vector<State> states;   // one per time
  State final_state;
  StepStats stats;
};

using DensityTrajectory = Trajectory<Mat3>;
using AmplitudeTrajectory = Trajectory<Amplitudes>;

// d rho / dt = -(i/hbar) [H(t), rho] - Gamma (rho - rho_eq)
inline Mat3 liouville_rhs(const Mat3& rho, double t, const SpinSystem& sys,
                          const PulseParams& p) {
  const Mat3 h = hamiltonian(t, sys, p);
  const std::complex<double> minus_i_over_hbar(0.0, -1.0 / sys.hbar);
  Mat3 out = minus_i_over_hbar * (h * rho - rho * h).eval();
  if (sys.gamma != 0.0) out -= sys.gamma * (rho - sys.rho_eq);
  return out;
}

namespace detail {

inline std::vector<double> sample_grid(double t0, double t1, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
  g.back() = t1;
  return g;
}

// Carrier-resolving cap: at most 1/20th of the fastest relevant period.
// omega is the Larmor/two-level splitting; only carriers with nonzero
// amplitude count.
inline double oscillation_cap(const PulseParams& p, double omega) {
  double nu = 0.0;
  if (p.b1 > 0.0) nu = std::max(nu, p.nu1);
  if (p.b2 > 0.0) nu = std::max(nu, p.nu2);
  const double w_fast = std::abs(omega) + nu;
  if (w_fast <= 0.0) return std::numeric_limits<double>::infinity();
  return (2.0 * units::pi / w_fast) / 20.0;
}

template <class State, class Rhs>
Trajectory<State> run(Rhs&& rhs, const IntegratorConfig& cfg, double t_cut,
                      double step_cap, const State& init) {
  auto grid = sample_grid(-t_cut, t_cut, cfg.samples);
  IntegrationResult<State> r =
      (cfg.mode == StepMode::adaptive)
          ? integrate_dopri5(rhs, -t_cut, t_cut, init, grid, cfg.rel_tol,
                             cfg.abs_tol, std::min(cfg.max_step, step_cap))
          : integrate_rk4_sampled(rhs, -t_cut, t_cut, init, grid, cfg.fixed_step);
  Trajectory<State> traj;
  traj.times = std::move(grid);
  traj.states = std::move(r.samples);
  traj.final_state = r.final_state;
  traj.stats = r.stats;
  return traj;
}

}  // namespace detail

// Integrates the density-matrix equation in the lab frame (no rotating-wave
// approximation) over [-t_cut, +t_cut]; strong-drive resonance shifts emerge
// from the dynamics. Hermiticity/trace of the result are the caller's to
// re-check (never re-imposed here); see check_density.
inline DensityTrajectory evolve_density(const SpinSystem& sys, const PulseParams& p,
                                        const IntegratorConfig& cfg,
                                        const Mat3& rho_init) {
  cfg.validate();
  sys.validate();
  if (!check_density(rho_init).ok())
    throw std::domain_error("evolve_density: rho_init is not a valid density matrix");
  const double t_cut = cfg.t_cut_multiple * p.fwhm;
  const double cap = detail::oscillation_cap(p, zeeman_splitting(sys));
  auto rhs = [&sys, &p](double t, const Mat3& rho) { return liouville_rhs(rho, t, sys, p); };
  return detail::run(rhs, cfg, t_cut, cap, rho_init);
}

// Two-level probability amplitudes (upper C_a, lower C_b):
//   dC_a/dt =  i Omega(t) e^{+i omega t} C_b
//   dC_b/dt =  i Omega*(t) e^{-i omega t} C_a
// Omega(t) is real-valued; the conjugate is kept in the code structure.
inline AmplitudeTrajectory evolve_two_level(double omega, const PulseParams& p,
                                            const RabiPair& rabi,
                                            const IntegratorConfig& cfg,
                                            const Amplitudes& init) {
  cfg.validate();
  const double norm0 = std::norm(init(0)) + std::norm(init(1));
  if (std::abs(norm0 - 1.0) > 1e-9)
    throw std::domain_error("evolve_two_level: initial amplitudes must be normalized");
  const double t_cut = cfg.t_cut_multiple * p.fwhm;
  const double cap = detail::oscillation_cap(p, omega);
  auto rhs = [omega, &p, &rabi](double t, const Amplitudes& c) {
    const std::complex<double> om(rabi_frequency(t, p, rabi), 0.0);
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, omega * t));
    Amplitudes d;
    d(0) = std::complex<double>(0.0, 1.0) * om * phase * c(1);
    d(1) = std::complex<double>(0.0, 1.0) * std::conj(om) * std::conj(phase) * c(0);
    return d;
  };
  return detail::run(rhs, cfg, t_cut, cap, init);
}

}  // namespace cepspin
