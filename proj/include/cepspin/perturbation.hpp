#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cepspin/constants.hpp"
#include "cepspin/errors.hpp"
#include "cepspin/pulse.hpp"
#include "cepspin/quadrature.hpp"
#include "cepspin/spin_system.hpp"

namespace cepspin {

// Leading-order excitation amplitudes of the two interfering pathways.
struct PathAmplitudes {
  std::complex<double> one_photon;
  std::complex<double> three_photon;
  std::complex<double> total;  // one_photon + three_photon, exactly
};

// One-photon amplitude, rotating-wave closed form:
//   i (sqrt(pi)/alpha) Omega2 exp(-[(omega-nu2)/2 alpha]^2) e^{-i phi2}
// Magnitude is phi2-independent; the phase is pi/2 - phi2 (for Omega2 > 0).
inline std::complex<double> one_photon_closed(double omega, const PulseParams& p,
                                              const RabiPair& r) {
  const double x = (omega - p.nu2) / (2.0 * p.alpha);
  const std::complex<double> i(0.0, 1.0);
  return i * (std::sqrt(units::pi) / p.alpha) * r.omega2 * std::exp(-x * x) *
         std::exp(-i * p.phi2);
}

// Three-photon amplitude, closed form:
//   -i sqrt(pi) / (2 sqrt(3) alpha nu1 (omega - nu1)) * Omega1^3
//      * exp(-(omega - 3 nu1)^2 / (12 alpha^2)) e^{-3 i phi1}
// Gaussian centered at 3 nu1, sqrt(3) wider than the one-photon line. The
// form has a pole at omega = nu1 where its derivation breaks down; inside
// the guard band the call is refused instead of regularized.
inline std::complex<double> three_photon_closed(double omega, const PulseParams& p,
                                                const RabiPair& r,
                                                double pole_guard_rel = 1e-6) {
  const double det = omega - p.nu1;
  if (std::abs(det) < pole_guard_rel * p.nu1)
    throw PoleError("three_photon_closed: omega inside the guard band around nu1");
  if (det == 0.0) throw PoleError("three_photon_closed: omega equals nu1");
  const double d3 = omega - 3.0 * p.nu1;
  const double pref =
      std::sqrt(units::pi) / (2.0 * std::sqrt(3.0) * p.alpha * p.nu1 * det);
  const std::complex<double> i(0.0, 1.0);
  return -i * pref * (r.omega1 * r.omega1 * r.omega1) *
         std::exp(-d3 * d3 / (12.0 * p.alpha * p.alpha)) * std::exp(-3.0 * i * p.phi1);
}

inline PathAmplitudes total_amplitude(double omega, const PulseParams& p,
                                      const RabiPair& r, double pole_guard_rel = 1e-6) {
  PathAmplitudes a;
  a.one_photon = one_photon_closed(omega, p, r);
  a.three_photon = three_photon_closed(omega, p, r, pole_guard_rel);
  a.total = a.one_photon + a.three_photon;
  return a;
}

namespace detail {

inline int oscillation_panels(double omega, const PulseParams& p, double window) {
  const double w_fast = std::abs(omega) + std::max(p.nu1, p.nu2);
  const double periods = w_fast * window / (2.0 * units::pi);
  const double panels = std::max(16.0, 4.0 * std::ceil(periods));
  return static_cast<int>(std::min(panels, 4.0e6));
}

}  // namespace detail

// Defining integral of the one-photon amplitude,
//   i * integral Omega(t) e^{i omega t} dt
// over [-t_cut, t_cut], by adaptive quadrature with both carriers and both
// rotating/counter-rotating terms retained. Absolute error target is
// tol_rel * sqrt(pi) (|Omega1| + |Omega2|) / alpha.
inline std::complex<double> one_photon_quadrature(double omega, const PulseParams& p,
                                                  const RabiPair& r,
                                                  double t_cut_multiple = 4.0,
                                                  double tol_rel = 1e-10) {
  const double scale = std::sqrt(units::pi) * (std::abs(r.omega1) + std::abs(r.omega2)) / p.alpha;
  if (scale == 0.0) return 0.0;
  const double t_cut = t_cut_multiple * p.fwhm;
  const std::complex<double> i(0.0, 1.0);
  auto f = [&](double t) {
    return i * rabi_frequency(t, p, r) * std::exp(i * (omega * t));
  };
  const int panels = detail::oscillation_panels(omega, p, 2.0 * t_cut);
  return integrate_adaptive(f, -t_cut, t_cut, tol_rel * scale, panels);
}

// Brute-force three-photon amplitude: the full nested triple integral
//
//   -i * I3,  I3 = int dt Om(t) e^{iwt} int^t dt'' Om*(t'') e^{-iwt''}
//                       int^{t''} dt' Om(t') e^{iwt'}
//
// evaluated with cumulative inner integrals tabulated once on a shared
// uniform grid (no rotating-wave approximation, both carriers kept). The
// grid resolves the fastest oscillation with >= points_per_period samples
// per 2 pi / (omega + max(nu1, nu2)).
inline std::complex<double> three_photon_quadrature(double omega, const PulseParams& p,
                                                    const RabiPair& r,
                                                    double t_cut_multiple = 4.0,
                                                    int points_per_period = 160) {
  if (points_per_period < 40) points_per_period = 40;
  const double t_cut = t_cut_multiple * p.fwhm;
  const double w_fast = std::abs(omega) + std::max(p.nu1, p.nu2);
  const double periods = std::max(1.0, w_fast * 2.0 * t_cut / (2.0 * units::pi));
  const double n_req = periods * static_cast<double>(points_per_period);
  if (n_req > 8.0e7)
    throw QuadratureError("three_photon_quadrature: grid of " +
                          std::to_string(static_cast<long long>(n_req)) +
                          " points exceeds the resolution budget");
  const std::size_t n = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(n_req)), 4000) + 1;
  const double dt = 2.0 * t_cut / static_cast<double>(n - 1);
  const std::complex<double> i(0.0, 1.0);

  std::vector<std::complex<double>> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = -t_cut + dt * static_cast<double>(k);
    g[k] = rabi_frequency(t, p, r) * std::exp(i * (omega * t));
  }
  const auto f1 = cumulative_integral(g, dt);

  std::vector<std::complex<double>> g2(n);
  for (std::size_t k = 0; k < n; ++k) g2[k] = std::conj(g[k]) * f1[k];
  const auto f2 = cumulative_integral(g2, dt);

  std::vector<std::complex<double>> g3(n);
  for (std::size_t k = 0; k < n; ++k) g3[k] = g[k] * f2[k];
  const auto f3 = cumulative_integral(g3, dt);

  return -i * f3.back();
}

// Peak magnitude of the three-photon line (including the 1/(omega - nu1)
// skew), located by ternary search around 3 nu1.
inline double three_photon_peak_magnitude(const PulseParams& p, const RabiPair& r) {
  double lo = 3.0 * p.nu1 - 10.0 * p.alpha;
  double hi = 3.0 * p.nu1 + 10.0 * p.alpha;
  lo = std::max(lo, p.nu1 * (1.0 + 1e-3));
  auto mag = [&](double w) { return std::abs(three_photon_closed(w, p, r)); };
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (mag(m1) < mag(m2)) lo = m1; else hi = m2;
  }
  return mag(0.5 * (lo + hi));
}

// b2 that equalizes the one-photon peak amplitude with the three-photon peak
// amplitude (maximum interference visibility for the given b1).
inline double visibility_matched_b2(const PulseParams& p, const SpinSystem& sys) {
  const RabiPair r = rabi_pair(p, sys.g, sys.mu_bohr, sys.hbar);
  const double c3_peak = three_photon_peak_magnitude(p, r);
  const double omega2_mag = c3_peak * p.alpha / std::sqrt(units::pi);
  const double k = std::abs(sys.g) * sys.mu_bohr / (2.0 * std::sqrt(2.0) * sys.hbar);
  return omega2_mag / k;
}

}  // namespace cepspin
