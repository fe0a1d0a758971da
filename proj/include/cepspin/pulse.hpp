#pragma once

#include <cmath>
#include <stdexcept>

#include "cepspin/constants.hpp"

namespace cepspin {

// alpha = 2 sqrt(ln 2) / T, with T the FWHM of the field envelope.
inline double alpha_from_fwhm(double fwhm) {
  if (!(fwhm > 0.0)) throw std::domain_error("alpha_from_fwhm: fwhm must be positive");
  return 2.0 * std::sqrt(std::log(2.0)) / fwhm;
}

// Linearly polarized bichromatic Gaussian pulse
//
//   B_x(t) = exp(-alpha^2 t^2) [ b1 cos(nu1 t + phi1) + b2 cos(nu2 t + phi2) ],
//   B_y = 0.
//
// Carriers are angular frequencies; phases are stored unwrapped (adding 2*pi
// to a phase must not change any downstream observable). alpha is derived
// from fwhm at construction and kept consistent with it. nu = 0 is accepted
// here so the degenerate pure-Gaussian case stays testable; the config layer
// requires strictly positive carriers.
struct PulseParams {
  double nu1, nu2;    // rad/s
  double phi1, phi2;  // rad
  double b1, b2;      // tesla
  double fwhm;        // s
  double alpha;       // 1/s (derived)

  PulseParams(double nu1_, double nu2_, double phi1_, double phi2_,
              double b1_, double b2_, double fwhm_)
      : nu1(nu1_), nu2(nu2_), phi1(phi1_), phi2(phi2_), b1(b1_), b2(b2_),
        fwhm(fwhm_), alpha(alpha_from_fwhm(fwhm_)) {
    if (nu1 < 0.0 || nu2 < 0.0)
      throw std::domain_error("PulseParams: carrier frequencies must be >= 0");
    if (b1 < 0.0 || b2 < 0.0)
      throw std::domain_error("PulseParams: field amplitudes must be >= 0");
  }

  PulseParams with_phi2(double new_phi2) const {
    PulseParams p = *this;
    p.phi2 = new_phi2;
    return p;
  }
};

// Shared Gaussian envelope; the field and the Rabi frequency carry exactly
// this one factor (no squaring anywhere).
inline double envelope(double t, const PulseParams& p) {
  const double at = p.alpha * t;
  return std::exp(-at * at);
}

inline double field_amplitude(double t, const PulseParams& p) {
  return envelope(t, p) * (p.b1 * std::cos(p.nu1 * t + p.phi1) +
                           p.b2 * std::cos(p.nu2 * t + p.phi2));
}

// Signed per-carrier Rabi amplitudes, Omega_i = g mu B_i / (2 sqrt(2) hbar).
// g < 0 makes these negative; they are never silently absolute-valued.
struct RabiPair {
  double omega1 = 0.0;  // rad/s
  double omega2 = 0.0;  // rad/s
};

// The b -> Omega conversion happens here exactly once; dynamics and
// perturbation consume RabiPair as-is.
inline RabiPair rabi_pair(const PulseParams& p, double g, double mu_bohr, double hbar) {
  const double k = g * mu_bohr / (2.0 * std::sqrt(2.0) * hbar);
  return {k * p.b1, k * p.b2};
}

// Omega(t) = 2 exp(-alpha^2 t^2) [ Omega1 cos(nu1 t + phi1) + Omega2 cos(nu2 t + phi2) ]
inline double rabi_frequency(double t, const PulseParams& p, const RabiPair& r) {
  return 2.0 * envelope(t, p) * (r.omega1 * std::cos(p.nu1 * t + p.phi1) +
                                 r.omega2 * std::cos(p.nu2 * t + p.phi2));
}

// Upper bound |Omega(t)| <= 2 (|Omega1| + |Omega2|); used for weak-drive guards.
inline double rabi_peak_bound(const RabiPair& r) {
  return 2.0 * (std::abs(r.omega1) + std::abs(r.omega2));
}

}  // namespace cepspin
