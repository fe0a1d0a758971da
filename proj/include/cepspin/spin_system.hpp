#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cepspin/constants.hpp"
#include "cepspin/pulse.hpp"

namespace cepspin {

using Mat3 = Eigen::Matrix3cd;
using Amplitudes = Eigen::Vector2cd;  // (upper C_a, lower C_b)

// Basis convention used repo-wide: index 0 <-> m_F = +1, 1 <-> m_F = 0,
// 2 <-> m_F = -1.

inline Mat3 maximally_mixed() { return Mat3::Identity() / 3.0; }

// Optically pumped start: all population in m_F = +1.
inline Mat3 pumped_initial_state() {
  Mat3 r = Mat3::Zero();
  r(0, 0) = 1.0;
  return r;
}

struct DensityCheck {
  double hermiticity_violation = 0.0;  // max elementwise |rho - rho^dagger|
  double trace_error = 0.0;            // |tr rho - 1|
  double min_eigenvalue = 0.0;         // of the hermitized matrix

  bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10,
          double eig_floor = -1e-8) const {
    return hermiticity_violation <= herm_tol && trace_error <= trace_tol &&
           min_eigenvalue >= eig_floor;
  }
};

inline DensityCheck check_density(const Mat3& rho) {
  DensityCheck c;
  const Mat3 diff = rho - rho.adjoint().eval();
  c.hermiticity_violation = diff.cwiseAbs().maxCoeff();
  c.trace_error = std::abs(rho.trace() - std::complex<double>(1.0, 0.0));
  const Mat3 herm = 0.5 * (rho + rho.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat3> es(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

// Static field, relaxation and equilibrium state of the F=1 ground manifold.
struct SpinSystem {
  double b0 = 0.0;  // tesla, longitudinal static field (>= 0)
  double g = constants::lande_g;
  double mu_bohr = constants::bohr_magneton;
  double hbar = constants::hbar;
  double gamma = 0.0;  // 1/s
  Mat3 rho_eq = maximally_mixed();

  void validate() const {
    if (b0 < 0.0) throw std::domain_error("SpinSystem: b0 must be >= 0");
    if (gamma < 0.0) throw std::domain_error("SpinSystem: gamma must be >= 0");
    if (!(hbar > 0.0) || !(mu_bohr > 0.0))
      throw std::domain_error("SpinSystem: hbar and mu_bohr must be positive");
    if (g == 0.0) throw std::domain_error("SpinSystem: g must be nonzero");
    if (!check_density(rho_eq).ok())
      throw std::domain_error("SpinSystem: rho_eq is not a valid density matrix");
  }

  // b0 chosen so the adjacent-sublevel splitting equals omega.
  static SpinSystem for_splitting(double omega, double gamma = 0.0) {
    if (omega < 0.0) throw std::domain_error("SpinSystem: splitting must be >= 0");
    SpinSystem s;
    s.b0 = s.hbar * omega / (std::abs(s.g) * s.mu_bohr);
    s.gamma = gamma;
    return s;
  }

  SpinSystem with_splitting(double omega) const {
    if (omega < 0.0) throw std::domain_error("SpinSystem: splitting must be >= 0");
    SpinSystem s = *this;
    s.b0 = hbar * omega / (std::abs(g) * mu_bohr);
    return s;
  }
};

// omega = |g| mu B0 / hbar, the adjacent Zeeman splitting (rad/s).
inline double zeeman_splitting(const SpinSystem& s) {
  return std::abs(s.g) * s.mu_bohr * s.b0 / s.hbar;
}

// F=1 Zeeman Hamiltonian (joules) in the (+1, 0, -1) basis:
//
//   H = -g mu ( B_z         B_x/sqrt2   0
//               B_x/sqrt2   0           B_x/sqrt2
//               0           B_x/sqrt2  -B_z )
//
// with B_z static and B_x the pulse field (B_y = 0). Hermitian and traceless
// by construction; the corner elements vanish (no direct |dm| = 2 coupling).
inline Mat3 hamiltonian(double t, const SpinSystem& s, const PulseParams& p) {
  const double c = -s.g * s.mu_bohr;
  const double diag = c * s.b0;
  const double off = c * field_amplitude(t, p) / std::sqrt(2.0);
  Mat3 h;
  h << diag, off, 0.0,
       off, 0.0, off,
       0.0, off, -diag;
  return h;
}

}  // namespace cepspin
