#pragma once

namespace cepspin {

// CODATA 2018 values. Overridable per SpinSystem for natural-unit tests.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double bohr_magneton = 9.2740100783e-24; // J/T
inline constexpr double lande_g = -0.5;                   // F=1 ground state
}  // namespace constants

// Core quantities are strict SI: angular frequencies in rad/s, times in s,
// fields in tesla. Config files speak kHz / degrees / microseconds /
// microtesla; these helpers are the only conversion boundary.
namespace units {
inline constexpr double pi = 3.14159265358979323846;

inline constexpr double khz_to_rad_s(double f_khz) { return 2.0 * pi * 1e3 * f_khz; }
inline constexpr double rad_s_to_khz(double w) { return w / (2.0 * pi * 1e3); }
inline constexpr double deg_to_rad(double d) { return d * pi / 180.0; }
inline constexpr double rad_to_deg(double r) { return r * 180.0 / pi; }
inline constexpr double us_to_s(double us) { return us * 1e-6; }
inline constexpr double s_to_us(double s) { return s * 1e6; }
inline constexpr double ut_to_tesla(double ut) { return ut * 1e-6; }
inline constexpr double tesla_to_ut(double t) { return t * 1e6; }
}  // namespace units

}  // namespace cepspin
