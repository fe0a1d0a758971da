#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "cepspin/errors.hpp"

namespace cepspin {

enum class StepMode { adaptive, fixed };

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // Extra step cap on top of the carrier-resolving cap applied by the
  // evolve_* drivers; infinity means "no extra cap".
  double max_step = std::numeric_limits<double>::infinity();
  double t_cut_multiple = 4.0;  // window = [-m*fwhm, +m*fwhm]
  int samples = 2048;           // dense-output points per trajectory
  StepMode mode = StepMode::adaptive;
  double fixed_step = 0.0;      // s, used when mode == fixed

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::domain_error("IntegratorConfig: tolerances must be positive");
    if (!(max_step > 0.0))
      throw std::domain_error("IntegratorConfig: max_step must be positive");
    if (!(t_cut_multiple > 0.0))
      throw std::domain_error("IntegratorConfig: t_cut_multiple must be positive");
    if (samples < 2) throw std::domain_error("IntegratorConfig: samples must be >= 2");
    if (mode == StepMode::fixed && !(fixed_step > 0.0))
      throw std::domain_error("IntegratorConfig: fixed_step must be positive in fixed mode");
  }
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

template <class State>
struct IntegrationResult {
  State final_state;
  StepStats stats;
  std::vector<State> samples;  // values at the requested sample times
};

namespace detail {

// Dormand-Prince 5(4) coefficients (classic dopri5 tableau with FSAL and the
// standard quartic dense-output polynomial).
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

// Scaled RMS error norm (Hairer convention) over all (complex) entries.
template <class State>
double error_norm(const State& err, const State& y0, const State& y1,
                  double atol, double rtol) {
  const auto* pe = err.data();
  const auto* p0 = y0.data();
  const auto* p1 = y1.data();
  const auto n = err.size();
  double acc = 0.0;
  for (std::remove_const_t<decltype(n)> i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(p0[i]), std::abs(p1[i]));
    const double e = std::abs(pe[i]) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace detail

// Adaptive embedded Runge-Kutta 5(4) over [t0, t1] (either direction).
// sample_times must be sorted in integration direction and lie inside the
// window; states at those times come from the quartic dense interpolant of
// the accepted steps, decoupled from the internal step sequence.
template <class State, class Rhs>
IntegrationResult<State> integrate_dopri5(Rhs&& rhs, double t0, double t1, State y,
                                          const std::vector<double>& sample_times,
                                          double rel_tol, double abs_tol,
                                          double max_step,
                                          std::size_t max_steps = 50'000'000) {
  using namespace detail;
  IntegrationResult<State> res{y, {}, {}};
  res.samples.reserve(sample_times.size());

  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0) {
    for (std::size_t i = 0; i < sample_times.size(); ++i) res.samples.push_back(y);
    res.final_state = y;
    return res;
  }

  double t = t0;
  double h = dir * std::min(max_step, span / 50.0);
  std::size_t next_sample = 0;
  // emit samples that coincide with the start
  while (next_sample < sample_times.size() &&
         (sample_times[next_sample] - t0) * dir <= 0.0) {
    res.samples.push_back(y);
    ++next_sample;
  }

  State k1 = rhs(t, y);
  ++res.stats.rhs_evals;
  State k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1;

  const double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
  std::size_t steps = 0;
  while ((t1 - t) * dir > 0.0) {
    if (++steps > max_steps)
      throw IntegrationError("integrate_dopri5: step limit exceeded", t);
    if (std::abs(h) < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0e-30))
      throw IntegrationError("integrate_dopri5: step size underflow", t);
    if ((t + h - t1) * dir > 0.0) h = t1 - t;

    const State y2 = y + h * (a21 * k1);
    k2 = rhs(t + c2 * h, y2);
    const State y3 = y + h * (a31 * k1 + a32 * k2);
    k3 = rhs(t + c3 * h, y3);
    const State y4 = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    k4 = rhs(t + c4 * h, y4);
    const State y5 = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    k5 = rhs(t + c5 * h, y5);
    const State y6 = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    k6 = rhs(t + h, y6);
    const State ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs(t + h, ynew);
    res.stats.rhs_evals += 6;

    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, abs_tol, rel_tol);

    if (en <= 1.0) {
      // dense output over the accepted step
      if (next_sample < sample_times.size()) {
        const State ydiff = ynew - y;
        const State bspl = h * k1 - ydiff;
        const State r4 = ydiff - h * k7 - bspl;
        const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next_sample < sample_times.size() &&
               (sample_times[next_sample] - (t + h)) * dir <= 0.0) {
          const double theta = (sample_times[next_sample] - t) / h;
          const State interp =
              y + theta * (ydiff + (1.0 - theta) * (bspl + theta * (r4 + (1.0 - theta) * r5)));
          res.samples.push_back(interp);
          ++next_sample;
        }
      }
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      ++res.stats.accepted;
      double fac = (en == 0.0) ? fac_max
                               : std::clamp(safety * std::pow(en, -0.2), fac_min, fac_max);
      h *= fac;
      if (std::abs(h) > max_step) h = dir * max_step;
    } else {
      ++res.stats.rejected;
      const double fac = std::max(safety * std::pow(en, -0.2), fac_min);
      h *= fac;
    }
  }

  while (next_sample < sample_times.size()) {  // samples at/after the end
    res.samples.push_back(y);
    ++next_sample;
  }
  res.final_state = y;
  return res;
}

// One classical 4th-order Runge-Kutta step.
template <class State, class Rhs>
State rk4_step(Rhs&& rhs, double t, double h, const State& y) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = rhs(t + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fixed-step RK4 over [t0, t1] with n equal steps (n >= 1).
template <class State, class Rhs>
State integrate_rk4(Rhs&& rhs, double t0, double t1, State y, std::size_t n) {
  if (n == 0) throw std::domain_error("integrate_rk4: need at least one step");
  const double h = (t1 - t0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) y = rk4_step(rhs, t0 + h * static_cast<double>(i), h, y);
  return y;
}

// Fixed-step driver with samples: each inter-sample segment is covered with
// ceil(segment/step) equal RK4 steps, so the requested times are hit exactly.
template <class State, class Rhs>
IntegrationResult<State> integrate_rk4_sampled(Rhs&& rhs, double t0, double t1, State y,
                                               const std::vector<double>& sample_times,
                                               double step) {
  if (!(step > 0.0)) throw std::domain_error("integrate_rk4_sampled: step must be positive");
  IntegrationResult<State> res{y, {}, {}};
  res.samples.reserve(sample_times.size());
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  auto advance_to = [&](double target) {
    const double span = std::abs(target - t);
    if (span == 0.0) return;
    const auto n = static_cast<std::size_t>(std::ceil(span / step));
    const double h = (target - t) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y = rk4_step(rhs, t + h * static_cast<double>(i), h, y);
      res.stats.rhs_evals += 4;
      ++res.stats.accepted;
    }
    t = target;
  };
  for (double ts : sample_times) {
    if ((ts - t) * dir > 0.0) advance_to(ts);
    res.samples.push_back(y);
  }
  if ((t1 - t) * dir > 0.0) advance_to(t1);
  res.final_state = y;
  return res;
}

}  // namespace cepspin
