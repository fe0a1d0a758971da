#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cepspin/errors.hpp"

namespace cepspin {

namespace detail {

template <class F>
std::complex<double> simpson_adapt(F& f, double a, double m, double b,
                                   std::complex<double> fa, std::complex<double> fm,
                                   std::complex<double> fb, std::complex<double> whole,
                                   double tol, int depth, int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const std::complex<double> flm = f(lm);
  const std::complex<double> frm = f(rm);
  const std::complex<double> left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const std::complex<double> right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const std::complex<double> s2 = left + right;
  const std::complex<double> err = (s2 - whole) / 15.0;
  if (std::abs(err) <= tol) return s2 + err;
  if (depth >= max_depth)
    throw QuadratureError("adaptive Simpson: max recursion depth reached");
  return simpson_adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

// Adaptive Simpson quadrature for complex integrands, with a forced uniform
// pre-split so oscillatory integrands cannot fool the error estimate by node
// cancellation. min_panels should be >= a few panels per oscillation period.
template <class F>
std::complex<double> integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                        int min_panels = 16, int max_depth = 48) {
  if (min_panels < 1) min_panels = 1;
  if (!(abs_tol > 0.0)) throw QuadratureError("integrate_adaptive: abs_tol must be positive");
  const double w = (b - a) / min_panels;
  const double panel_tol = abs_tol / static_cast<double>(min_panels);
  std::complex<double> total = 0.0;
  for (int i = 0; i < min_panels; ++i) {
    const double pa = a + i * w;
    const double pb = (i + 1 == min_panels) ? b : pa + w;
    const double pm = 0.5 * (pa + pb);
    const std::complex<double> fa = f(pa), fm = f(pm), fb = f(pb);
    const std::complex<double> whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::simpson_adapt(f, pa, pm, pb, fa, fm, fb, whole, panel_tol, 0, max_depth);
  }
  return total;
}

// Running integral of uniformly sampled data: out[i] = integral from x0 to
// x_i, via the quadratic through each point's three nearest samples
// (cumulative Simpson). Needs at least 3 samples.
inline std::vector<std::complex<double>> cumulative_integral(
    std::span<const std::complex<double>> y, double dx) {
  const std::size_t n = y.size();
  if (n < 3) throw QuadratureError("cumulative_integral: need at least 3 samples");
  std::vector<std::complex<double>> out(n);
  out[0] = 0.0;
  out[1] = dx / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i + 1] = out[i] + dx / 12.0 * (-y[i - 1] + 8.0 * y[i] + 5.0 * y[i + 1]);
  return out;
}

}  // namespace cepspin
