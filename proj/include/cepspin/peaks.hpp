#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cepspin/scan.hpp"

namespace cepspin {

struct Peak {
  double omega_center;  // same unit as the x input
  double height;
  double width_fwhm;
};

// Centered moving average; the window shrinks near the edges. window is
// forced odd (evens are rounded up).
inline std::vector<double> moving_average(const std::vector<double>& y, int window) {
  if (window < 1) window = 1;
  if (window % 2 == 0) ++window;
  const int h = window / 2;
  const int n = static_cast<int>(y.size());
  std::vector<double> out(y.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - h);
    const int hi = std::min(n - 1, i + h);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// Local maxima of the smoothed signal above min_height_frac of its global
// maximum. Centers are refined by a parabola through the three points around
// each maximum; FWHM comes from linear interpolation of the half-height
// crossings (clipped to the data range when a flank never crosses).
inline std::vector<Peak> find_peaks(const std::vector<double>& x,
                                    const std::vector<double>& y,
                                    double min_height_frac = 0.2,
                                    int smooth_window = 5) {
  if (x.size() != y.size()) throw std::domain_error("find_peaks: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 5) throw std::domain_error("find_peaks: need at least 5 points");
  const std::vector<double> s = moving_average(y, smooth_window);
  const double global_max = *std::max_element(s.begin(), s.end());
  std::vector<Peak> peaks;
  if (global_max <= 0.0) return peaks;
  const double thresh = min_height_frac * global_max;

  for (int i = 1; i + 1 < n; ++i) {
    const double si = s[static_cast<std::size_t>(i)];
    if (!(si > s[static_cast<std::size_t>(i - 1)] && si >= s[static_cast<std::size_t>(i + 1)]))
      continue;
    if (si < thresh) continue;

    Peak pk;
    const double sm = s[static_cast<std::size_t>(i - 1)];
    const double sp = s[static_cast<std::size_t>(i + 1)];
    const double denom = sm - 2.0 * si + sp;
    double off = 0.0;
    if (denom != 0.0) off = 0.5 * (sm - sp) / denom;
    off = std::clamp(off, -0.5, 0.5);
    const double dx_l = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i - 1)];
    const double dx_r = x[static_cast<std::size_t>(i + 1)] - x[static_cast<std::size_t>(i)];
    pk.omega_center = x[static_cast<std::size_t>(i)] + off * (off < 0.0 ? dx_l : dx_r);
    pk.height = (denom != 0.0) ? si - 0.125 * (sm - sp) * (sm - sp) / denom : si;

    const double half = 0.5 * pk.height;
    double left = x.front();
    for (int j = i; j > 0; --j) {
      const double a = s[static_cast<std::size_t>(j - 1)], b = s[static_cast<std::size_t>(j)];
      if (a <= half && b > half) {
        const double f = (half - a) / (b - a);
        left = x[static_cast<std::size_t>(j - 1)] +
               f * (x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j - 1)]);
        break;
      }
    }
    double right = x.back();
    for (int j = i; j + 1 < n; ++j) {
      const double a = s[static_cast<std::size_t>(j)], b = s[static_cast<std::size_t>(j + 1)];
      if (a > half && b <= half) {
        const double f = (a - half) / (a - b);
        right = x[static_cast<std::size_t>(j)] +
                f * (x[static_cast<std::size_t>(j + 1)] - x[static_cast<std::size_t>(j)]);
        break;
      }
    }
    pk.width_fwhm = std::max(right - left, 1e-300);
    peaks.push_back(pk);
  }
  return peaks;
}

inline std::vector<Peak> find_peaks(const Spectrum& sp, double min_height_frac = 0.2,
                                    int smooth_window = 5) {
  std::vector<double> x, y;
  x.reserve(sp.samples.size());
  y.reserve(sp.samples.size());
  for (const auto& s : sp.samples) {
    x.push_back(s.omega);
    y.push_back(s.signal);
  }
  return find_peaks(x, y, min_height_frac, smooth_window);
}

}  // namespace cepspin
