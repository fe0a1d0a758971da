#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "cepspin/dynamics.hpp"
#include "cepspin/errors.hpp"
#include "cepspin/perturbation.hpp"
#include "cepspin/pulse.hpp"
#include "cepspin/spin_system.hpp"

namespace cepspin {

enum class Model { perturbative, two_level_ode, three_level_dm };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::perturbative: return "perturbative";
    case Model::two_level_ode: return "two_level_ode";
    case Model::three_level_dm: return "three_level_dm";
  }
  return "unknown";
}

inline Model model_from_string(const std::string& s) {
  if (s == "perturbative") return Model::perturbative;
  if (s == "two_level_ode") return Model::two_level_ode;
  if (s == "three_level_dm") return Model::three_level_dm;
  throw std::domain_error("unknown model '" + s + "'");
}

struct ScanGrid {
  double omega_min = units::khz_to_rad_s(100.0);
  double omega_max = units::khz_to_rad_s(200.0);
  int points = 201;
  std::vector<double> phases = {0.0};  // phi2 settings, rad
  Model model = Model::perturbative;

  void validate() const {
    if (!(omega_min < omega_max))
      throw std::domain_error("ScanGrid: omega_min must be < omega_max");
    if (points < 2) throw std::domain_error("ScanGrid: points must be >= 2");
    if (phases.empty()) throw std::domain_error("ScanGrid: phases must be non-empty");
  }

  std::vector<double> omegas() const {
    std::vector<double> w(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      w[static_cast<std::size_t>(i)] =
          omega_min + (omega_max - omega_min) * static_cast<double>(i) / (points - 1);
    w.back() = omega_max;
    return w;
  }
};

struct SpectrumSample {
  double omega;   // rad/s
  double signal;  // dimensionless, >= 0
};

struct Spectrum {
  std::vector<SpectrumSample> samples;  // omega strictly increasing
  std::vector<double> gaps;             // omegas whose evaluation failed
  Model model;
  PulseParams pulse;  // parameters (incl. phi1/phi2) that generated it
};

// Relative probe coupling to the two final sublevels. The probe transmission
// sums the m_F = 0 and m_F = -1 populations; unequal real-atom couplings can
// be dialed in here.
struct ProbeWeights {
  double m_zero = 1.0;
  double m_minus = 1.0;
};

// Excitation signal at one Zeeman splitting:
//   perturbative   -> |c1 + c3|^2 from the closed forms
//   two_level_ode  -> |C_a(+t_cut)|^2 starting from (0, 1)
//   three_level_dm -> P_a = w0 rho_00 + wm rho_-1-1 at +t_cut, starting from
//                     the pumped m_F=+1 state; b0 is derived from omega, the
//                     passed system provides g, mu, hbar, Gamma, rho_eq.
inline double excitation_signal(double omega, const PulseParams& p, const SpinSystem& sys,
                                Model model, const IntegratorConfig& cfg,
                                const ProbeWeights& probe = {}) {
  const RabiPair r = rabi_pair(p, sys.g, sys.mu_bohr, sys.hbar);
  switch (model) {
    case Model::perturbative: {
      return std::norm(total_amplitude(omega, p, r).total);
    }
    case Model::two_level_ode: {
      IntegratorConfig c = cfg;
      c.samples = 2;  // endpoints only; scans do not keep trajectories
      const Amplitudes init(std::complex<double>(0.0, 0.0), std::complex<double>(1.0, 0.0));
      const auto traj = evolve_two_level(omega, p, r, c, init);
      return std::norm(traj.final_state(0));
    }
    case Model::three_level_dm: {
      IntegratorConfig c = cfg;
      c.samples = 2;
      const SpinSystem s = sys.with_splitting(omega);
      const auto traj = evolve_density(s, p, c, pumped_initial_state());
      const double pa = probe.m_zero * std::real(traj.final_state(1, 1)) +
                        probe.m_minus * std::real(traj.final_state(2, 2));
      return std::max(pa, 0.0);  // clip population roundoff below zero
    }
  }
  throw std::logic_error("excitation_signal: unhandled model");
}

namespace detail {

// Evaluate f(i) for i in [0, n) on `jobs` threads into ordered slots; point
// values are independent of the partitioning, so output is deterministic.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t nthreads = std::min(static_cast<std::size_t>(jobs), n);
  pool.reserve(nthreads);
  for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// One spectrum per phi2 in grid.phases. Individual point failures (pole
// guard, integration failure) become gaps, never silent zeros; results are
// assembled in grid order regardless of evaluation order.
inline std::vector<Spectrum> spectrum(const ScanGrid& grid, const PulseParams& p,
                                      const SpinSystem& sys, const IntegratorConfig& cfg,
                                      int jobs = 1) {
  grid.validate();
  const auto omegas = grid.omegas();
  std::vector<Spectrum> out;
  out.reserve(grid.phases.size());
  for (double phi2 : grid.phases) {
    const PulseParams pp = p.with_phi2(phi2);
    std::vector<double> vals(omegas.size(), 0.0);
    std::vector<char> ok(omegas.size(), 0);
    detail::parallel_for(omegas.size(), jobs, [&](std::size_t i) {
      try {
        vals[i] = excitation_signal(omegas[i], pp, sys, grid.model, cfg);
        ok[i] = 1;
      } catch (const PoleError&) {
      } catch (const IntegrationError&) {
      } catch (const QuadratureError&) {
      }
    });
    Spectrum s{{}, {}, grid.model, pp};
    s.samples.reserve(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      if (ok[i]) s.samples.push_back({omegas[i], vals[i]});
      else s.gaps.push_back(omegas[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct PhasePoint {
  double phi2;    // rad
  double signal;  // dimensionless
};

struct SinusoidFit {
  double offset = 0.0;      // A in A + B cos(2 pi x / period - phase)
  double amplitude = 0.0;   // B >= 0
  double phase = 0.0;       // rad
  double period = 0.0;      // same unit as x
  double rms_residual = 0.0;
};

// Least-squares A + B cos(k x - phase) at fixed angular rate k.
inline SinusoidFit fit_sinusoid_fixed(const std::vector<double>& x,
                                      const std::vector<double>& y, double k = 1.0) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::domain_error("fit_sinusoid_fixed: need >= 3 matching samples");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd m(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    m(i, 0) = 1.0;
    m(i, 1) = std::cos(k * xi);
    m(i, 2) = std::sin(k * xi);
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d c = m.colPivHouseholderQr().solve(rhs);
  SinusoidFit f;
  f.offset = c(0);
  f.amplitude = std::hypot(c(1), c(2));
  f.phase = std::atan2(c(2), c(1));
  f.period = 2.0 * units::pi / k;
  f.rms_residual = std::sqrt((m * c - rhs).squaredNorm() / static_cast<double>(n));
  return f;
}

// As above but with the rate free: golden-section on k in [k_min, k_max]
// minimizing the residual of the inner linear fit.
inline SinusoidFit fit_sinusoid_free_period(const std::vector<double>& x,
                                            const std::vector<double>& y,
                                            double k_min = 0.8, double k_max = 1.25) {
  auto rss = [&](double k) { return fit_sinusoid_fixed(x, y, k).rms_residual; };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = k_min, b = k_max;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = rss(c), fd = rss(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = rss(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = rss(d);
    }
  }
  return fit_sinusoid_fixed(x, y, 0.5 * (a + b));
}

struct PhaseScanResult {
  std::vector<PhasePoint> points;
  std::optional<SinusoidFit> fit;  // filled for the perturbative model
};

// Signal vs phi2 at a fixed Zeeman splitting. For the perturbative model the
// result carries an A + B cos(phi2 - phi0) least-squares fit with residual.
inline PhaseScanResult phase_scan(const std::vector<double>& phis, double omega_fixed,
                                  const PulseParams& p, const SpinSystem& sys,
                                  Model model, const IntegratorConfig& cfg) {
  PhaseScanResult res;
  res.points.reserve(phis.size());
  for (double phi2 : phis) {
    const double s = excitation_signal(omega_fixed, p.with_phi2(phi2), sys, model, cfg);
    res.points.push_back({phi2, s});
  }
  if (model == Model::perturbative && phis.size() >= 3) {
    std::vector<double> xs, ys;
    xs.reserve(phis.size());
    ys.reserve(phis.size());
    for (const auto& pt : res.points) {
      xs.push_back(pt.phi2);
      ys.push_back(pt.signal);
    }
    res.fit = fit_sinusoid_fixed(xs, ys);
  }
  return res;
}

// Probe transmission observable: -ln(I1/I2) = scale * P_a, with scale the
// lumped N sigma L constant.
struct TransmissionModel {
  double scale = 1.0;

  void validate() const {
    if (!(scale > 0.0)) throw std::domain_error("TransmissionModel: scale must be positive");
  }
};

inline double transmission_signal(double p_a, const TransmissionModel& tm) {
  tm.validate();
  if (!(p_a >= 0.0 && p_a <= 1.0))
    throw std::domain_error("transmission_signal: p_a must lie in [0, 1]");
  return tm.scale * p_a;
}

}  // namespace cepspin
