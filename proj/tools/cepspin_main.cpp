// Command-line front end: config-driven simulations, spectra, phase scans,
// peak extraction, model comparisons and canned figure recipes, all emitting
// deterministic CSV.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cepspin/config.hpp"
#include "cepspin/csv.hpp"
#include "cepspin/dynamics.hpp"
#include "cepspin/peaks.hpp"
#include "cepspin/perturbation.hpp"
#include "cepspin/scan.hpp"

namespace {

using namespace cepspin;

void warn_gaps(const std::vector<Spectrum>& spectra) {
  for (const auto& sp : spectra)
    for (double w : sp.gaps)
      std::cerr << "warning: no value at omega = " << units::rad_s_to_khz(w)
                << " kHz (phi2 = " << units::rad_to_deg(sp.pulse.phi2) << " deg)\n";
}

void normalize_family(std::vector<Spectrum>& spectra) {
  double peak = 0.0;
  for (const auto& sp : spectra)
    for (const auto& s : sp.samples) peak = std::max(peak, s.signal);
  if (peak <= 0.0) return;
  for (auto& sp : spectra)
    for (auto& s : sp.samples) s.signal /= peak;
}

int run_simulate(const RunConfig& cfg, const std::string& output) {
  const PulseParams p = make_pulse(cfg);
  const SpinSystem sys = make_system(cfg);
  const IntegratorConfig ic = make_integrator(cfg);
  const Model model = model_from_string(cfg.model);
  if (model == Model::perturbative)
    throw ConfigError("model", "simulate requires an ODE model "
                               "(two_level_ode or three_level_dm)");
  if (model == Model::two_level_ode) {
    const RabiPair r = rabi_pair(p, sys.g, sys.mu_bohr, sys.hbar);
    const Amplitudes init(std::complex<double>(0.0, 0.0), std::complex<double>(1.0, 0.0));
    const auto traj = evolve_two_level(zeeman_splitting(sys), p, r, ic, init);
    write_trajectory_csv(output, traj);
    std::cout << "final |C_a|^2 = " << format_double(std::norm(traj.final_state(0)))
              << " (steps: " << traj.stats.accepted << " accepted, "
              << traj.stats.rejected << " rejected)\n";
  } else {
    const auto traj = evolve_density(sys, p, ic, pumped_initial_state());
    write_trajectory_csv(output, traj);
    const double pa = std::real(traj.final_state(1, 1) + traj.final_state(2, 2));
    std::cout << "final P_a = " << format_double(pa) << " (steps: " << traj.stats.accepted
              << " accepted, " << traj.stats.rejected << " rejected)\n";
  }
  return 0;
}

int run_spectrum(const RunConfig& cfg, const std::string& output, int jobs) {
  const auto spectra = spectrum(make_grid(cfg), make_pulse(cfg), make_system(cfg),
                                make_integrator(cfg), jobs);
  warn_gaps(spectra);
  write_spectra_csv(output, spectra);
  return 0;
}

int run_phase_scan(const RunConfig& cfg, const std::string& output,
                   std::optional<double> omega_khz) {
  const PulseParams p = make_pulse(cfg);
  const SpinSystem sys = make_system(cfg);
  const double omega =
      omega_khz ? units::khz_to_rad_s(*omega_khz) : zeeman_splitting(sys);
  std::vector<double> phis;
  for (double d : cfg.grid.phases_deg) phis.push_back(units::deg_to_rad(d));
  const auto res = phase_scan(phis, omega, p, sys, model_from_string(cfg.model),
                              make_integrator(cfg));
  AtomicCsvWriter w(output);
  w.stream() << "phi2_deg,signal,model,omega_khz\n";
  for (const auto& pt : res.points)
    w.stream() << format_degrees(units::rad_to_deg(pt.phi2)) << ','
               << format_double(pt.signal) << ',' << cfg.model << ','
               << format_double(units::rad_s_to_khz(omega)) << '\n';
  w.commit();
  if (res.fit) {
    std::cout << "fit: offset=" << format_double(res.fit->offset)
              << " amplitude=" << format_double(res.fit->amplitude)
              << " phase_deg=" << format_double(units::rad_to_deg(res.fit->phase))
              << " rms_residual=" << format_double(res.fit->rms_residual) << "\n";
  }
  return 0;
}

int run_peaks(const std::string& input, const std::string& output, double min_height_frac,
              int smooth_window) {
  const auto rows = read_spectrum_csv(input);
  if (rows.empty()) throw std::domain_error("'" + input + "' contains no data rows");
  // group rows by (model, phi1, phi2) preserving first-seen order
  std::vector<PeakGroup> groups;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<SpectrumRow>> grouped;
  for (const auto& r : rows) {
    const std::string key = r.model + "|" + format_double(r.phi1_deg) + "|" +
                            format_double(r.phi2_deg);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, grouped.size());
      grouped.push_back({});
      it = index.find(key);
    }
    grouped[it->second].push_back(r);
  }
  for (const auto& g : grouped) {
    std::vector<double> x, y;
    for (const auto& r : g) {
      x.push_back(r.omega_khz);
      y.push_back(r.signal);
    }
    PeakGroup pg{g.front().model, g.front().phi1_deg, g.front().phi2_deg,
                 find_peaks(x, y, min_height_frac, smooth_window)};
    groups.push_back(std::move(pg));
  }
  write_peaks_csv(output, groups);
  std::size_t total = 0;
  for (const auto& g : groups) total += g.peaks.size();
  std::cout << "detected " << total << " peak(s) in " << groups.size() << " spectrum group(s)\n";
  return 0;
}

int run_compare(const RunConfig& cfg, const std::string& model_a, const std::string& model_b,
                const std::string& output, int jobs) {
  ScanGrid grid = make_grid(cfg);
  const PulseParams p = make_pulse(cfg);
  const SpinSystem sys = make_system(cfg);
  const IntegratorConfig ic = make_integrator(cfg);
  grid.model = model_from_string(model_a);
  const auto sa = spectrum(grid, p, sys, ic, jobs);
  grid.model = model_from_string(model_b);
  const auto sb = spectrum(grid, p, sys, ic, jobs);

  AtomicCsvWriter w(output);
  w.stream() << "omega_khz,phi2_deg,signal_" << model_a << ",signal_" << model_b
             << ",rel_diff\n";
  double max_diff = 0.0;
  for (std::size_t k = 0; k < sa.size(); ++k) {
    if (sa[k].samples.size() != sb[k].samples.size())
      throw std::domain_error("compare: models produced different gap patterns; "
                              "tighten the grid away from singular points");
    for (std::size_t i = 0; i < sa[k].samples.size(); ++i) {
      const double a = sa[k].samples[i].signal;
      const double b = sb[k].samples[i].signal;
      const double denom = std::max({a, b, 1e-300});
      const double rel = std::abs(a - b) / denom;
      max_diff = std::max(max_diff, rel);
      w.stream() << format_double(units::rad_s_to_khz(sa[k].samples[i].omega)) << ','
                 << format_degrees(units::rad_to_deg(sa[k].pulse.phi2)) << ','
                 << format_double(a) << ',' << format_double(b) << ','
                 << format_double(rel) << '\n';
    }
  }
  w.commit();
  std::cout << "max_rel_diff=" << format_double(max_diff) << "\n";
  return 0;
}

// --- canned figure recipes ---

// Strong-drive resonance shift: a monochromatic 50 kHz pulse puts the
// multi-photon peak well below 150 kHz; adding the 150 kHz carrier pins the
// line close to 150 kHz. Full three-level dynamics, jointly normalized.
int figure_shift_comparison(const std::string& outdir, int jobs) {
  SpinSystem sys;  // b0 is swept per point
  IntegratorConfig ic;
  ScanGrid grid;
  grid.omega_min = units::khz_to_rad_s(100.0);
  grid.omega_max = units::khz_to_rad_s(200.0);
  grid.points = 201;
  grid.model = Model::three_level_dm;

  const PulseParams mono(units::khz_to_rad_s(50.0), units::khz_to_rad_s(150.0), 0.0, 0.0,
                         units::ut_to_tesla(8.0), 0.0, units::us_to_s(130.0));
  const PulseParams bichrom(units::khz_to_rad_s(50.0), units::khz_to_rad_s(150.0), 0.0, 0.0,
                            units::ut_to_tesla(8.0), units::ut_to_tesla(0.6),
                            units::us_to_s(130.0));
  auto sm = spectrum(grid, mono, sys, ic, jobs);
  auto sb = spectrum(grid, bichrom, sys, ic, jobs);
  std::vector<Spectrum> family;
  family.push_back(std::move(sm[0]));
  family.push_back(std::move(sb[0]));
  normalize_family(family);
  warn_gaps(family);
  write_spectra_csv(outdir + "/fig3a_monochromatic.csv", {family[0]});
  write_spectra_csv(outdir + "/fig3a_bichromatic.csv", {family[1]});
  return 0;
}

// Visibility-matched calibration pulse: the three-photon line is placed
// slightly below the one-photon line (as observed with strong drive) and its
// peak amplitude is matched to it; 3*phi1 = 120 deg aligns the single/double
// /single sequence with phi2 = 0/120/180 deg.
PulseParams calibration_pulse() {
  PulseParams p(units::khz_to_rad_s(49.7), units::khz_to_rad_s(150.0),
                units::deg_to_rad(40.0), 0.0, units::ut_to_tesla(0.5), 0.0,
                units::us_to_s(130.0));
  p.b2 = visibility_matched_b2(p, SpinSystem{});
  return p;
}

int figure_phase_family(const std::string& outdir, int jobs) {
  SpinSystem sys;
  IntegratorConfig ic;
  ScanGrid grid;
  grid.omega_min = units::khz_to_rad_s(140.0);
  grid.omega_max = units::khz_to_rad_s(160.0);
  grid.points = 801;
  grid.model = Model::perturbative;
  grid.phases.clear();
  for (int d = 0; d <= 360; d += 30) grid.phases.push_back(units::deg_to_rad(d));
  auto family = spectrum(grid, calibration_pulse(), sys, ic, jobs);
  normalize_family(family);
  warn_gaps(family);
  write_spectra_csv(outdir + "/fig4.csv", family);
  return 0;
}

// Amplitude modulus |C_a| for three phase settings of the 150 kHz carrier.
int figure_amplitude_modulus(const std::string& outdir, int /*jobs*/) {
  const PulseParams base = calibration_pulse();
  SpinSystem sys;
  const RabiPair r = rabi_pair(base, sys.g, sys.mu_bohr, sys.hbar);
  std::vector<Spectrum> family;
  for (double deg : {0.0, 115.0, 180.0}) {
    const PulseParams p = base.with_phi2(units::deg_to_rad(deg));
    Spectrum sp{{}, {}, Model::perturbative, p};
    const int n = 801;
    for (int i = 0; i < n; ++i) {
      const double w = units::khz_to_rad_s(140.0 + 20.0 * i / (n - 1));
      sp.samples.push_back({w, std::abs(total_amplitude(w, p, r).total)});
    }
    family.push_back(std::move(sp));
  }
  normalize_family(family);
  write_spectra_csv(outdir + "/fig5b.csv", family);
  return 0;
}

int run_figure(const std::string& which, const std::string& outdir, int jobs) {
  std::filesystem::create_directories(outdir);
  if (which == "fig3a") return figure_shift_comparison(outdir, jobs);
  if (which == "fig4") return figure_phase_family(outdir, jobs);
  if (which == "fig5b") return figure_amplitude_modulus(outdir, jobs);
  throw ConfigError("figure", "unknown recipe '" + which + "' (fig3a, fig4, fig5b)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CEP-dependent one/three-photon interference simulator for a driven F=1 spin"};
  app.require_subcommand(1);

  std::string config_path, output_path, input_path, outdir = ".", figure_name;
  std::string model_a = "perturbative", model_b = "two_level_ode";
  std::optional<double> omega_khz;
  double min_height_frac = 0.2;
  int smooth_window = 5;
  int jobs = 1;

  auto* sim = app.add_subcommand("simulate", "integrate one trajectory and write it as CSV");
  sim->add_option("--config", config_path, "JSON run configuration")->required();
  sim->add_option("--output", output_path, "trajectory CSV path")->required();

  auto* spec = app.add_subcommand("spectrum", "sweep the Zeeman splitting, one spectrum per phase");
  spec->add_option("--config", config_path)->required();
  spec->add_option("--output", output_path)->required();
  spec->add_option("--jobs", jobs, "concurrent grid evaluations")->check(CLI::PositiveNumber);

  auto* ph = app.add_subcommand("phase-scan", "signal vs phi2 at a fixed splitting");
  ph->add_option("--config", config_path)->required();
  ph->add_option("--output", output_path)->required();
  ph->add_option("--omega-khz", omega_khz, "fixed splitting (default: system value)");

  auto* pk = app.add_subcommand("peaks", "extract peaks from a spectrum CSV");
  pk->add_option("--input", input_path)->required();
  pk->add_option("--output", output_path)->required();
  pk->add_option("--min-height-frac", min_height_frac)->check(CLI::Range(0.0, 1.0));
  pk->add_option("--smooth-window", smooth_window)->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "run two models on one grid, report differences");
  cmp->add_option("--config", config_path)->required();
  cmp->add_option("--output", output_path)->required();
  cmp->add_option("--model-a", model_a);
  cmp->add_option("--model-b", model_b);
  cmp->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  auto* fig = app.add_subcommand("figure", "run a canned reproduction recipe");
  fig->add_option("name", figure_name, "fig3a | fig4 | fig5b")->required();
  fig->add_option("--output-dir", outdir);
  fig->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(sim)) return run_simulate(load_config_file(config_path), output_path);
    if (app.got_subcommand(spec))
      return run_spectrum(load_config_file(config_path), output_path, jobs);
    if (app.got_subcommand(ph))
      return run_phase_scan(load_config_file(config_path), output_path, omega_khz);
    if (app.got_subcommand(pk))
      return run_peaks(input_path, output_path, min_height_frac, smooth_window);
    if (app.got_subcommand(cmp))
      return run_compare(load_config_file(config_path), model_a, model_b, output_path, jobs);
    if (app.got_subcommand(fig)) return run_figure(figure_name, outdir, jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrationError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const QuadratureError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
