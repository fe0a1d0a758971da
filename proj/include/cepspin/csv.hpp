#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "cepspin/constants.hpp"
#include "cepspin/dynamics.hpp"
#include "cepspin/errors.hpp"
#include "cepspin/peaks.hpp"
#include "cepspin/scan.hpp"

namespace cepspin {

// Shortest round-trip decimal representation; locale-independent, so CSV
// output is bit-identical across runs and environments.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

// Degrees pass through rad and back for the CSV metadata columns; snap the
// sub-nano-degree conversion fuzz so configured values print verbatim.
inline std::string format_degrees(double deg) {
  return format_double(std::round(deg * 1e9) / 1e9);
}

// Writes through a temp file and renames on commit; an abandoned writer
// removes its partial output.
class AtomicCsvWriter {
 public:
  explicit AtomicCsvWriter(const std::string& path)
      : path_(path), tmp_(path + ".tmp"), out_(tmp_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open '" + tmp_ + "' for writing");
  }

  AtomicCsvWriter(const AtomicCsvWriter&) = delete;
  AtomicCsvWriter& operator=(const AtomicCsvWriter&) = delete;

  ~AtomicCsvWriter() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write to '" + tmp_ + "' failed");
    out_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_, tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

// Spectrum rows: omega_khz,signal,model,phi1_deg,phi2_deg
inline void write_spectra_csv(const std::string& path, const std::vector<Spectrum>& spectra) {
  AtomicCsvWriter w(path);
  w.stream() << "omega_khz,signal,model,phi1_deg,phi2_deg\n";
  for (const auto& sp : spectra) {
    const std::string model = to_string(sp.model);
    const std::string phi1 = format_degrees(units::rad_to_deg(sp.pulse.phi1));
    const std::string phi2 = format_degrees(units::rad_to_deg(sp.pulse.phi2));
    for (const auto& s : sp.samples)
      w.stream() << format_double(units::rad_s_to_khz(s.omega)) << ',' << format_double(s.signal)
                 << ',' << model << ',' << phi1 << ',' << phi2 << '\n';
  }
  w.commit();
}

struct SpectrumRow {
  double omega_khz = 0.0;
  double signal = 0.0;
  std::string model;
  double phi1_deg = 0.0;
  double phi2_deg = 0.0;
};

inline std::vector<SpectrumRow> read_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  if (line != "omega_khz,signal,model,phi1_deg,phi2_deg")
    throw std::runtime_error("'" + path + "' has an unexpected header: " + line);
  std::vector<SpectrumRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i)
      if (!std::getline(ss, f[i], ','))
        throw std::runtime_error(path + ": malformed row at line " + std::to_string(lineno));
    SpectrumRow r;
    r.omega_khz = std::stod(f[0]);
    r.signal = std::stod(f[1]);
    r.model = f[2];
    r.phi1_deg = std::stod(f[3]);
    r.phi2_deg = std::stod(f[4]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// Trajectory rows. Amplitudes: t_us,re_upper,im_upper,re_lower,im_lower.
inline void write_trajectory_csv(const std::string& path, const AmplitudeTrajectory& tr) {
  AtomicCsvWriter w(path);
  w.stream() << "t_us,re_upper,im_upper,re_lower,im_lower\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& c = tr.states[i];
    w.stream() << format_double(units::s_to_us(tr.times[i])) << ','
               << format_double(c(0).real()) << ',' << format_double(c(0).imag()) << ','
               << format_double(c(1).real()) << ',' << format_double(c(1).imag()) << '\n';
  }
  w.commit();
}

// Density matrix: 9 complex entries, row-major over the (p, 0, m) basis
// labels for m_F = (+1, 0, -1).
inline void write_trajectory_csv(const std::string& path, const DensityTrajectory& tr) {
  static const char* kLabel[3] = {"p", "0", "m"};
  AtomicCsvWriter w(path);
  w.stream() << "t_us";
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      w.stream() << ",re_rho_" << kLabel[a] << kLabel[b] << ",im_rho_" << kLabel[a] << kLabel[b];
  w.stream() << '\n';
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    w.stream() << format_double(units::s_to_us(tr.times[i]));
    const Mat3& rho = tr.states[i];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        w.stream() << ',' << format_double(rho(a, b).real()) << ','
                   << format_double(rho(a, b).imag());
    w.stream() << '\n';
  }
  w.commit();
}

struct PeakGroup {
  std::string model;
  double phi1_deg = 0.0;
  double phi2_deg = 0.0;
  std::vector<Peak> peaks;  // centers in kHz when built from CSV rows
};

inline void write_peaks_csv(const std::string& path, const std::vector<PeakGroup>& groups) {
  AtomicCsvWriter w(path);
  w.stream() << "model,phi1_deg,phi2_deg,center_khz,height,width_fwhm_khz\n";
  for (const auto& g : groups)
    for (const auto& p : g.peaks)
      w.stream() << g.model << ',' << format_double(g.phi1_deg) << ','
                 << format_double(g.phi2_deg) << ',' << format_double(p.omega_center) << ','
                 << format_double(p.height) << ',' << format_double(p.width_fwhm) << '\n';
  w.commit();
}

}  // namespace cepspin
