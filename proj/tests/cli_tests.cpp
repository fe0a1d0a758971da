// End-to-end checks of the command-line tool: spawns the real binary and
// inspects exit codes, CSV outputs and determinism.
// usage: cli_tests <path-to-cepspin-binary> <configs-dir>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int fails = 0;

#define CHECK_MSG(cond, msg)                                              \
  do {                                                                    \
    if (!(cond)) {                                                        \
      std::printf("FAIL(line %d): %s\n", __LINE__, std::string(msg).c_str()); \
      ++fails;                                                            \
    }                                                                     \
  } while (0)

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (fgets(buf, sizeof buf, p)) r.out += buf;
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::printf("usage: cli_tests <cepspin-binary> <configs-dir>\n");
    return 2;
  }
  const std::string bin = argv[1];
  const std::string cfgs = argv[2];
  const fs::path work = fs::temp_directory_path() / "cepspin_cli_tests";
  fs::remove_all(work);
  fs::create_directories(work);

  {  // help and usage errors
    CHECK_MSG(run(bin + " --help").code == 0, "--help should exit 0");
    CHECK_MSG(run(bin + " frobnicate").code == 1, "unknown subcommand should exit 1");
    CHECK_MSG(run(bin + " spectrum").code == 1, "missing required options should exit 1");
  }

  {  // config errors exit 2 and leave no output
    const fs::path bad = work / "bad.json";
    write_file(bad, R"({"pulse": {"fwhm_us": 0}})");
    const fs::path out = work / "never.csv";
    const auto r = run(bin + " simulate --config " + bad.string() + " --output " + out.string());
    CHECK_MSG(r.code == 2, "invalid config should exit 2, got " + std::to_string(r.code));
    CHECK_MSG(r.out.find("fwhm_us") != std::string::npos, "error should name the key");
    CHECK_MSG(!fs::exists(out), "no output file on failure");
    CHECK_MSG(run(bin + " simulate --config " + (work / "missing.json").string() +
                  " --output " + out.string()).code == 2,
              "missing config file should exit 2");
  }

  {  // simulate writes a trajectory of the configured length
    const fs::path out = work / "traj.csv";
    const auto r = run(bin + " simulate --config " + cfgs + "/weak_drive.json --output " +
                       out.string());
    CHECK_MSG(r.code == 0, "simulate should succeed: " + r.out);
    CHECK_MSG(fs::exists(out), "trajectory file exists");
    const std::string text = slurp(out);
    CHECK_MSG(text.rfind("t_us,re_upper,im_upper,re_lower,im_lower\n", 0) == 0,
              "amplitude trajectory header");
    CHECK_MSG(count_lines(text) == 513, "header + 512 samples");
    CHECK_MSG(r.out.find("final |C_a|^2") != std::string::npos, "summary line printed");
  }

  {  // perturbative model cannot be "simulated" as a trajectory
    const auto r = run(bin + " simulate --config " + cfgs + "/paper_defaults.json --output " +
                       (work / "x.csv").string());
    CHECK_MSG(r.code == 2, "simulate with perturbative model should exit 2");
  }

  {  // numeric failures exit 3: phase scan exactly on the nu1 pole
    const auto r = run(bin + " phase-scan --config " + cfgs +
                       "/paper_defaults.json --omega-khz 50 --output " +
                       (work / "pole.csv").string());
    CHECK_MSG(r.code == 3, "pole evaluation should exit 3, got " + std::to_string(r.code));
    CHECK_MSG(!fs::exists(work / "pole.csv"), "no partial CSV from a failed scan");
  }

  {  // density-matrix trajectory schema
    const fs::path out = work / "dm.csv";
    const auto r = run(bin + " simulate --config " + cfgs + "/strong_mono.json --output " +
                       out.string());
    CHECK_MSG(r.code == 0, "three-level simulate should succeed: " + r.out);
    const std::string text = slurp(out);
    CHECK_MSG(text.rfind("t_us,re_rho_pp,im_rho_pp,re_rho_p0,im_rho_p0,re_rho_pm,im_rho_pm,"
                         "re_rho_0p,im_rho_0p,re_rho_00,im_rho_00,re_rho_0m,im_rho_0m,"
                         "re_rho_mp,im_rho_mp,re_rho_m0,im_rho_m0,re_rho_mm,im_rho_mm\n",
                         0) == 0,
              "density trajectory header");
    CHECK_MSG(count_lines(text) == 2049, "header + 2048 samples");
    CHECK_MSG(r.out.find("final P_a") != std::string::npos, "population summary printed");
  }

  {  // spectrum determinism, including across thread counts
    const fs::path s1 = work / "s1.csv", s2 = work / "s2.csv", s3 = work / "s3.csv";
    CHECK_MSG(run(bin + " spectrum --config " + cfgs + "/paper_defaults.json --output " +
                  s1.string()).code == 0, "spectrum run 1");
    CHECK_MSG(run(bin + " spectrum --config " + cfgs + "/paper_defaults.json --output " +
                  s2.string()).code == 0, "spectrum run 2");
    CHECK_MSG(run(bin + " spectrum --config " + cfgs + "/paper_defaults.json --output " +
                  s3.string() + " --jobs 3").code == 0, "spectrum run 3 (3 jobs)");
    const std::string a = slurp(s1);
    CHECK_MSG(!a.empty() && a == slurp(s2), "repeated runs byte-identical");
    CHECK_MSG(a == slurp(s3), "thread count does not change bytes");
    CHECK_MSG(a.rfind("omega_khz,signal,model,phi1_deg,phi2_deg\n", 0) == 0,
              "spectrum header");
    CHECK_MSG(count_lines(a) == 202, "header + 201 grid points");
  }

  {  // compare on a zero-drive config reports exactly zero difference
    const fs::path zero = work / "zero.json";
    write_file(zero, R"({
      "pulse": {"b1_ut": 0.0, "b2_ut": 0.0},
      "grid": {"omega_min_khz": 140, "omega_max_khz": 160, "points": 5}
    })");
    const auto r = run(bin + " compare --config " + zero.string() + " --model-a perturbative" +
                       " --model-b two_level_ode --output " + (work / "cmp.csv").string());
    CHECK_MSG(r.code == 0, "compare should succeed: " + r.out);
    CHECK_MSG(r.out.find("max_rel_diff=0\n") != std::string::npos,
              "zero drive implies zero difference, got: " + r.out);
  }

  {  // phase-scan emits the fit summary for the perturbative model
    const fs::path out = work / "ph.csv";
    const auto r = run(bin + " phase-scan --config " + cfgs +
                       "/visibility_matched.json --omega-khz 149.1 --output " + out.string());
    CHECK_MSG(r.code == 0, "phase-scan should succeed: " + r.out);
    CHECK_MSG(r.out.find("fit:") != std::string::npos, "fit summary printed");
    const std::string text = slurp(out);
    CHECK_MSG(text.rfind("phi2_deg,signal,model,omega_khz\n", 0) == 0, "phase-scan header");
    CHECK_MSG(count_lines(text) == 4, "three configured phases");
  }

  {  // peaks on a synthetic two-bump spectrum
    const fs::path in = work / "bumps.csv";
    std::ostringstream ss;
    ss << "omega_khz,signal,model,phi1_deg,phi2_deg\n";
    for (int i = 0; i <= 200; ++i) {
      const double x = 130.0 + 0.2 * i;
      const double y = std::exp(-0.5 * (x - 143) * (x - 143) / 2.25) +
                       0.8 * std::exp(-0.5 * (x - 156) * (x - 156) / 4.0);
      ss << x << "," << y << ",perturbative,0,0\n";
    }
    write_file(in, ss.str());
    const fs::path out = work / "bumps_peaks.csv";
    const auto r = run(bin + " peaks --input " + in.string() + " --output " + out.string());
    CHECK_MSG(r.code == 0, "peaks should succeed: " + r.out);
    const std::string text = slurp(out);
    CHECK_MSG(text.rfind("model,phi1_deg,phi2_deg,center_khz,height,width_fwhm_khz\n", 0) == 0,
              "peaks header");
    CHECK_MSG(count_lines(text) == 3, "two peaks found");
    CHECK_MSG(run(bin + " peaks --input " + (work / "nothere.csv").string() + " --output " +
                  out.string()).code == 2, "missing input exits 2");
  }

  {  // figure recipes: phase family with 13 spectra
    const auto r = run(bin + " figure fig4 --output-dir " + (work / "figs").string());
    CHECK_MSG(r.code == 0, "figure fig4 should succeed: " + r.out);
    const auto rows = slurp(work / "figs" / "fig4.csv");
    CHECK_MSG(count_lines(rows) == static_cast<std::size_t>(13 * 801 + 1),
              "13 spectra of 801 points");
    // 13 distinct phi2 labels
    std::istringstream is(rows);
    std::string line;
    std::getline(is, line);
    std::vector<std::string> seen;
    while (std::getline(is, line)) {
      const auto pos = line.rfind(',');
      const std::string phi = line.substr(pos + 1);
      if (seen.empty() || seen.back() != phi) seen.push_back(phi);
    }
    CHECK_MSG(seen.size() == 13, "13 phase groups, got " + std::to_string(seen.size()));

    const auto r5 = run(bin + " figure fig5b --output-dir " + (work / "figs").string());
    CHECK_MSG(r5.code == 0, "figure fig5b should succeed: " + r5.out);
    CHECK_MSG(count_lines(slurp(work / "figs" / "fig5b.csv")) == 3 * 801 + 1,
              "three modulus spectra");
    CHECK_MSG(run(bin + " figure nope --output-dir " + work.string()).code == 2,
              "unknown figure exits 2");
  }

  {  // figure fig3a and the one-peak-below-150 readoff on the monochromatic run
    const auto r = run(bin + " figure fig3a --output-dir " + (work / "figs").string() +
                       " --jobs 4");
    CHECK_MSG(r.code == 0, "figure fig3a should succeed: " + r.out);
    const fs::path mono = work / "figs" / "fig3a_monochromatic.csv";
    CHECK_MSG(fs::exists(mono) && fs::exists(work / "figs" / "fig3a_bichromatic.csv"),
              "both fig3a curves written");
    const fs::path out = work / "fig3a_peaks.csv";
    const auto rp = run(bin + " peaks --input " + mono.string() + " --output " + out.string());
    CHECK_MSG(rp.code == 0, "peaks on fig3a output: " + rp.out);
    const std::string text = slurp(out);
    CHECK_MSG(count_lines(text) == 2, "exactly one peak in the monochromatic spectrum");
    std::istringstream is(text);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    std::istringstream rs(row);
    std::string field;
    for (int i = 0; i < 4; ++i) std::getline(rs, field, ',');
    CHECK_MSG(std::stod(field) < 150.0,
              "monochromatic peak sits below 150 kHz, got " + field);
  }

  if (fails == 0) std::printf("cli_tests: all checks passed\n");
  return fails == 0 ? 0 : 1;
}
