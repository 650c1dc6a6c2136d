#include "swapsim/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swapsim {

std::string render_csv(const ScanResult& scan) {
  std::ostringstream out;
  out << "beta_rad,conditioned_counts,unconditioned_counts,pulses,"
         "window_m2,window_m1,window_0,window_p1,window_p2\n";
  for (const ScanPoint& p : scan.points) {
    out << format_double(p.beta) << ',' << format_double(p.conditioned) << ','
        << format_double(p.unconditioned) << ',' << p.pulses;
    for (int i = 0; i < 5; ++i) out << ',' << format_double(p.windows[i]);
    out << '\n';
  }
  return out.str();
}

namespace {

void render_fit(std::ostringstream& out, const char* name,
                const std::optional<FitResult>& fit) {
  out << "[fit." << name << "]\n";
  out << "available = " << (fit ? "true" : "false") << "\n";
  if (fit) {
    out << "visibility = " << format_double(fit->visibility) << "\n";
    out << "sigma_v = " << format_double(fit->sigma_v) << "\n";
    out << "amplitude = " << format_double(fit->amplitude) << "\n";
    out << "phase_offset_rad = " << format_double(fit->phase_offset) << "\n";
  }
  out << "\n";
}

}  // namespace

std::string render_summary(const ScanResult& scan, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# entanglement swapping scan summary\n\n";

  out << "[run]\n";
  out << "mode = " << to_string(scan.meta.mode) << "\n";
  out << "seed = " << scan.meta.seed << "\n";
  out << "pulses_per_point = " << scan.meta.pulses_per_point << "\n";
  out << "scan_points = " << scan.points.size() << "\n";
  out << "total_conditioned = " << format_double(scan.total_conditioned()) << "\n";
  out << "total_unconditioned = " << format_double(scan.total_unconditioned()) << "\n\n";

  render_fit(out, "conditioned", scan.conditioned_fit);
  render_fit(out, "unconditioned", scan.unconditioned_fit);

  if (scan.conditioned_fit) {
    const Report r = summarize(scan);
    out << "[entanglement]\n";
    out << "visibility = " << format_double(r.visibility_clamped) << "\n";
    out << "sigma_v = " << format_double(r.sigma_v) << "\n";
    out << "f2 = " << format_double(r.f2) << "\n";
    out << "classification = " << to_string(r.classification) << "\n";
    out << "bell_sigma_distance = " << format_double(r.bell_sigma_distance) << "\n";
    out << "peres_bound = " << format_double(kPeresVisibilityBound) << "\n";
    out << "bell_bound = " << format_double(kBellVisibilityBound) << "\n\n";
  }

  std::int64_t heralds = 0, cross = 0, excluded = 0;
  for (const ScanPoint& p : scan.points) {
    heralds += p.heralds;
    cross += p.bsa_cross_same_bin;
    excluded += p.excluded_multi_click;
  }
  out << "[diagnostics]\n";
  out << "heralds = " << heralds << "\n";
  out << "bsa_cross_same_bin = " << cross << "\n";
  out << "excluded_multi_click = " << excluded << "\n\n";

  // Configuration echo, namespaced to keep sections unambiguous.
  std::istringstream cfg_lines(dump_config(cfg));
  std::string line;
  while (std::getline(cfg_lines, line)) {
    if (!line.empty() && line.front() == '[')
      out << "[config." << line.substr(1) << "\n";
    else
      out << line << "\n";
  }
  return out.str();
}

void emit_results(const std::string& out_dir, const ExperimentConfig& cfg,
                  const ScanResult& scan) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto write_file = [&](const char* name, const std::string& content) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    out << content;
  };
  write_file("scan.csv", render_csv(scan));
  write_file("summary.ini", render_summary(scan, cfg));
}

}  // namespace swapsim
