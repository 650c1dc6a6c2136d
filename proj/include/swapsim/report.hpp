#pragma once
// Deterministic renderers for scan results: a per-point CSV and an
// INI-style summary with the fits, the entanglement verdict and a full
// configuration echo.  No timestamps and no environment-dependent fields,
// so identical runs produce byte-identical files.

#include <string>

#include "swapsim/config.hpp"
#include "swapsim/experiment.hpp"

namespace swapsim {

std::string render_csv(const ScanResult& scan);

std::string render_summary(const ScanResult& scan, const ExperimentConfig& cfg);

/// Write scan.csv and summary.ini under out_dir (created if missing).
void emit_results(const std::string& out_dir, const ExperimentConfig& cfg,
                  const ScanResult& scan);

}  // namespace swapsim
