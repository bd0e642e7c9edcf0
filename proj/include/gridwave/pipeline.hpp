#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridwave/wavelet.hpp"

namespace gridwave {

// Which stages a CLI subcommand runs; full is the `analyze` pipeline.
enum class PipelineScope {
  full,
  simulate_only,
  decompose_only,
  localize_only,
  coherency_only,
  rocof_only,
};

struct PipelineConfig {
  std::string scenario_path;  // exactly one of scenario_path / signals_path
  std::string signals_path;
  std::string output_dir;
  PipelineScope scope = PipelineScope::full;
  int levels = 5;
  Extension extension = Extension::symmetric;
  double threshold = 1e-4;  // Hz, on |D1|
  double theta_in = 0.8;
  double theta_out = 0.5;
  // Window defaults when unset: the event window is [event, event + 0.4 s] (event
  // time from the scenario, or the earliest |D1| arrival for CSV input); coherency
  // spans from the event to the end of the record; the ROCOF fit starts 3 s after
  // the event.
  std::optional<std::pair<double, double>> event_window;
  std::optional<std::pair<double, double>> coherency_window;
  std::optional<std::pair<double, double>> rocof_window;
};

struct PipelineOutcome {
  int exit_code = 0;  // 0 success, 1 validation error, 2 numerical failure
  std::string message;
  std::vector<std::string> files_written;
  bool disturbance_found = false;
  bool loss_of_synchronism = false;
};

// Runs the configured stages and writes the report files into output_dir.
// Files land under their final names only if the whole run succeeds; nothing
// is left behind on failure.
PipelineOutcome run_pipeline(const PipelineConfig& config);

// Plot-data export: one components_<label>.csv per channel plus energies.csv with
// the D1 energy per channel. When no window is given, the energy window is derived
// from the earliest |D1| arrival (0.4 s span), or the whole record if nothing crosses.
std::vector<std::filesystem::path> emit_plotdata(
    const DecompositionSet& decomp, const std::filesystem::path& outdir,
    std::optional<std::pair<double, double>> energy_window = std::nullopt,
    double threshold = 1e-4);

}  // namespace gridwave
