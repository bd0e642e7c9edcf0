#include "gridwave/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "gridwave/analysis.hpp"
#include "gridwave/csv.hpp"
#include "gridwave/errors.hpp"
#include "gridwave/scenario.hpp"
#include "gridwave/simulate.hpp"

namespace gridwave {

namespace fs = std::filesystem;

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// All report files are written into a staging directory and renamed into place
// only when the whole run has succeeded, so a failed run leaves no partial files.
class StagedOutput {
 public:
  explicit StagedOutput(const fs::path& outdir) : outdir_(outdir), staging_(outdir / ".staging") {
    std::error_code ec;
    fs::remove_all(staging_, ec);
    fs::create_directories(staging_, ec);
    if (ec) throw ValidationError("cannot create output directory '" + staging_.string() + "'");
  }
  ~StagedOutput() {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
  const fs::path& dir() const { return staging_; }
  std::vector<std::string> commit() {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(staging_)) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<std::string> final_names;
    for (const auto& tmp : files) {
      const fs::path dest = outdir_ / tmp.filename();
      fs::remove(dest);
      fs::rename(tmp, dest);
      final_names.push_back(dest.string());
    }
    return final_names;
  }

 private:
  fs::path outdir_;
  fs::path staging_;
};

struct SummaryData {
  std::string input_description;
  const SignalSet* signals = nullptr;
  const DecompositionSet* decomp = nullptr;
  const LocalizationReport* localization = nullptr;
  const CoherencyPartition* coherency = nullptr;
  const RocofEstimate* rocof = nullptr;
  bool loss_of_synchronism = false;
};

void write_summary(const fs::path& path, const SummaryData& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  out << "gridwave analysis summary\n";
  out << "=========================\n";
  out << "input: " << s.input_description << '\n';
  if (s.signals != nullptr && s.signals->length() > 0) {
    out << "record: " << s.signals->channel_count() << " channels, "
        << fmt(s.signals->sample_rate) << " Hz, " << s.signals->length() << " samples ["
        << fmt3(s.signals->start_time) << ", " << fmt3(s.signals->end_time()) << "] s\n";
  }
  out << "loss of synchronism: " << (s.loss_of_synchronism ? "yes" : "no") << '\n';
  if (s.decomp != nullptr) {
    out << "decomposition: levels " << s.decomp->levels << ", extension "
        << extension_name(s.decomp->extension) << ", bands";
    for (const auto& b : s.decomp->band_map.entries)
      out << ' ' << b.label << " [" << fmt(b.low_hz) << ", " << fmt(b.high_hz) << "] Hz";
    out << '\n';
  }
  if (s.localization != nullptr) {
    out << "\nlocalization (window [" << fmt3(s.localization->window_start) << ", "
        << fmt3(s.localization->window_end) << "] s, threshold "
        << fmt(s.localization->threshold) << " Hz):\n";
    if (!s.localization->disturbance_found) {
      out << "  no disturbance found\n";
    } else {
      int rank = 1;
      for (const auto& e : s.localization->ranking) {
        out << "  " << rank++ << ". " << e.label << "  energy " << fmt(e.energy) << " Hz^2";
        if (e.arrival_time)
          out << "  arrival " << fmt3(*e.arrival_time) << " s";
        else
          out << "  not detected";
        out << '\n';
      }
    }
  }
  if (s.coherency != nullptr) {
    out << "\ncoherency (window [" << fmt3(s.coherency->window_start) << ", "
        << fmt3(s.coherency->window_end) << "] s, theta_in " << fmt(s.coherency->theta_in)
        << ", theta_out " << fmt(s.coherency->theta_out) << "):\n";
    for (std::size_t g = 0; g < s.coherency->groups.size(); ++g) {
      out << "  group " << (g + 1) << " (ref "
          << s.coherency->labels[s.coherency->reference_channel[g]] << "):";
      for (int c : s.coherency->groups[g]) out << ' ' << s.coherency->labels[c];
      out << '\n';
    }
    if (s.coherency->opposing_pairs.empty()) {
      out << "  opposing pairs: none\n";
    } else {
      out << "  opposing pairs:";
      for (const auto& [a, b] : s.coherency->opposing_pairs)
        out << " (" << (a + 1) << ", " << (b + 1) << ")";
      out << '\n';
    }
    out << "  weakly participating:";
    if (s.coherency->weakly_participating.empty()) {
      out << " none";
    } else {
      for (int c : s.coherency->weakly_participating) out << ' ' << s.coherency->labels[c];
    }
    out << '\n';
  }
  if (s.rocof != nullptr) {
    out << "\nrocof (A-band slope, window [" << fmt3(s.rocof->window_start) << ", "
        << fmt3(s.rocof->window_end) << "] s):\n";
    for (std::size_t c = 0; c < s.rocof->labels.size(); ++c)
      out << "  " << s.rocof->labels[c] << ": " << fmt(s.rocof->slopes[c])
          << " Hz/s (residual " << fmt(s.rocof->residuals[c]) << ")\n";
    if (s.rocof->system_slope)
      out << "  system (COI): " << fmt(*s.rocof->system_slope) << " Hz/s (residual "
          << fmt(*s.rocof->system_residual) << ")\n";
  }
}

}  // namespace

std::vector<fs::path> emit_plotdata(const DecompositionSet& decomp, const fs::path& outdir,
                                    std::optional<std::pair<double, double>> energy_window,
                                    double threshold) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec || !fs::is_directory(outdir))
    throw ValidationError("cannot create output directory '" + outdir.string() + "'");
  auto files = write_components_csv(outdir, decomp);

  EnergyProfile profile;
  if (decomp.channels.empty()) {
    profile.window_start = 0.0;
    profile.window_end = 0.0;
  } else if (energy_window) {
    profile = d1_energy(decomp, energy_window->first, energy_window->second);
  } else {
    double t0 = decomp.start_time;
    double t1 = decomp.end_time();
    if (const auto arrival = first_arrival(decomp, threshold)) {
      t0 = *arrival;
      t1 = std::min(t1, t0 + 0.4);
    }
    if (!(t1 > t0)) t1 = decomp.end_time();
    profile = d1_energy(decomp, t0, t1);
  }
  const fs::path energies = outdir / "energies.csv";
  write_energies_csv(energies, profile);
  files.push_back(energies);
  return files;
}

PipelineOutcome run_pipeline(const PipelineConfig& config) {
  PipelineOutcome outcome;
  try {
    if (config.scenario_path.empty() == config.signals_path.empty())
      throw ValidationError("exactly one input source (scenario or signals CSV) is required");
    if (config.output_dir.empty()) throw ValidationError("output directory is required");
    if (config.levels < 1) throw ValidationError("levels must be at least 1");
    if (!(config.threshold > 0.0)) throw ValidationError("threshold must be positive");
    if (config.scope == PipelineScope::simulate_only && config.scenario_path.empty())
      throw ValidationError("simulate requires a scenario input");

    const fs::path outdir(config.output_dir);
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec || !fs::is_directory(outdir))
      throw ValidationError("cannot create output directory '" + outdir.string() + "'");
    StagedOutput staged(outdir);

    // Acquire the record.
    SignalSet signals;
    std::optional<SystemModel> model;
    std::optional<double> event_time;
    std::string input_description;
    if (!config.scenario_path.empty()) {
      const Scenario sc = stage("load-scenario", [&] { return load_scenario(config.scenario_path); });
      model = stage("build-benchmark", [&] { return build_benchmark(sc.benchmark); });
      const SimulationResult sim =
          stage("simulate", [&] { return simulate(*model, sc.event, sc.options); });
      signals = sim.signals;
      outcome.loss_of_synchronism = sim.loss_of_synchronism;
      event_time = sc.event.time;
      input_description = "scenario " + config.scenario_path;
      write_signals_csv(staged.dir() / "signals.csv", signals);
    } else {
      signals = stage("load-signals", [&] { return load_signals_csv(config.signals_path); });
      input_description = "signals " + config.signals_path;
    }

    SummaryData summary;
    summary.input_description = input_description;
    summary.signals = &signals;
    summary.loss_of_synchronism = outcome.loss_of_synchronism;

    std::ostringstream headline;
    DecompositionSet decomp;
    LocalizationReport localization;
    CoherencyPartition coherency;
    RocofEstimate rocof;

    if (config.scope != PipelineScope::simulate_only) {
      decomp = stage("decompose",
                     [&] { return decompose_set(signals, config.levels, config.extension); });
      summary.decomp = &decomp;

      if (config.scope == PipelineScope::decompose_only ||
          config.scope == PipelineScope::full) {
        write_components_csv(staged.dir(), decomp);
      }

      // Event-time estimate: the scenario's event instant, or the earliest |D1|
      // threshold crossing when analyzing a bare CSV record.
      std::optional<double> t_event = event_time;
      if (!t_event && !decomp.channels.empty())
        t_event = stage("localize", [&] { return first_arrival(decomp, config.threshold); });

      const double record_start = decomp.start_time;
      const double record_end = decomp.channels.empty() ? record_start : decomp.end_time();

      if (config.scope == PipelineScope::full || config.scope == PipelineScope::localize_only) {
        if (!decomp.channels.empty()) {
          auto window = config.event_window;
          if (!window) {
            double t0 = t_event.value_or(record_start);
            double t1 = std::min(record_end, t0 + 0.4);
            if (!(t1 > t0)) {
              t0 = record_start;
              t1 = record_end;
            }
            window = {{t0, t1}};
          }
          localization = stage("localize", [&] {
            return localize(decomp, window->first, window->second, config.threshold);
          });
        }
        summary.localization = &localization;
        write_localization_csv(staged.dir() / "localization.csv", localization);
        // energies.csv reports channels in record order, not ranking order
        EnergyProfile profile;
        if (!decomp.channels.empty())
          profile = d1_energy(decomp, localization.window_start, localization.window_end);
        write_energies_csv(staged.dir() / "energies.csv", profile);
        outcome.disturbance_found = localization.disturbance_found;
        if (localization.disturbance_found)
          headline << "top-ranked origin: " << localization.ranking.front().label;
        else
          headline << "no disturbance found";
      }

      if (config.scope == PipelineScope::full || config.scope == PipelineScope::coherency_only) {
        if (!decomp.channels.empty()) {
          auto window = config.coherency_window;
          if (!window) window = {{t_event.value_or(record_start), record_end}};
          coherency = stage("coherency", [&] {
            return coherency_groups(decomp, window->first, window->second, config.theta_in,
                                    config.theta_out);
          });
        }
        summary.coherency = &coherency;
        write_coherency_csv(staged.dir() / "coherency.csv", coherency);
        if (config.scope == PipelineScope::coherency_only) {
          headline << coherency.groups.size() << " coherent group(s), "
                   << coherency.opposing_pairs.size() << " opposing pair(s)";
        }
      }

      if (config.scope == PipelineScope::full || config.scope == PipelineScope::rocof_only) {
        if (!decomp.channels.empty()) {
          auto window = config.rocof_window;
          if (!window) {
            double t0 = t_event.value_or(record_start) + 3.0;
            const double min_span = 10.0 / decomp.sample_rate;
            if (t0 + min_span > record_end) t0 = record_start;
            window = {{t0, record_end}};
          }
          rocof = stage("rocof", [&] {
            return estimate_rocof(decomp, model ? &*model : nullptr, window->first,
                                  window->second);
          });
        }
        summary.rocof = &rocof;
        write_rocof_csv(staged.dir() / "rocof.csv", rocof);
        if (config.scope == PipelineScope::rocof_only && rocof.system_slope)
          headline << "system ROCOF: " << fmt(*rocof.system_slope) << " Hz/s";
      }

      if (config.scope == PipelineScope::full)
        write_summary(staged.dir() / "summary.txt", summary);
    }

    outcome.files_written = staged.commit();
    outcome.message = headline.str();
    return outcome;
  } catch (const ValidationError& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
    return outcome;
  } catch (const NumericalError& e) {
    outcome.exit_code = 2;
    outcome.message = e.what();
    return outcome;
  } catch (const fs::filesystem_error& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
    return outcome;
  }
}

}  // namespace gridwave
