#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridwave/grid.hpp"
#include "gridwave/wavelet.hpp"

namespace gridwave {

// Per-channel sum of squared D1 values over a time window.
struct EnergyProfile {
  std::vector<std::string> labels;
  std::vector<double> energies;  // Hz^2
  double window_start = 0.0;
  double window_end = 0.0;
};

EnergyProfile d1_energy(const DecompositionSet& decomp, double t0, double t1);

struct LocalizationEntry {
  std::string label;
  double energy = 0.0;
  std::optional<double> arrival_time;  // first |D1| threshold crossing inside the window
};

struct LocalizationReport {
  std::vector<LocalizationEntry> ranking;  // descending energy, ties by label; empty when
                                           // no channel crosses the threshold
  double threshold = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  bool disturbance_found = false;
};

LocalizationReport localize(const DecompositionSet& decomp, double t0, double t1,
                            double threshold);

// Earliest |D1| threshold crossing over the whole record; the default event-time
// estimate when the true event instant is unknown.
std::optional<double> first_arrival(const DecompositionSet& decomp, double threshold);

// Sign-structured grouping of the deepest detail band (D_L). Channels join a group
// only while every within-group pair correlates at least theta_in; group pairs whose
// mean cross-correlation is at most -theta_out are marked opposing. Low-amplitude
// groups (mean member RMS below 0.25x the strongest group) move to the
// weakly-participating set, as do zero-variance channels.
struct CoherencyPartition {
  std::vector<std::string> labels;  // analysis channel order
  std::vector<std::vector<int>> groups;
  std::vector<int> reference_channel;  // per group: the member with the largest RMS
  std::vector<int> weakly_participating;
  std::vector<std::pair<int, int>> opposing_pairs;  // group index pairs
  std::vector<std::vector<double>> correlation;
  std::vector<double> rms;  // per channel, over the window
  double window_start = 0.0;
  double window_end = 0.0;
  double theta_in = 0.0;
  double theta_out = 0.0;

  int group_of(int channel) const;  // group index, or -1 when weakly participating
};

CoherencyPartition coherency_groups(const DecompositionSet& decomp, double t0, double t1,
                                    double theta_in = 0.8, double theta_out = 0.5);

// Least-squares slope of each channel's final approximation over the fit window.
// With a model, the inertia-weighted average channel is fitted as the system value.
struct RocofEstimate {
  std::vector<std::string> labels;
  std::vector<double> slopes;     // Hz/s
  std::vector<double> residuals;  // RMS of the fit residual, Hz
  std::optional<double> system_slope;
  std::optional<double> system_residual;
  double window_start = 0.0;
  double window_end = 0.0;
};

RocofEstimate estimate_rocof(const DecompositionSet& decomp, const SystemModel* model,
                             double t0, double t1);

}  // namespace gridwave
