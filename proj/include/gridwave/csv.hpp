#pragma once

#include <filesystem>

#include "gridwave/analysis.hpp"
#include "gridwave/signal.hpp"
#include "gridwave/wavelet.hpp"

namespace gridwave {

// Header `time,<label1>,...`; time printed with 3 decimals, values with 12
// significant digits. Writers are deterministic: same data, same bytes.
void write_signals_csv(const std::filesystem::path& path, const SignalSet& signals);

// Strict reader: uniform field counts, no empty cells, unique labels. The sample
// rate is inferred from the median time step; steps deviating by more than 1%
// are rejected as nonuniform sampling.
SignalSet load_signals_csv(const std::filesystem::path& path);

// One file per channel, components_<label>.csv with header time,D1,...,AL.
// Returns the written paths in channel order.
std::vector<std::filesystem::path> write_components_csv(const std::filesystem::path& dir,
                                                        const DecompositionSet& decomp);

void write_energies_csv(const std::filesystem::path& path, const EnergyProfile& profile);
void write_localization_csv(const std::filesystem::path& path,
                            const LocalizationReport& report);
void write_coherency_csv(const std::filesystem::path& path, const CoherencyPartition& part);
void write_rocof_csv(const std::filesystem::path& path, const RocofEstimate& est);

}  // namespace gridwave
