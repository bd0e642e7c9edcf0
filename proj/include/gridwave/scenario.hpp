#pragma once

#include <filesystem>

#include "gridwave/grid.hpp"
#include "gridwave/simulate.hpp"

namespace gridwave {

// A simulation scenario: benchmark topology, generator parameters, one disturbance
// and the integration settings. Parsed from a flat key = value text file with '#'
// comments; see the README for the schema.
struct Scenario {
  BenchmarkSpec benchmark;
  DisturbanceEvent event;
  SimulationOptions options;
};

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace gridwave
