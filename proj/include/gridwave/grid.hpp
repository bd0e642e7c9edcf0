#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridwave/signal.hpp"

namespace gridwave {

// Classical machine parameters. H, D and Pm are expressed on the machine rating S;
// they are converted to the common system base before any computation.
struct GeneratorParams {
  double inertia_h = 4.0;     // s
  double damping_d = 0.0;     // pu torque per pu speed deviation
  double rating_s = 100.0;    // MVA
  double internal_emf = 1.0;  // pu
  double mech_power = 0.0;    // pu
};

struct TransmissionLine {
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // pu on the system base
};

// Lossless machine-to-machine network with a solved operating point.
struct SystemModel {
  std::vector<GeneratorParams> generators;
  std::vector<TransmissionLine> lines;
  double nominal_frequency = 60.0;  // Hz
  double base_power = 100.0;        // MVA
  std::vector<double> initial_angles;  // rad, steady state

  int size() const { return static_cast<int>(generators.size()); }
  std::vector<std::string> channel_labels() const;  // "bus00", "bus01", ...

  // Machine quantities on the system base.
  double momentum(int node) const;        // M_i = 2 H_i S_i / (Sbase * omega_s)
  double system_damping(int node) const;  // D_i S_i / Sbase
  double system_mech_power(int node) const;
  double coupling(const TransmissionLine& l) const;  // E_i E_j B_ij

  // Max per-node power mismatch |Pm_i - Pe_i(initial_angles)| in pu.
  double steady_state_residual() const;
  bool is_connected() const;
  // Parameter ranges, line endpoints, connectivity.
  void validate_structure() const;
  // validate_structure plus the steady-state residual bound (< 1e-8 pu).
  void validate() const;
};

// A step change of active power at one node: negative delta_p models generation loss.
// delta_p is expressed in pu on the system base.
struct DisturbanceEvent {
  int node = 0;
  double time = 0.0;   // s
  double delta_p = 0.0;  // pu
};

enum class Topology { ring, chain, two_area };

// Desk-scale stand-ins for an interconnected system: a ring, an open chain, or two
// densely connected areas joined by one weak tie.
struct BenchmarkSpec {
  Topology topology = Topology::ring;
  int nodes = 20;  // ring/chain: node count; two_area: nodes per area
  double line_susceptance = 0.35;      // pu; ring/chain links and intra-area links
  double weak_tie_susceptance = 0.05;  // pu; two_area tie only
  GeneratorParams defaults{};
  std::map<int, GeneratorParams> overrides;
  double nominal_frequency = 60.0;
  double base_power = 100.0;
};

// Builds the benchmark and solves its steady state. Lines with non-positive
// susceptance are dropped; a graph that falls apart is rejected.
SystemModel build_benchmark(const BenchmarkSpec& spec);

// Newton solve of the lossless power balance with node 0 as angle reference.
// Throws NumericalError("no equilibrium") when the net power is unbalanced or the
// iteration fails to converge.
std::vector<double> solve_steady_state(const SystemModel& model);

// Inertia-weighted average channel: sum(H_i S_i f_i) / sum(H_i S_i).
// Channels must correspond one-to-one with the model's generators.
SignalSet coi_frequency(const SystemModel& model, const SignalSet& signals);

}  // namespace gridwave
