#pragma once

#include <cstddef>
#include <vector>

#include "gridwave/grid.hpp"
#include "gridwave/signal.hpp"

namespace gridwave {

struct SimulationOptions {
  double duration = 30.0;     // s; must exceed the event time
  double dt_internal = 1e-3;  // s; at most 0.01, and 1/dt must be a multiple of output_rate
  double output_rate = 10.0;  // Hz
};

// Internal-resolution trajectory, one state per integrator step (step 0 = t = 0).
// speeds are rotor speed deviations in rad/s; angles in rad.
struct RawTrajectory {
  double dt = 0.0;
  std::vector<std::vector<double>> angles;  // [node][step]
  std::vector<std::vector<double>> speeds;  // [node][step]
  bool loss_of_synchronism = false;
  std::size_t steps() const { return angles.empty() ? 0 : angles.front().size(); }
};

// Fixed-step RK4 integration of the classical swing equations over [0, t_end].
// The event injects a mechanical-power step at event.time. Deterministic:
// identical inputs give bit-identical trajectories.
RawTrajectory integrate_swing(const SystemModel& model, const DisturbanceEvent& event,
                              double t_end, double dt);

struct SimulationResult {
  SignalSet signals;  // frequency deviation in Hz at output_rate, t in [0, duration]
  bool loss_of_synchronism = false;
};

// Integrates the swing dynamics, then anti-alias filters (cutoff 0.45 * output_rate)
// and decimates to the output rate. The integration runs past `duration` by the
// filter half-span so every output sample is computed from real data.
// Angle separation beyond pi/2 on any line sets the loss-of-synchronism flag; the
// record is still returned.
SimulationResult simulate(const SystemModel& model, const DisturbanceEvent& event,
                          const SimulationOptions& options);

}  // namespace gridwave
