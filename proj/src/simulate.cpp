#include "gridwave/simulate.hpp"

#include <cmath>
#include <numbers>

#include "gridwave/errors.hpp"

namespace gridwave {

namespace {

struct Coupling {
  int from;
  int to;
  double strength;  // E_i E_j B_ij
};

// Flattened per-machine quantities on the system base.
struct SwingSystem {
  int n = 0;
  double omega_s = 0.0;
  std::vector<double> inv_momentum;
  std::vector<double> damping;  // D_i S_i / Sbase
  std::vector<double> mech_power;
  std::vector<Coupling> couplings;
  int event_node = 0;
  double event_time = 0.0;
  double event_dp = 0.0;

  void derivative(const std::vector<double>& delta, const std::vector<double>& omega,
                  double t, std::vector<double>& d_delta, std::vector<double>& d_omega) const {
    for (int i = 0; i < n; ++i) {
      d_delta[i] = omega[i];
      d_omega[i] = mech_power[i];
    }
    if (t >= event_time - 1e-12) d_omega[event_node] += event_dp;
    for (const auto& c : couplings) {
      const double flow = c.strength * std::sin(delta[c.from] - delta[c.to]);
      d_omega[c.from] -= flow;
      d_omega[c.to] += flow;
    }
    for (int i = 0; i < n; ++i)
      d_omega[i] = (d_omega[i] - damping[i] * (omega[i] / omega_s)) * inv_momentum[i];
  }
};

}  // namespace

RawTrajectory integrate_swing(const SystemModel& model, const DisturbanceEvent& event,
                              double t_end, double dt) {
  model.validate_structure();
  if (event.node < 0 || event.node >= model.size())
    throw ValidationError("event node does not exist in the model");
  if (event.time < 0.0) throw ValidationError("event time must be non-negative");
  if (!(dt > 0.0) || dt > 0.01 + 1e-15)
    throw ValidationError("dt_internal must be positive and at most 0.01 s");
  if (!(t_end > 0.0)) throw ValidationError("integration span must be positive");

  const int n = model.size();
  SwingSystem sys;
  sys.n = n;
  sys.omega_s = 2.0 * std::numbers::pi * model.nominal_frequency;
  sys.inv_momentum.resize(n);
  sys.damping.resize(n);
  sys.mech_power.resize(n);
  for (int i = 0; i < n; ++i) {
    sys.inv_momentum[i] = 1.0 / model.momentum(i);
    sys.damping[i] = model.system_damping(i);
    sys.mech_power[i] = model.system_mech_power(i);
  }
  sys.couplings.reserve(model.lines.size());
  for (const auto& l : model.lines) sys.couplings.push_back({l.from, l.to, model.coupling(l)});
  sys.event_node = event.node;
  sys.event_time = event.time;
  sys.event_dp = event.delta_p;

  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  RawTrajectory traj;
  traj.dt = dt;
  traj.angles.assign(n, std::vector<double>(steps + 1));
  traj.speeds.assign(n, std::vector<double>(steps + 1));

  std::vector<double> delta(model.initial_angles), omega(n, 0.0);
  std::vector<double> kd1(n), kw1(n), kd2(n), kw2(n), kd3(n), kw3(n), kd4(n), kw4(n);
  std::vector<double> td(n), tw(n);

  const double sync_limit = std::numbers::pi / 2.0;
  auto record = [&](std::size_t k) {
    for (int i = 0; i < n; ++i) {
      traj.angles[i][k] = delta[i];
      traj.speeds[i][k] = omega[i];
    }
  };
  record(0);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    sys.derivative(delta, omega, t, kd1, kw1);
    for (int i = 0; i < n; ++i) {
      td[i] = delta[i] + 0.5 * dt * kd1[i];
      tw[i] = omega[i] + 0.5 * dt * kw1[i];
    }
    sys.derivative(td, tw, t + 0.5 * dt, kd2, kw2);
    for (int i = 0; i < n; ++i) {
      td[i] = delta[i] + 0.5 * dt * kd2[i];
      tw[i] = omega[i] + 0.5 * dt * kw2[i];
    }
    sys.derivative(td, tw, t + 0.5 * dt, kd3, kw3);
    for (int i = 0; i < n; ++i) {
      td[i] = delta[i] + dt * kd3[i];
      tw[i] = omega[i] + dt * kw3[i];
    }
    sys.derivative(td, tw, t + dt, kd4, kw4);
    for (int i = 0; i < n; ++i) {
      delta[i] += dt / 6.0 * (kd1[i] + 2.0 * kd2[i] + 2.0 * kd3[i] + kd4[i]);
      omega[i] += dt / 6.0 * (kw1[i] + 2.0 * kw2[i] + 2.0 * kw3[i] + kw4[i]);
    }
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(delta[i]) || !std::isfinite(omega[i]))
        throw NumericalError("simulation diverged: non-finite state at t = " +
                             std::to_string(t + dt) + " s");
    }
    if (!traj.loss_of_synchronism) {
      for (const auto& c : sys.couplings) {
        if (std::abs(delta[c.from] - delta[c.to]) > sync_limit) {
          traj.loss_of_synchronism = true;
          break;
        }
      }
    }
    record(k + 1);
  }
  return traj;
}

SimulationResult simulate(const SystemModel& model, const DisturbanceEvent& event,
                          const SimulationOptions& options) {
  model.validate();
  if (!(options.duration > event.time))
    throw ValidationError("duration must exceed the event time");
  if (!(options.output_rate > 0.0)) throw ValidationError("output rate must be positive");
  const double fs_src_real = 1.0 / options.dt_internal;
  const auto fs_src = static_cast<std::ptrdiff_t>(std::llround(fs_src_real));
  if (std::abs(fs_src_real - static_cast<double>(fs_src)) > 1e-6)
    throw ValidationError("1/dt_internal must be an integer sample rate");
  const double ratio_real = static_cast<double>(fs_src) / options.output_rate;
  const auto ratio = static_cast<std::ptrdiff_t>(std::llround(ratio_real));
  if (ratio < 1 || std::abs(ratio_real - static_cast<double>(ratio)) > 1e-9)
    throw ValidationError("internal rate must be an integer multiple of the output rate");

  const auto taps = design_lowpass_fir(static_cast<double>(fs_src), 0.45 * options.output_rate,
                                       0.1 * options.output_rate, 100.0);
  const auto half_span = static_cast<std::ptrdiff_t>((taps.size() - 1) / 2);

  // Run past `duration` so the filter never reads past the computed record.
  const double t_end =
      options.duration + static_cast<double>(half_span + 1) * options.dt_internal;
  RawTrajectory traj = integrate_swing(model, event, t_end, options.dt_internal);

  const auto n_out =
      static_cast<std::size_t>(std::llround(options.duration * options.output_rate)) + 1;
  SimulationResult result;
  // The flag covers the requested record only, not the padding integrated for the filter.
  const auto duration_steps = std::min<std::size_t>(
      static_cast<std::size_t>(std::llround(options.duration / options.dt_internal)),
      traj.steps() == 0 ? 0 : traj.steps() - 1);
  const double sync_limit = std::numbers::pi / 2.0;
  for (std::size_t k = 0; k <= duration_steps && !result.loss_of_synchronism; ++k) {
    for (const auto& l : model.lines) {
      if (std::abs(traj.angles[l.from][k] - traj.angles[l.to][k]) > sync_limit) {
        result.loss_of_synchronism = true;
        break;
      }
    }
  }
  result.signals.sample_rate = options.output_rate;
  result.signals.start_time = 0.0;
  result.signals.labels = model.channel_labels();
  result.signals.channels.resize(model.size());
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < model.size(); ++i) {
    auto& ch = result.signals.channels[i];
    ch.resize(n_out);
    for (std::size_t m = 0; m < n_out; ++m)
      ch[m] = fir_eval(traj.speeds[i], taps, static_cast<std::ptrdiff_t>(m) * ratio) / two_pi;
  }
  return result;
}

}  // namespace gridwave
