#include "gridwave/grid.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "gridwave/errors.hpp"

namespace gridwave {

std::vector<std::string> SystemModel::channel_labels() const {
  std::vector<std::string> out;
  out.reserve(generators.size());
  int width = generators.size() > 100 ? 3 : 2;
  char buf[16];
  for (std::size_t i = 0; i < generators.size(); ++i) {
    std::snprintf(buf, sizeof buf, "bus%0*zu", width, i);
    out.emplace_back(buf);
  }
  return out;
}

double SystemModel::momentum(int node) const {
  const auto& g = generators[node];
  const double omega_s = 2.0 * std::numbers::pi * nominal_frequency;
  return 2.0 * g.inertia_h * g.rating_s / (base_power * omega_s);
}

double SystemModel::system_damping(int node) const {
  const auto& g = generators[node];
  return g.damping_d * g.rating_s / base_power;
}

double SystemModel::system_mech_power(int node) const {
  const auto& g = generators[node];
  return g.mech_power * g.rating_s / base_power;
}

double SystemModel::coupling(const TransmissionLine& l) const {
  return generators[l.from].internal_emf * generators[l.to].internal_emf * l.susceptance;
}

double SystemModel::steady_state_residual() const {
  std::vector<double> p(generators.size());
  for (int i = 0; i < size(); ++i) p[i] = system_mech_power(i);
  for (const auto& l : lines) {
    const double flow = coupling(l) * std::sin(initial_angles[l.from] - initial_angles[l.to]);
    p[l.from] -= flow;
    p[l.to] += flow;
  }
  double r = 0.0;
  for (double v : p) r = std::max(r, std::abs(v));
  return r;
}

bool SystemModel::is_connected() const {
  const int n = size();
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (const auto& l : lines) {
    adj[l.from].push_back(l.to);
    adj[l.to].push_back(l.from);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
  }
  for (char s : seen)
    if (!s) return false;
  return true;
}

void SystemModel::validate_structure() const {
  if (size() < 2) throw ValidationError("model needs at least 2 generators");
  if (!(nominal_frequency > 0.0)) throw ValidationError("nominal frequency must be positive");
  if (!(base_power > 0.0)) throw ValidationError("base power must be positive");
  for (int i = 0; i < size(); ++i) {
    const auto& g = generators[i];
    if (!(g.inertia_h > 0.0)) throw ValidationError("inertia H must be positive");
    if (g.damping_d < 0.0) throw ValidationError("damping D must be non-negative");
    if (!(g.rating_s > 0.0)) throw ValidationError("rating S must be positive");
    if (!(g.internal_emf > 0.0)) throw ValidationError("internal EMF must be positive");
  }
  for (const auto& l : lines) {
    if (l.from < 0 || l.from >= size() || l.to < 0 || l.to >= size() || l.from == l.to)
      throw ValidationError("line references an invalid node");
    if (!(l.susceptance > 0.0)) throw ValidationError("line susceptance must be positive");
  }
  if (!is_connected()) throw ValidationError("disconnected topology");
  if (initial_angles.size() != generators.size())
    throw ValidationError("initial angles missing for some nodes");
}

void SystemModel::validate() const {
  validate_structure();
  if (steady_state_residual() > 1e-8)
    throw ValidationError("initial angles do not solve the steady-state power balance");
}

std::vector<double> solve_steady_state(const SystemModel& model) {
  const int n = model.size();
  double net = 0.0;
  bool any_pm = false;
  for (int i = 0; i < n; ++i) {
    const double p = model.system_mech_power(i);
    net += p;
    if (p != 0.0) any_pm = true;
  }
  if (std::abs(net) > 1e-9)
    throw NumericalError("no equilibrium: mechanical power does not balance (net " +
                         std::to_string(net) + " pu)");
  if (!any_pm) return std::vector<double>(n, 0.0);  // flat profile, zero flows

  // Newton iteration on nodes 1..n-1 with node 0 fixed at angle 0.
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  for (int iter = 0; iter < 60; ++iter) {
    Eigen::VectorXd mismatch = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) mismatch(i) = model.system_mech_power(i);
    for (const auto& l : model.lines) {
      const double a = model.coupling(l);
      const double d = delta(l.from) - delta(l.to);
      const double flow = a * std::sin(d);
      const double stiff = a * std::cos(d);
      mismatch(l.from) -= flow;
      mismatch(l.to) += flow;
      jac(l.from, l.from) -= stiff;
      jac(l.to, l.to) -= stiff;
      jac(l.from, l.to) += stiff;
      jac(l.to, l.from) += stiff;
    }
    double worst = mismatch.cwiseAbs().maxCoeff();
    if (!std::isfinite(worst)) throw NumericalError("no equilibrium: solve diverged");
    if (worst < 1e-12) {
      std::vector<double> out(n);
      for (int i = 0; i < n; ++i) out[i] = delta(i);
      return out;
    }
    const Eigen::MatrixXd jr = jac.bottomRightCorner(n - 1, n - 1);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jr);
    if (!lu.isInvertible()) throw NumericalError("no equilibrium: singular steady-state solve");
    const Eigen::VectorXd step = lu.solve(mismatch.tail(n - 1));
    delta.tail(n - 1) -= step;
  }
  throw NumericalError("no equilibrium: Newton iteration did not converge");
}

SystemModel build_benchmark(const BenchmarkSpec& spec) {
  if (spec.nodes < 2 && spec.topology != Topology::two_area)
    throw ValidationError("benchmark needs at least 2 nodes");
  if (spec.topology == Topology::two_area) {
    if (spec.nodes < 1) throw ValidationError("two_area needs at least 1 node per area");
    if (!(spec.weak_tie_susceptance < spec.line_susceptance))
      throw ValidationError("weak tie susceptance must be below the intra-area susceptance");
  }

  SystemModel m;
  m.nominal_frequency = spec.nominal_frequency;
  m.base_power = spec.base_power;
  const int n = spec.topology == Topology::two_area ? 2 * spec.nodes : spec.nodes;
  m.generators.resize(n, spec.defaults);
  for (const auto& [node, params] : spec.overrides) {
    if (node < 0 || node >= n) throw ValidationError("override references an invalid node");
    m.generators[node] = params;
  }

  auto add_line = [&m](int i, int j, double b) {
    if (b > 0.0) m.lines.push_back({i, j, b});
  };
  switch (spec.topology) {
    case Topology::ring:
      for (int i = 0; i + 1 < n; ++i) add_line(i, i + 1, spec.line_susceptance);
      if (n > 2) add_line(n - 1, 0, spec.line_susceptance);
      break;
    case Topology::chain:
      for (int i = 0; i + 1 < n; ++i) add_line(i, i + 1, spec.line_susceptance);
      break;
    case Topology::two_area: {
      const int per = spec.nodes;
      for (int area = 0; area < 2; ++area) {
        const int base = area * per;
        for (int i = 0; i < per; ++i)
          for (int j = i + 1; j < per; ++j)
            add_line(base + i, base + j, spec.line_susceptance);
      }
      add_line(per - 1, per, spec.weak_tie_susceptance);
      break;
    }
  }

  if (!m.is_connected()) throw ValidationError("disconnected topology");
  m.initial_angles = solve_steady_state(m);
  m.validate();
  return m;
}

SignalSet coi_frequency(const SystemModel& model, const SignalSet& signals) {
  signals.validate();
  if (static_cast<int>(signals.channel_count()) != model.size())
    throw ValidationError("channel count does not match the model's generator count");
  double total = 0.0;
  std::vector<double> w(model.size());
  for (int i = 0; i < model.size(); ++i) {
    w[i] = model.generators[i].inertia_h * model.generators[i].rating_s;
    total += w[i];
  }
  SignalSet out;
  out.sample_rate = signals.sample_rate;
  out.start_time = signals.start_time;
  out.labels = {"coi"};
  out.channels.resize(1);
  auto& coi = out.channels[0];
  coi.assign(signals.length(), 0.0);
  for (int i = 0; i < model.size(); ++i) {
    const double wi = w[i] / total;
    const auto& ch = signals.channels[i];
    for (std::size_t k = 0; k < ch.size(); ++k) coi[k] += wi * ch[k];
  }
  return out;
}

}  // namespace gridwave
