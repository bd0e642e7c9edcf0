#include "gridwave/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "gridwave/errors.hpp"

namespace gridwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError("scenario key '" + key + "': cannot parse number '" + value + "'");
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError("scenario key '" + key + "': cannot parse integer '" + value + "'");
  return out;
}

bool is_generator_field(const std::string& field) {
  return field == "inertia_h" || field == "damping_d" || field == "rating_s" ||
         field == "emf_e" || field == "mech_power_pm";
}

void apply_generator_field(GeneratorParams& g, const std::string& field, double value) {
  if (field == "inertia_h") g.inertia_h = value;
  else if (field == "damping_d") g.damping_d = value;
  else if (field == "rating_s") g.rating_s = value;
  else if (field == "emf_e") g.internal_emf = value;
  else if (field == "mech_power_pm") g.mech_power = value;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario '" + path.string() + "'");

  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("scenario line " + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError("scenario line " + std::to_string(line_no) +
                            ": expected key = value");
    if (!kv.emplace(key, value).second)
      throw ValidationError("scenario key '" + key + "' given twice");
  }

  Scenario sc;
  std::set<std::string> required = {"topology", "nodes", "event_node", "event_time",
                                    "event_delta_p", "duration"};
  for (const auto& key : required)
    if (!kv.count(key)) throw ValidationError("scenario is missing required key '" + key + "'");

  for (const auto& [key, value] : kv) {
    if (key == "topology") {
      if (value == "ring") sc.benchmark.topology = Topology::ring;
      else if (value == "chain") sc.benchmark.topology = Topology::chain;
      else if (value == "two_area") sc.benchmark.topology = Topology::two_area;
      else throw ValidationError("unknown topology '" + value + "'");
    } else if (key == "nodes") {
      sc.benchmark.nodes = to_int(key, value);
    } else if (key == "line_b") {
      sc.benchmark.line_susceptance = to_number(key, value);
    } else if (key == "weak_tie_b") {
      sc.benchmark.weak_tie_susceptance = to_number(key, value);
    } else if (key == "nominal_frequency") {
      sc.benchmark.nominal_frequency = to_number(key, value);
    } else if (key == "base_power") {
      sc.benchmark.base_power = to_number(key, value);
    } else if (key == "event_node") {
      sc.event.node = to_int(key, value);
    } else if (key == "event_time") {
      sc.event.time = to_number(key, value);
    } else if (key == "event_delta_p") {
      sc.event.delta_p = to_number(key, value);
    } else if (key == "duration") {
      sc.options.duration = to_number(key, value);
    } else if (key == "dt_internal") {
      sc.options.dt_internal = to_number(key, value);
    } else if (is_generator_field(key)) {
      apply_generator_field(sc.benchmark.defaults, key, to_number(key, value));
    } else if (key.rfind("override.", 0) == 0) {
      const auto rest = key.substr(9);
      const auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw ValidationError("override key '" + key + "' must be override.<node>.<field>");
      const int node = to_int(key, rest.substr(0, dot));
      const std::string field = rest.substr(dot + 1);
      if (!is_generator_field(field))
        throw ValidationError("override key '" + key + "': unknown field '" + field + "'");
      sc.benchmark.overrides.emplace(node, GeneratorParams{});
    } else {
      throw ValidationError("unknown scenario key '" + key + "'");
    }
  }

  // Each override starts from the final defaults, so a default given below an
  // override line still applies to that node's untouched fields.
  for (auto& [node, params] : sc.benchmark.overrides) {
    params = sc.benchmark.defaults;
    const std::string prefix = "override." + std::to_string(node) + ".";
    for (const auto& [key, value] : kv) {
      if (key.rfind(prefix, 0) == 0)
        apply_generator_field(params, key.substr(prefix.size()), to_number(key, value));
    }
  }
  return sc;
}

}  // namespace gridwave
