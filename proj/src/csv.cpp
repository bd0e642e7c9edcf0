#include "gridwave/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "gridwave/errors.hpp"

namespace gridwave {

namespace {

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t column) {
  const auto where = [&] {
    return "line " + std::to_string(line_no) + ", column " + std::to_string(column);
  };
  if (cell.empty()) throw ValidationError(where() + ": empty cell");
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError(where() + ": cannot parse '" + cell + "' as a number");
  return value;
}

}  // namespace

void write_signals_csv(const std::filesystem::path& path, const SignalSet& signals) {
  signals.validate();
  auto out = open_out(path);
  out << "time";
  for (const auto& label : signals.labels) out << ',' << label;
  out << '\n';
  for (std::size_t i = 0; i < signals.length(); ++i) {
    out << fmt_time(signals.time_at(i));
    for (const auto& ch : signals.channels) out << ',' << fmt_value(ch[i]);
    out << '\n';
  }
}

SignalSet load_signals_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty file: '" + path.string() + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_fields(line);
  if (header.empty() || header.front() != "time")
    throw ValidationError("header must start with a 'time' column");

  SignalSet set;
  set.labels.assign(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (const auto& l : set.labels) {
    if (l.empty()) throw ValidationError("empty channel label in header");
    if (!seen.insert(l).second) throw ValidationError("duplicate channel label '" + l + "'");
  }
  set.channels.resize(set.labels.size());

  std::vector<double> times;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    times.push_back(parse_cell(fields[0], line_no, 1));
    for (std::size_t c = 0; c < set.channels.size(); ++c)
      set.channels[c].push_back(parse_cell(fields[c + 1], line_no, c + 2));
  }
  if (times.size() < 2)
    throw ValidationError("need at least 2 samples to infer the sample rate");

  std::vector<double> steps(times.size() - 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) steps[i] = times[i + 1] - times[i];
  std::vector<double> sorted = steps;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(median > 0.0)) throw ValidationError("time column must increase");
  for (double s : steps)
    if (std::abs(s - median) > 0.01 * median) throw ValidationError("nonuniform sampling");

  set.sample_rate = 1.0 / median;
  set.start_time = times.front();
  set.validate();
  return set;
}

std::vector<std::filesystem::path> write_components_csv(const std::filesystem::path& dir,
                                                        const DecompositionSet& decomp) {
  std::vector<std::filesystem::path> written;
  for (const auto& ch : decomp.channels) {
    const auto path = dir / ("components_" + ch.label + ".csv");
    auto out = open_out(path);
    out << "time";
    for (const auto& band : decomp.band_map.entries) out << ',' << band.label;
    out << '\n';
    for (std::size_t i = 0; i < decomp.length(); ++i) {
      out << fmt_time(decomp.time_at(i));
      for (const auto& comp : ch.components) out << ',' << fmt_value(comp[i]);
      out << '\n';
    }
    written.push_back(path);
  }
  return written;
}

void write_energies_csv(const std::filesystem::path& path, const EnergyProfile& profile) {
  auto out = open_out(path);
  out << "channel,energy\n";
  for (std::size_t c = 0; c < profile.labels.size(); ++c)
    out << profile.labels[c] << ',' << fmt_value(profile.energies[c]) << '\n';
}

void write_localization_csv(const std::filesystem::path& path,
                            const LocalizationReport& report) {
  auto out = open_out(path);
  out << "channel,energy,arrival_time\n";
  for (const auto& entry : report.ranking) {
    out << entry.label << ',' << fmt_value(entry.energy) << ',';
    if (entry.arrival_time)
      out << fmt_time(*entry.arrival_time);
    else
      out << "not_detected";
    out << '\n';
  }
}

void write_coherency_csv(const std::filesystem::path& path, const CoherencyPartition& part) {
  auto out = open_out(path);
  out << "channel,group,rms_d5\n";
  for (std::size_t c = 0; c < part.labels.size(); ++c) {
    const int g = part.group_of(static_cast<int>(c));
    out << part.labels[c] << ',';
    if (g >= 0)
      out << (g + 1);
    else
      out << "weak";
    out << ',' << fmt_value(part.rms[c]) << '\n';
  }
}

void write_rocof_csv(const std::filesystem::path& path, const RocofEstimate& est) {
  auto out = open_out(path);
  out << "channel,slope_hz_per_s,residual\n";
  for (std::size_t c = 0; c < est.labels.size(); ++c)
    out << est.labels[c] << ',' << fmt_value(est.slopes[c]) << ','
        << fmt_value(est.residuals[c]) << '\n';
  if (est.system_slope)
    out << "system_coi," << fmt_value(*est.system_slope) << ','
        << fmt_value(*est.system_residual) << '\n';
}

}  // namespace gridwave
