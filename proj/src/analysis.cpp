#include "gridwave/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gridwave/errors.hpp"

namespace gridwave {

namespace {

// Inclusive sample index range [t0, t1], with a small slack against time-grid roundoff.
std::pair<std::size_t, std::size_t> window_indices(const DecompositionSet& d, double t0,
                                                   double t1) {
  if (!(t1 > t0)) throw ValidationError("empty window");
  if (d.length() == 0) throw ValidationError("empty record");
  const double eps = 1e-9;
  if (t0 < d.start_time - eps || t1 > d.end_time() + eps)
    throw ValidationError("window outside record");
  const double fs = d.sample_rate;
  const auto first =
      static_cast<std::ptrdiff_t>(std::ceil((t0 - d.start_time) * fs - 1e-9));
  const auto last =
      static_cast<std::ptrdiff_t>(std::floor((t1 - d.start_time) * fs + 1e-9));
  if (last < first) throw ValidationError("empty window");
  return {static_cast<std::size_t>(std::max<std::ptrdiff_t>(first, 0)),
          std::min(static_cast<std::size_t>(last), d.length() - 1)};
}

struct LineFit {
  double slope = 0.0;
  double rms_residual = 0.0;
};

LineFit fit_line(const DecompositionSet& d, const std::vector<double>& y, std::size_t i0,
                 std::size_t i1) {
  const auto n = static_cast<double>(i1 - i0 + 1);
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    tbar += d.time_at(i);
    ybar += y[i];
  }
  tbar /= n;
  ybar /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    const double dt = d.time_at(i) - tbar;
    num += dt * (y[i] - ybar);
    den += dt * dt;
  }
  LineFit fit;
  fit.slope = den > 0.0 ? num / den : 0.0;
  const double intercept = ybar - fit.slope * tbar;
  double ss = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    const double r = y[i] - (intercept + fit.slope * d.time_at(i));
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace

EnergyProfile d1_energy(const DecompositionSet& decomp, double t0, double t1) {
  EnergyProfile profile;
  profile.window_start = t0;
  profile.window_end = t1;
  if (decomp.channels.empty()) {
    if (!(t1 > t0)) throw ValidationError("empty window");
    return profile;
  }
  const auto [i0, i1] = window_indices(decomp, t0, t1);
  for (const auto& ch : decomp.channels) {
    const auto& d1 = ch.components.front();
    double e = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) e += d1[i] * d1[i];
    profile.labels.push_back(ch.label);
    profile.energies.push_back(e);
  }
  return profile;
}

LocalizationReport localize(const DecompositionSet& decomp, double t0, double t1,
                            double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("threshold must be positive");
  LocalizationReport report;
  report.threshold = threshold;
  report.window_start = t0;
  report.window_end = t1;
  const EnergyProfile profile = d1_energy(decomp, t0, t1);
  if (decomp.channels.empty()) return report;

  const auto [i0, i1] = window_indices(decomp, t0, t1);
  std::vector<LocalizationEntry> entries;
  for (std::size_t c = 0; c < decomp.channels.size(); ++c) {
    LocalizationEntry entry;
    entry.label = profile.labels[c];
    entry.energy = profile.energies[c];
    const auto& d1 = decomp.channels[c].components.front();
    for (std::size_t i = i0; i <= i1; ++i) {
      if (std::abs(d1[i]) > threshold) {
        entry.arrival_time = decomp.time_at(i);
        break;
      }
    }
    entries.push_back(std::move(entry));
  }
  report.disturbance_found =
      std::any_of(entries.begin(), entries.end(),
                  [](const LocalizationEntry& e) { return e.arrival_time.has_value(); });
  if (!report.disturbance_found) return report;  // empty ranking, flag down

  std::stable_sort(entries.begin(), entries.end(),
                   [](const LocalizationEntry& a, const LocalizationEntry& b) {
                     if (a.energy != b.energy) return a.energy > b.energy;
                     return a.label < b.label;
                   });
  report.ranking = std::move(entries);
  return report;
}

std::optional<double> first_arrival(const DecompositionSet& decomp, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("threshold must be positive");
  std::optional<double> best;
  for (const auto& ch : decomp.channels) {
    const auto& d1 = ch.components.front();
    for (std::size_t i = 0; i < d1.size(); ++i) {
      if (std::abs(d1[i]) > threshold) {
        const double t = decomp.time_at(i);
        if (!best || t < *best) best = t;
        break;
      }
    }
  }
  return best;
}

int CoherencyPartition::group_of(int channel) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int member : groups[g])
      if (member == channel) return static_cast<int>(g);
  return -1;
}

CoherencyPartition coherency_groups(const DecompositionSet& decomp, double t0, double t1,
                                    double theta_in, double theta_out) {
  if (!(theta_out > 0.0) || !(theta_out <= theta_in) || !(theta_in <= 1.0))
    throw ValidationError("thresholds must satisfy 0 < theta_out <= theta_in <= 1");
  CoherencyPartition part;
  part.window_start = t0;
  part.window_end = t1;
  part.theta_in = theta_in;
  part.theta_out = theta_out;
  if (decomp.channels.empty()) {
    if (!(t1 > t0)) throw ValidationError("empty window");
    return part;
  }
  const auto [i0, i1] = window_indices(decomp, t0, t1);
  const std::size_t len = i1 - i0 + 1;
  if (len < 10) throw ValidationError("window too short (need at least 10 samples)");

  const int nch = static_cast<int>(decomp.channels.size());
  const int deepest = decomp.levels - 1;  // D_L component index
  std::vector<std::vector<double>> sliced(nch);
  std::vector<double> mean(nch, 0.0), sdev(nch, 0.0);
  part.rms.assign(nch, 0.0);
  for (int c = 0; c < nch; ++c) {
    part.labels.push_back(decomp.channels[c].label);
    const auto& band = decomp.channels[c].components[deepest];
    sliced[c].assign(band.begin() + static_cast<std::ptrdiff_t>(i0),
                     band.begin() + static_cast<std::ptrdiff_t>(i1 + 1));
    double m = 0.0, sq = 0.0;
    for (double v : sliced[c]) {
      m += v;
      sq += v * v;
    }
    m /= static_cast<double>(len);
    mean[c] = m;
    part.rms[c] = std::sqrt(sq / static_cast<double>(len));
    double var = 0.0;
    for (double v : sliced[c]) var += (v - m) * (v - m);
    sdev[c] = std::sqrt(var / static_cast<double>(len));
  }

  // Zero-lag Pearson correlation; zero-variance channels are weakly participating.
  std::vector<char> weak(nch, 0);
  part.correlation.assign(nch, std::vector<double>(nch, 0.0));
  for (int a = 0; a < nch; ++a) {
    if (sdev[a] == 0.0) {
      weak[a] = 1;
      continue;
    }
    part.correlation[a][a] = 1.0;
    for (int b = a + 1; b < nch; ++b) {
      if (sdev[b] == 0.0) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i)
        s += (sliced[a][i] - mean[a]) * (sliced[b][i] - mean[b]);
      const double r = s / (static_cast<double>(len) * sdev[a] * sdev[b]);
      part.correlation[a][b] = r;
      part.correlation[b][a] = r;
    }
  }

  // Complete-linkage agglomeration: merge while the weakest within-pair stays
  // at or above theta_in, so the within-group invariant holds by construction.
  std::vector<std::vector<int>> clusters;
  for (int c = 0; c < nch; ++c)
    if (!weak[c]) clusters.push_back({c});
  auto linkage = [&part](const std::vector<int>& p, const std::vector<int>& q) {
    double worst = 1.0;
    for (int a : p)
      for (int b : q) worst = std::min(worst, part.correlation[a][b]);
    return worst;
  };
  while (clusters.size() > 1) {
    double best = -2.0;
    std::size_t bp = 0, bq = 0;
    for (std::size_t p = 0; p < clusters.size(); ++p)
      for (std::size_t q = p + 1; q < clusters.size(); ++q) {
        const double l = linkage(clusters[p], clusters[q]);
        if (l > best) {
          best = l;
          bp = p;
          bq = q;
        }
      }
    if (best < theta_in) break;
    auto& dst = clusters[bp];
    dst.insert(dst.end(), clusters[bq].begin(), clusters[bq].end());
    std::sort(dst.begin(), dst.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bq));
  }

  // Amplitude screen: groups far below the strongest one are weakly participating.
  std::vector<double> group_rms(clusters.size(), 0.0);
  double strongest = 0.0;
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    for (int c : clusters[g]) group_rms[g] += part.rms[c];
    group_rms[g] /= static_cast<double>(clusters[g].size());
    strongest = std::max(strongest, group_rms[g]);
  }
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    if (group_rms[g] < 0.25 * strongest) {
      for (int c : clusters[g]) weak[c] = 1;
    } else {
      part.groups.push_back(clusters[g]);
    }
  }
  for (int c = 0; c < nch; ++c)
    if (weak[c]) part.weakly_participating.push_back(c);

  for (const auto& group : part.groups) {
    int ref = group.front();
    for (int c : group)
      if (part.rms[c] > part.rms[ref]) ref = c;
    part.reference_channel.push_back(ref);
  }

  for (std::size_t a = 0; a < part.groups.size(); ++a) {
    for (std::size_t b = a + 1; b < part.groups.size(); ++b) {
      double sum = 0.0;
      for (int i : part.groups[a])
        for (int j : part.groups[b]) sum += part.correlation[i][j];
      const double mean_cross =
          sum / static_cast<double>(part.groups[a].size() * part.groups[b].size());
      if (mean_cross <= -theta_out)
        part.opposing_pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return part;
}

RocofEstimate estimate_rocof(const DecompositionSet& decomp, const SystemModel* model,
                             double t0, double t1) {
  RocofEstimate est;
  est.window_start = t0;
  est.window_end = t1;
  if (decomp.channels.empty()) {
    if (!(t1 > t0)) throw ValidationError("empty window");
    return est;
  }
  const auto [i0, i1] = window_indices(decomp, t0, t1);
  if (i1 - i0 + 1 < 10)
    throw ValidationError("window too short (fit needs at least 10 samples)");

  const int approx_index = decomp.levels;  // A_L follows D1..DL
  for (const auto& ch : decomp.channels) {
    const LineFit fit = fit_line(decomp, ch.components[approx_index], i0, i1);
    est.labels.push_back(ch.label);
    est.slopes.push_back(fit.slope);
    est.residuals.push_back(fit.rms_residual);
  }

  if (model != nullptr) {
    if (model->size() != static_cast<int>(decomp.channels.size()))
      throw ValidationError("channel count does not match the model's generator count");
    double total = 0.0;
    std::vector<double> w(model->size());
    for (int i = 0; i < model->size(); ++i) {
      w[i] = model->generators[i].inertia_h * model->generators[i].rating_s;
      total += w[i];
    }
    std::vector<double> coi(decomp.length(), 0.0);
    for (int c = 0; c < model->size(); ++c) {
      const auto& a = decomp.channels[c].components[approx_index];
      const double wi = w[c] / total;
      for (std::size_t k = 0; k < a.size(); ++k) coi[k] += wi * a[k];
    }
    const LineFit fit = fit_line(decomp, coi, i0, i1);
    est.system_slope = fit.slope;
    est.system_residual = fit.rms_residual;
  }
  return est;
}

}  // namespace gridwave
