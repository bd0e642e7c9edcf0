#include "gridwave/wavelet.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "gridwave/errors.hpp"

namespace gridwave {

namespace {

constexpr int kTaps = 4;
constexpr int kExt = kTaps - 1;

std::array<double, kTaps> scaling_filter() {
  const double s3 = std::sqrt(3.0);
  const double norm = 4.0 * std::sqrt(2.0);
  return {(1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm, (1.0 - s3) / norm};
}

std::array<double, kTaps> wavelet_filter() {
  const auto h = scaling_filter();
  std::array<double, kTaps> g{};
  for (int n = 0; n < kTaps; ++n) g[n] = (n % 2 == 0 ? 1.0 : -1.0) * h[kTaps - 1 - n];
  return g;
}

// Sample the extended signal at index i (may lie a little outside [0, n)).
double fetch(std::span<const double> x, std::ptrdiff_t i, Extension ext) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  switch (ext) {
    case Extension::zero:
      if (i < 0 || i >= n) return 0.0;
      return x[i];
    case Extension::symmetric:
      while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
      }
      return x[i];
    case Extension::periodic: {
      i %= n;
      if (i < 0) i += n;
      return x[i];
    }
  }
  return 0.0;
}

// Analysis coefficient positions for the extended scheme: every shift 2k whose
// filter support lies inside the (L-1)-extended record. This covers every filter
// that touches an original sample, which is what makes the inverse exact.
constexpr std::ptrdiff_t kShiftMin = -(kExt / 2);  // = -1 for a 4-tap filter

std::size_t coeff_count(std::size_t n, Extension ext) {
  if (ext == Extension::periodic) return (n + 1) / 2;
  const auto top = static_cast<std::ptrdiff_t>(n + kExt - kTaps) / 2;
  return static_cast<std::size_t>(top - kShiftMin + 1);
}

void analyze_level(std::span<const double> x, Extension ext, std::vector<double>& approx,
                   std::vector<double>& detail) {
  const auto h = scaling_filter();
  const auto g = wavelet_filter();
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::size_t m = coeff_count(x.size(), ext);
  approx.assign(m, 0.0);
  detail.assign(m, 0.0);
  if (ext == Extension::periodic) {
    // Periodized transform; an odd record gets its last sample repeated.
    const std::ptrdiff_t ne = n + (n % 2);
    for (std::size_t k = 0; k < m; ++k) {
      double a = 0.0, d = 0.0;
      for (int t = 0; t < kTaps; ++t) {
        std::ptrdiff_t idx = (2 * static_cast<std::ptrdiff_t>(k) + t) % ne;
        const double v = x[idx < n ? idx : n - 1];
        a += h[t] * v;
        d += g[t] * v;
      }
      approx[k] = a;
      detail[k] = d;
    }
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::ptrdiff_t k = kShiftMin + static_cast<std::ptrdiff_t>(i);
    double a = 0.0, d = 0.0;
    for (int t = 0; t < kTaps; ++t) {
      const double v = fetch(x, 2 * k + t, ext);
      a += h[t] * v;
      d += g[t] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

std::vector<double> synthesize_level(const std::vector<double>& approx,
                                     const std::vector<double>& detail, std::size_t n_prev,
                                     Extension ext) {
  const auto h = scaling_filter();
  const auto g = wavelet_filter();
  if (ext == Extension::periodic) {
    const std::size_t ne = n_prev + (n_prev % 2);
    std::vector<double> out(ne, 0.0);
    for (std::size_t k = 0; k < approx.size(); ++k) {
      for (int t = 0; t < kTaps; ++t) {
        const std::size_t idx = (2 * k + t) % ne;
        out[idx] += approx[k] * h[t] + detail[k] * g[t];
      }
    }
    out.resize(n_prev);
    return out;
  }
  std::vector<double> out(n_prev, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(n_prev);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const std::ptrdiff_t k = kShiftMin + static_cast<std::ptrdiff_t>(i);
    for (int t = 0; t < kTaps; ++t) {
      const std::ptrdiff_t idx = 2 * k + t;
      if (idx >= 0 && idx < n) out[idx] += approx[i] * h[t] + detail[i] * g[t];
    }
  }
  return out;
}

}  // namespace

Extension parse_extension(const std::string& name) {
  if (name == "symmetric") return Extension::symmetric;
  if (name == "periodic") return Extension::periodic;
  if (name == "zero") return Extension::zero;
  throw ValidationError("unknown extension policy '" + name +
                        "' (expected symmetric, periodic or zero)");
}

std::string extension_name(Extension ext) {
  switch (ext) {
    case Extension::symmetric: return "symmetric";
    case Extension::periodic: return "periodic";
    case Extension::zero: return "zero";
  }
  return "?";
}

FilterPair db4_filter_bank() {
  const auto h = scaling_filter();
  const auto g = wavelet_filter();
  return {{h.begin(), h.end()}, {g.begin(), g.end()}};
}

BandMap band_frequencies(double sample_rate, int levels) {
  if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
  if (levels < 1) throw ValidationError("levels must be at least 1");
  BandMap map;
  map.sample_rate = sample_rate;
  map.levels = levels;
  char buf[24];
  for (int j = 1; j <= levels; ++j) {
    std::snprintf(buf, sizeof buf, "D%d", j);
    map.entries.push_back(
        {buf, sample_rate / std::exp2(j + 1), sample_rate / std::exp2(j)});
  }
  std::snprintf(buf, sizeof buf, "A%d", levels);
  map.entries.push_back({buf, 0.0, sample_rate / std::exp2(levels + 1)});
  return map;
}

CoeffPyramid decompose(std::span<const double> signal, int levels, Extension extension) {
  if (levels < 1) throw ValidationError("levels must be at least 1");
  CoeffPyramid p;
  p.extension = extension;
  std::vector<double> current(signal.begin(), signal.end());
  for (int j = 0; j < levels; ++j) {
    if (current.size() < kTaps)
      throw ValidationError("insufficient length for requested depth");
    p.input_lengths.push_back(current.size());
    std::vector<double> approx, detail;
    analyze_level(current, extension, approx, detail);
    p.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  p.approx = std::move(current);
  return p;
}

std::vector<double> reconstruct(const CoeffPyramid& pyramid) {
  std::vector<double> current = pyramid.approx;
  for (int j = pyramid.levels() - 1; j >= 0; --j)
    current = synthesize_level(current, pyramid.details[j], pyramid.input_lengths[j],
                               pyramid.extension);
  return current;
}

std::vector<std::vector<double>> reconstruct_bands(const CoeffPyramid& pyramid) {
  const int levels = pyramid.levels();
  std::vector<std::vector<double>> components;
  components.reserve(levels + 1);
  for (int band = 0; band <= levels; ++band) {
    CoeffPyramid solo;
    solo.extension = pyramid.extension;
    solo.input_lengths = pyramid.input_lengths;
    for (int j = 0; j < levels; ++j) {
      solo.details.emplace_back(band == j ? pyramid.details[j]
                                          : std::vector<double>(pyramid.details[j].size(), 0.0));
    }
    solo.approx = band == levels ? pyramid.approx
                                 : std::vector<double>(pyramid.approx.size(), 0.0);
    components.push_back(reconstruct(solo));
  }
  return components;
}

DecompositionSet decompose_set(const SignalSet& signals, int levels, Extension extension) {
  signals.validate();
  if (levels < 1) throw ValidationError("levels must be at least 1");
  DecompositionSet set;
  set.sample_rate = signals.sample_rate;
  set.start_time = signals.start_time;
  set.levels = levels;
  set.extension = extension;
  set.band_map = band_frequencies(signals.sample_rate, levels);
  set.channels.reserve(signals.channel_count());
  for (std::size_t c = 0; c < signals.channel_count(); ++c) {
    try {
      CoeffPyramid pyramid = decompose(signals.channels[c], levels, extension);
      set.channels.push_back({signals.labels[c], reconstruct_bands(pyramid)});
    } catch (const ValidationError& e) {
      throw ValidationError("channel '" + signals.labels[c] + "': " + e.what());
    }
  }
  return set;
}

}  // namespace gridwave
