#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gridwave/signal.hpp"

namespace gridwave {

// Boundary handling for the filter bank.
//   symmetric: half-sample reflection (default; suppresses edge artifacts)
//   periodic:  circular wrap (periodized transform; exact energy bookkeeping)
//   zero:      zeros outside the record
enum class Extension { symmetric, periodic, zero };

Extension parse_extension(const std::string& name);
std::string extension_name(Extension ext);

// Orthonormal two-channel filter pair. low_pass is the 4-tap scaling filter with
// sum sqrt(2); high_pass is its quadrature mirror g[n] = (-1)^n h[L-1-n].
struct FilterPair {
  std::vector<double> low_pass;
  std::vector<double> high_pass;
  std::size_t length() const { return low_pass.size(); }
};

// The 4-coefficient Daubechies pair used throughout:
// h = [(1+sqrt3), (3+sqrt3), (3-sqrt3), (1-sqrt3)] / (4 sqrt2).
FilterPair db4_filter_bank();

struct Band {
  std::string label;  // "D1".."DL", then "AL"
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// Dyadic band edges: detail j spans [fs/2^(j+1), fs/2^j]; the final approximation
// spans [0, fs/2^(levels+1)]. The bands tile [0, fs/2] without overlap.
struct BandMap {
  double sample_rate = 0.0;
  int levels = 0;
  std::vector<Band> entries;
};

BandMap band_frequencies(double sample_rate, int levels);

// Raw multilevel coefficients. details[j] holds level j+1 detail coefficients;
// input_lengths[j] is the signal length entering that level (needed for inversion).
struct CoeffPyramid {
  Extension extension = Extension::symmetric;
  std::vector<std::vector<double>> details;
  std::vector<double> approx;
  std::vector<std::size_t> input_lengths;
  int levels() const { return static_cast<int>(details.size()); }
};

// Recursive analysis on the low-pass branch. Throws ValidationError
// ("insufficient length for requested depth") if any level's input is shorter
// than the filter.
CoeffPyramid decompose(std::span<const double> signal, int levels, Extension extension);

// Inverse transform back to the original length.
std::vector<double> reconstruct(const CoeffPyramid& pyramid);

// Full-length band components D1..DL then AL; each is the inverse transform with
// every other band zeroed, so the components sum to the original signal.
std::vector<std::vector<double>> reconstruct_bands(const CoeffPyramid& pyramid);

struct ChannelBands {
  std::string label;
  std::vector<std::vector<double>> components;  // D1..DL, AL, all full length
};

struct DecompositionSet {
  double sample_rate = 0.0;
  double start_time = 0.0;
  int levels = 0;
  Extension extension = Extension::symmetric;
  BandMap band_map;
  std::vector<ChannelBands> channels;

  std::size_t length() const {
    return channels.empty() || channels.front().components.empty()
               ? 0
               : channels.front().components.front().size();
  }
  double time_at(std::size_t i) const {
    return start_time + static_cast<double>(i) / sample_rate;
  }
  double end_time() const { return length() == 0 ? start_time : time_at(length() - 1); }
};

// Per-channel decompose + reconstruct_bands over a whole record. Errors are
// rethrown with the failing channel's label attached.
DecompositionSet decompose_set(const SignalSet& signals, int levels, Extension extension);

}  // namespace gridwave
