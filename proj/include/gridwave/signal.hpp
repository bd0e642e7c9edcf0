#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gridwave {

// Uniformly sampled multi-channel record of frequency deviation in Hz.
// All channels share the same sample rate, start time and length.
struct SignalSet {
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // seconds of sample 0
  std::vector<std::string> labels;
  std::vector<std::vector<double>> channels;

  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
  std::size_t channel_count() const { return channels.size(); }
  double time_at(std::size_t i) const {
    return start_time + static_cast<double>(i) / sample_rate;
  }
  double end_time() const { return length() == 0 ? start_time : time_at(length() - 1); }

  // Throws ValidationError if labels/channels are inconsistent, lengths differ,
  // labels repeat, or the sample rate is not positive.
  void validate() const;
};

// Kaiser-windowed sinc low-pass with unit DC gain and an odd tap count (linear phase).
// The sinc cutoff sits at cutoff_hz; the stop band begins near cutoff_hz + transition_hz/2.
std::vector<double> design_lowpass_fir(double sample_rate, double cutoff_hz,
                                       double transition_hz, double stopband_db);

// Zero-phase FIR evaluation at sample index `center`, holding the first/last sample
// beyond the record ends.
double fir_eval(const std::vector<double>& x, const std::vector<double>& taps,
                std::ptrdiff_t center);

// Anti-alias low-pass at 0.45 * target_fs, then integer decimation.
// target_fs must divide the source rate evenly.
SignalSet resample(const SignalSet& in, double target_fs);

}  // namespace gridwave
