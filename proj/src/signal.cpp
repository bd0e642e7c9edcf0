#include "gridwave/signal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gridwave/errors.hpp"

namespace gridwave {

void SignalSet::validate() const {
  if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
  if (labels.size() != channels.size())
    throw ValidationError("label count does not match channel count");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw ValidationError("duplicate channel label '" + l + "'");
  }
  const std::size_t n = length();
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].size() != n)
      throw ValidationError("channel '" + labels[c] + "' length differs from the others");
  }
}

namespace {

double bessel_i0(double x) {
  // Power series; converges quickly for the Kaiser beta range used here.
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 64; ++k) {
    const double t = x / (2.0 * k);
    term *= t * t;
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

}  // namespace

std::vector<double> design_lowpass_fir(double sample_rate, double cutoff_hz,
                                       double transition_hz, double stopband_db) {
  if (!(sample_rate > 0.0) || !(cutoff_hz > 0.0) || !(transition_hz > 0.0))
    throw ValidationError("filter design requires positive rate, cutoff and transition width");
  if (cutoff_hz + transition_hz / 2.0 > sample_rate / 2.0)
    throw ValidationError("filter stop band extends past the Nyquist rate");

  double beta = 0.0;
  if (stopband_db > 50.0) {
    beta = 0.1102 * (stopband_db - 8.7);
  } else if (stopband_db >= 21.0) {
    beta = 0.5842 * std::pow(stopband_db - 21.0, 0.4) + 0.07886 * (stopband_db - 21.0);
  }

  const double delta_omega = 2.0 * M_PI * transition_hz / sample_rate;
  int taps = static_cast<int>(std::ceil((stopband_db - 7.95) / (2.285 * delta_omega)));
  if (taps < 3) taps = 3;
  if (taps % 2 == 0) ++taps;

  const int mid = (taps - 1) / 2;
  const double fc = cutoff_hz / sample_rate;  // normalized sinc cutoff
  const double i0_beta = bessel_i0(beta);
  std::vector<double> h(taps);
  double sum = 0.0;
  for (int k = 0; k < taps; ++k) {
    const int n = k - mid;
    const double x = 2.0 * fc * n;
    const double sinc = (n == 0) ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
    const double r = static_cast<double>(n) / mid;
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[k] = 2.0 * fc * sinc * w;
    sum += h[k];
  }
  for (double& v : h) v /= sum;  // exact unit DC gain
  return h;
}

double fir_eval(const std::vector<double>& x, const std::vector<double>& taps,
                std::ptrdiff_t center) {
  const std::ptrdiff_t mid = static_cast<std::ptrdiff_t>(taps.size() - 1) / 2;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < taps.size(); ++t) {
    std::ptrdiff_t idx = center - mid + static_cast<std::ptrdiff_t>(t);
    if (idx < 0) idx = 0;
    if (idx >= n) idx = n - 1;
    acc += taps[t] * x[idx];
  }
  return acc;
}

SignalSet resample(const SignalSet& in, double target_fs) {
  in.validate();
  if (!(target_fs > 0.0)) throw ValidationError("target sample rate must be positive");
  const double ratio = in.sample_rate / target_fs;
  const auto r = static_cast<std::ptrdiff_t>(std::llround(ratio));
  if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9)
    throw ValidationError("non-integer decimation ratio");

  SignalSet out;
  out.sample_rate = target_fs;
  out.start_time = in.start_time;
  out.labels = in.labels;
  out.channels.resize(in.channel_count());
  if (r == 1) {
    out.channels = in.channels;
    return out;
  }

  const auto taps =
      design_lowpass_fir(in.sample_rate, 0.45 * target_fs, 0.1 * target_fs, 100.0);
  const std::size_t n_out = in.length() == 0 ? 0 : (in.length() - 1) / r + 1;
  for (std::size_t c = 0; c < in.channel_count(); ++c) {
    auto& ch = out.channels[c];
    ch.resize(n_out);
    for (std::size_t m = 0; m < n_out; ++m)
      ch[m] = fir_eval(in.channels[c], taps, static_cast<std::ptrdiff_t>(m) * r);
  }
  return out;
}

}  // namespace gridwave
