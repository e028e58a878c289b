#pragma once

#include <span>
#include <vector>

#include "lss/codecs.hpp"

namespace lss {

struct RationalRatio {
  long up = 1;
  long down = 1;
};

// Reduced target/source ratio; throws when either term exceeds `limit`.
RationalRatio rational_ratio(long source_rate, long target_rate, long limit = 1000);

/// Kaiser-windowed sinc lowpass for an up/down polyphase resampler:
/// 80 dB stopband starting at the lower of the two Nyquist rates, and a
/// transition band of 10% of it. Odd length, linear phase, DC gain `up`.
std::vector<double> design_resampling_filter(RationalRatio ratio);

/// Polyphase rational resampling with the filter delay compensated so
/// output sample m sits at input time m*down/up. Output length is
/// round(len * up / down).
std::vector<double> resample_poly(std::span<const double> x, RationalRatio ratio);

// Identity when the rates already match.
Waveform resample(const Waveform& x, int target_rate_hz);

}  // namespace lss
