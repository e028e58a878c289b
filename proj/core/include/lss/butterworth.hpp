#pragma once

#include <complex>
#include <span>
#include <vector>

namespace lss {

// One second-order section with a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Cascade of biquads run in transposed direct form II.
class SosFilter {
 public:
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const noexcept { return sections_; }

  // Single causal pass from zero initial state.
  std::vector<double> apply(std::span<const double> input) const;

  std::complex<double> response(double freq_hz, double sample_rate_hz) const;
  double magnitude_db(double freq_hz, double sample_rate_hz) const;
  // Group delay in samples, by central difference of the unwrapped phase.
  double group_delay(double freq_hz, double sample_rate_hz) const;

 private:
  std::vector<Biquad> sections_;
};

enum class FilterBand { kLowpass, kHighpass, kBandpass };

/// Digital Butterworth design by the bilinear transform with pre-warped
/// band edges. `order` is the analog lowpass prototype order; a bandpass
/// design therefore has 2*order poles. `high_hz` is only used for
/// bandpass. Edges must lie strictly inside (0, Nyquist).
SosFilter design_butterworth(FilterBand band, int order, double sample_rate_hz, double low_hz,
                             double high_hz = 0.0);

}  // namespace lss
