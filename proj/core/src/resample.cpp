#include "lss/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "lss/error.hpp"

namespace lss {

namespace {

constexpr double kStopbandDb = 80.0;
constexpr double kTransitionFraction = 0.1;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

RationalRatio rational_ratio(long source_rate, long target_rate, long limit) {
  require(source_rate > 0 && target_rate > 0, ErrorKind::kInvalidArgument, "sample rates must be positive");
  const long g = std::gcd(source_rate, target_rate);
  RationalRatio r{target_rate / g, source_rate / g};
  require(r.up <= limit && r.down <= limit, ErrorKind::kInvalidArgument,
          "resampling ratio " + std::to_string(r.up) + "/" + std::to_string(r.down) + " exceeds limit " +
              std::to_string(limit));
  return r;
}

std::vector<double> design_resampling_filter(RationalRatio ratio) {
  const double max_factor = static_cast<double>(std::max(ratio.up, ratio.down));
  // Frequencies normalized so that 1 is the Nyquist rate of the upsampled signal.
  const double stop_edge = 1.0 / max_factor;
  const double transition = kTransitionFraction * stop_edge;
  const double cutoff = stop_edge - transition / 2.0;

  const double beta = 0.1102 * (kStopbandDb - 8.7);
  const double taps = (kStopbandDb - 7.95) / (2.285 * std::numbers::pi * transition) + 1.0;
  const auto half = static_cast<long>(std::ceil((taps - 1.0) / 2.0));
  const long length = 2 * half + 1;

  std::vector<double> h(static_cast<std::size_t>(length));
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  for (long k = 0; k < length; ++k) {
    const double n = static_cast<double>(k - half);
    const double r = n / static_cast<double>(half);
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[static_cast<std::size_t>(k)] = static_cast<double>(ratio.up) * cutoff * sinc(cutoff * n) * window;
  }
  return h;
}

std::vector<double> resample_poly(std::span<const double> x, RationalRatio ratio) {
  require(ratio.up > 0 && ratio.down > 0, ErrorKind::kInvalidArgument, "resampling factors must be positive");
  if (ratio.up == 1 && ratio.down == 1) return std::vector<double>(x.begin(), x.end());

  const std::vector<double> h = design_resampling_filter(ratio);
  const long length = static_cast<long>(h.size());
  const long half = (length - 1) / 2;
  const long in_len = static_cast<long>(x.size());
  const auto out_len = static_cast<long>(std::llround(static_cast<double>(in_len) * ratio.up / ratio.down));

  std::vector<double> y(static_cast<std::size_t>(out_len));
  for (long m = 0; m < out_len; ++m) {
    // Upsampled-domain position of this output, shifted by the filter centre.
    const long pos = m * ratio.down + half;
    // Input k contributes through tap pos - k*up, which must lie in [0, length).
    long k_hi = pos / ratio.up;
    long k_lo = (pos - (length - 1) + ratio.up - 1) / ratio.up;
    if (pos - (length - 1) < 0) k_lo = 0;
    k_lo = std::max(k_lo, 0L);
    k_hi = std::min(k_hi, in_len - 1);
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      acc += x[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(pos - k * ratio.up)];
    }
    y[static_cast<std::size_t>(m)] = acc;
  }
  return y;
}

Waveform resample(const Waveform& x, int target_rate_hz) {
  require(x.sample_rate_hz > 0 && target_rate_hz > 0, ErrorKind::kInvalidArgument, "sample rates must be positive");
  if (target_rate_hz == x.sample_rate_hz) return x;
  const RationalRatio ratio = rational_ratio(x.sample_rate_hz, target_rate_hz);
  Waveform out;
  out.sample_rate_hz = target_rate_hz;
  out.samples = resample_poly(x.samples, ratio);
  return out;
}

}  // namespace lss
