#include "lss/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lss/error.hpp"

namespace lss {

namespace {

using Complex = std::complex<double>;

Complex section_response(const Biquad& s, Complex z1) {
  // z1 = z^-1
  const Complex num = s.b0 + s.b1 * z1 + s.b2 * z1 * z1;
  const Complex den = 1.0 + s.a1 * z1 + s.a2 * z1 * z1;
  return num / den;
}

Complex cascade_response(const std::vector<Biquad>& sections, double omega) {
  const Complex z1 = std::polar(1.0, -omega);
  Complex h = 1.0;
  for (const auto& s : sections) h *= section_response(s, z1);
  return h;
}

double prewarp(double freq_hz, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * freq_hz / fs); }

}  // namespace

std::vector<double> SosFilter::apply(std::span<const double> input) const {
  std::vector<double> y(input.begin(), input.end());
  for (const auto& s : sections_) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double x = v;
      const double out = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * out + z2;
      z2 = s.b2 * x - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::complex<double> SosFilter::response(double freq_hz, double sample_rate_hz) const {
  return cascade_response(sections_, 2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
}

double SosFilter::magnitude_db(double freq_hz, double sample_rate_hz) const {
  return 20.0 * std::log10(std::abs(response(freq_hz, sample_rate_hz)));
}

double SosFilter::group_delay(double freq_hz, double sample_rate_hz) const {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const double h = 1e-6;
  // Sum of per-section phase derivatives avoids unwrapping the cascade.
  double delay = 0.0;
  for (const auto& s : sections_) {
    const double lo = std::arg(section_response(s, std::polar(1.0, -(omega - h))));
    const double hi = std::arg(section_response(s, std::polar(1.0, -(omega + h))));
    double d = hi - lo;
    if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    delay -= d / (2.0 * h);
  }
  return delay;
}

SosFilter design_butterworth(FilterBand band, int order, double sample_rate_hz, double low_hz, double high_hz) {
  require(order >= 2 && order % 2 == 0, ErrorKind::kInvalidArgument, "Butterworth order must be even and >= 2");
  require(sample_rate_hz > 0.0, ErrorKind::kInvalidArgument, "sample rate must be positive");
  const double nyquist = sample_rate_hz / 2.0;
  require(low_hz > 0.0 && low_hz < nyquist, ErrorKind::kInvalidArgument,
          "cutoff " + std::to_string(low_hz) + " Hz must lie strictly inside (0, " + std::to_string(nyquist) + ")");
  if (band == FilterBand::kBandpass) {
    require(high_hz > low_hz && high_hz < nyquist, ErrorKind::kInvalidArgument,
            "bandpass edges must satisfy 0 < low < high < Nyquist");
  }

  const double fs2 = 2.0 * sample_rate_hz;
  std::vector<Complex> analog;
  for (int k = 0; k < order; ++k) {
    analog.push_back(std::polar(1.0, std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order)));
  }

  std::vector<Complex> poles;
  const double w1 = prewarp(low_hz, sample_rate_hz);
  switch (band) {
    case FilterBand::kLowpass:
      for (const auto& p : analog) poles.push_back(w1 * p);
      break;
    case FilterBand::kHighpass:
      for (const auto& p : analog) poles.push_back(w1 / p);
      break;
    case FilterBand::kBandpass: {
      const double w2 = prewarp(high_hz, sample_rate_hz);
      const double bw = w2 - w1;
      const double w0 = std::sqrt(w1 * w2);
      for (const auto& p : analog) {
        const Complex a = p * bw / 2.0;
        const Complex root = std::sqrt(a * a - w0 * w0);
        poles.push_back(a + root);
        poles.push_back(a - root);
      }
      break;
    }
  }

  // One biquad per conjugate pair, keeping the upper half-plane member.
  std::vector<Complex> digital;
  for (const auto& p : poles) {
    const Complex z = (fs2 + p) / (fs2 - p);
    if (z.imag() > 0.0) digital.push_back(z);
  }
  require(digital.size() * 2 == poles.size(), ErrorKind::kNumerical, "unpaired real pole in Butterworth design");
  std::sort(digital.begin(), digital.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });

  std::vector<Biquad> sections;
  for (const auto& z : digital) {
    Biquad s;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    switch (band) {
      case FilterBand::kLowpass: s.b0 = 1.0, s.b1 = 2.0, s.b2 = 1.0; break;
      case FilterBand::kHighpass: s.b0 = 1.0, s.b1 = -2.0, s.b2 = 1.0; break;
      case FilterBand::kBandpass: s.b0 = 1.0, s.b1 = 0.0, s.b2 = -1.0; break;
    }
    sections.push_back(s);
  }

  // Unit gain at DC, Nyquist or the pre-warped band centre respectively.
  double omega_ref = 0.0;
  if (band == FilterBand::kHighpass) omega_ref = std::numbers::pi;
  if (band == FilterBand::kBandpass) {
    const double w0 = std::sqrt(w1 * prewarp(high_hz, sample_rate_hz));
    omega_ref = 2.0 * std::atan(w0 / fs2);
  }
  const double gain = std::abs(cascade_response(sections, omega_ref));
  const double per_section = std::pow(gain, -1.0 / static_cast<double>(sections.size()));
  for (auto& s : sections) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return SosFilter(std::move(sections));
}

}  // namespace lss
