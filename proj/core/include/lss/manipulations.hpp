#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "lss/butterworth.hpp"
#include "lss/codecs.hpp"

namespace lss {

enum class ManipulationKind {
  kClean,
  kLowpass,
  kHighpass,
  kBandpass,
  kWhiteNoise,
  kPinkNoise,
  kResample,
  kExternalCommand,
};

inline constexpr int kAttackFilterOrder = 6;

/// One signal manipulation. Text form is `kind[:key=value[,key=value...]]`:
///   clean
///   lowpass:fc=1000        highpass:fc=1500      bandpass:lo=500,hi=5000
///   white:snr=20,seed=7    pink:snr=5,seed=1
///   resample:rate=16000
///   ext:cmd="lame -b 32 {in} {out}"
/// Values containing ',' or spaces are double-quoted; `\"` and `\\` escape
/// inside quotes.
struct ManipulationSpec {
  ManipulationKind kind = ManipulationKind::kClean;
  double cutoff_hz = 0.0;  // lowpass / highpass
  double low_hz = 0.0;     // bandpass
  double high_hz = 0.0;    // bandpass
  double snr_db = 0.0;     // noise
  std::uint64_t seed = 0;  // noise
  int target_rate_hz = 0;  // resample
  std::string command;     // external

  // Checks the fields that do not depend on the signal.
  void validate() const;

  friend bool operator==(const ManipulationSpec&, const ManipulationSpec&) = default;
};

ManipulationSpec parse_manipulation(std::string_view text);
std::string to_string(const ManipulationSpec& spec);

// Sixth-order Butterworth, one causal pass. `high_hz` only for bandpass.
Waveform butterworth(const Waveform& x, FilterBand band, double cutoff_hz, double high_hz = 0.0);

enum class NoiseColor { kWhite, kPink };

/// Gaussian noise, white or shaped to a 1/f power spectrum, scaled so that
/// 10 log10(P_signal / P_noise) equals snr_db over the whole utterance.
std::vector<double> make_noise(std::size_t count, NoiseColor color, std::uint64_t seed);
Waveform add_noise(const Waveform& x, NoiseColor color, double snr_db, std::uint64_t seed);

/// Runs `command_template` with {in} and {out} replaced by temporary WAV
/// paths. Output at a different rate is resampled back to the input rate.
Waveform external_command(const Waveform& x, std::string_view command_template);

// Dispatches on spec.kind. Resample returns the signal at the target rate.
Waveform apply_manipulation(const Waveform& x, const ManipulationSpec& spec);

double mean_power(std::span<const double> samples);

}  // namespace lss
