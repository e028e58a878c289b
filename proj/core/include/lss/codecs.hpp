#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lss/latent.hpp"

namespace lss {

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 0;

  double duration_seconds() const {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Throws unless the rate is positive and every sample finite.
void validate(const Waveform& x);

enum class CodecKind { kFrameStack, kDctBank, kExternalLatents };

std::string_view to_string(CodecKind kind);
CodecKind parse_codec_kind(std::string_view name);

/// Critically sampled block transforms standing in for a neural codec.
/// frame_stack keeps each block of frame_len samples as one latent column;
/// dct_bank applies an orthonormal DCT-II to each block. external_latents
/// marks latents that arrive as LSSL files and cannot be encoded here.
struct CodecSpec {
  CodecKind kind = CodecKind::kDctBank;
  int frame_len = 320;
  int hop = 320;

  long latent_dim() const { return frame_len; }
  void validate() const;
};

LatentSequence encode(const Waveform& x, const CodecSpec& spec);
Waveform decode(const LatentSequence& f, const CodecSpec& spec);

/// Orthonormal DCT-II matrix: row k, column t = a_k cos(pi (t + 1/2) k / n).
Matrix dct_matrix(int n);

/// Repeats short inputs cyclically and truncates long ones to exactly
/// round(target_seconds * rate) samples.
Waveform standardize_duration(const Waveform& x, double target_seconds);

}  // namespace lss
