#include "lss/codecs.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "lss/error.hpp"

namespace lss {

void validate(const Waveform& x) {
  require(x.sample_rate_hz > 0, ErrorKind::kInvalidArgument, "sample rate must be positive");
  for (double s : x.samples) {
    require(std::isfinite(s), ErrorKind::kInvalidArgument, "waveform contains non-finite samples");
  }
}

std::string_view to_string(CodecKind kind) {
  switch (kind) {
    case CodecKind::kFrameStack: return "frame_stack";
    case CodecKind::kDctBank: return "dct_bank";
    case CodecKind::kExternalLatents: return "external_latents";
  }
  return "unknown";
}

CodecKind parse_codec_kind(std::string_view name) {
  if (name == "frame_stack") return CodecKind::kFrameStack;
  if (name == "dct_bank") return CodecKind::kDctBank;
  if (name == "external_latents") return CodecKind::kExternalLatents;
  fail(ErrorKind::kInvalidArgument, "unknown codec kind '" + std::string(name) + "'");
}

void CodecSpec::validate() const {
  require(frame_len >= 2, ErrorKind::kInvalidArgument, "codec frame_len must be at least 2");
  if (kind != CodecKind::kExternalLatents) {
    require(hop == frame_len, ErrorKind::kInvalidArgument,
            "internal codecs are critically sampled: hop must equal frame_len");
  }
}

Matrix dct_matrix(int n) {
  // Cached: the embed/detect paths ask for the same size repeatedly.
  static std::mutex mutex;
  static std::map<int, Matrix> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  Matrix d(n, n);
  const double scale0 = std::sqrt(1.0 / n);
  const double scale = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    for (int t = 0; t < n; ++t) {
      d(k, t) = (k == 0 ? scale0 : scale) * std::cos(std::numbers::pi * (t + 0.5) * k / n);
    }
  }
  cache.emplace(n, d);
  return d;
}

LatentSequence encode(const Waveform& x, const CodecSpec& spec) {
  spec.validate();
  require(spec.kind != CodecKind::kExternalLatents, ErrorKind::kInvalidArgument,
          "external_latents codec cannot encode waveforms; supply LSSL files instead");
  validate(x);
  const auto len = static_cast<std::size_t>(spec.frame_len);
  require(x.samples.size() >= len, ErrorKind::kInvalidArgument,
          "waveform of " + std::to_string(x.samples.size()) + " samples is shorter than one frame (" +
              std::to_string(len) + ")");

  const std::size_t frames = x.samples.size() / len;
  const std::size_t trailing = x.samples.size() - frames * len;
  Matrix blocks = Eigen::Map<const Matrix>(x.samples.data(), spec.frame_len, static_cast<Eigen::Index>(frames));
  if (spec.kind == CodecKind::kDctBank) blocks = dct_matrix(spec.frame_len) * blocks;
  const double frame_rate = static_cast<double>(x.sample_rate_hz) / spec.frame_len;
  return LatentSequence(std::move(blocks), frame_rate, trailing);
}

Waveform decode(const LatentSequence& f, const CodecSpec& spec) {
  spec.validate();
  require(spec.kind != CodecKind::kExternalLatents, ErrorKind::kInvalidArgument,
          "external_latents codec cannot decode; use the external bridge");
  require(f.dim() == spec.frame_len, ErrorKind::kDimension,
          "latent dimension " + std::to_string(f.dim()) + " does not match codec frame_len " +
              std::to_string(spec.frame_len));
  Matrix blocks = spec.kind == CodecKind::kDctBank ? Matrix(dct_matrix(spec.frame_len).transpose() * f.data())
                                                   : f.data();
  Waveform out;
  out.sample_rate_hz = static_cast<int>(std::lround(f.frame_rate_hz() * spec.frame_len));
  out.samples.assign(blocks.data(), blocks.data() + blocks.size());
  return out;
}

Waveform standardize_duration(const Waveform& x, double target_seconds) {
  require(!x.samples.empty(), ErrorKind::kInvalidArgument, "cannot standardize an empty waveform");
  require(target_seconds > 0.0, ErrorKind::kInvalidArgument, "target duration must be positive");
  require(x.sample_rate_hz > 0, ErrorKind::kInvalidArgument, "sample rate must be positive");
  const auto target = static_cast<std::size_t>(std::llround(target_seconds * x.sample_rate_hz));
  Waveform out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.samples.resize(target);
  for (std::size_t t = 0; t < target; ++t) out.samples[t] = x.samples[t % x.samples.size()];
  return out;
}

}  // namespace lss
