#include "lss/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lss/error.hpp"

namespace lss {

namespace {

constexpr std::string_view kDomainTag = "lss-schedule-v1";
constexpr std::string_view kNonceTag = "lss-nonce-v1";

void append(Bytes& out, std::string_view text) { out.insert(out.end(), text.begin(), text.end()); }

void append_be32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

Bytes stream_prefix(const Nonce& nonce, std::string_view label, int chunk, int slot) {
  Bytes prefix;
  append(prefix, kDomainTag);
  prefix.push_back(0);
  prefix.insert(prefix.end(), nonce.bytes().begin(), nonce.bytes().end());
  append(prefix, label);
  prefix.push_back(0);
  append_be32(prefix, static_cast<std::uint32_t>(chunk));
  append_be32(prefix, static_cast<std::uint32_t>(slot));
  return prefix;
}

}  // namespace

SecretKey::SecretKey(std::span<const std::uint8_t> bytes) {
  require(bytes.size() == kSize, ErrorKind::kInvalidArgument,
          "secret key must be exactly 32 bytes, got " + std::to_string(bytes.size()));
  std::copy(bytes.begin(), bytes.end(), bytes_.begin());
}

SecretKey SecretKey::from_hex(std::string_view hex) { return SecretKey(lss::from_hex(hex)); }

Nonce::Nonce(std::span<const std::uint8_t> bytes) {
  require(bytes.size() == kSize, ErrorKind::kInvalidArgument,
          "nonce must be exactly 16 bytes, got " + std::to_string(bytes.size()));
  std::copy(bytes.begin(), bytes.end(), bytes_.begin());
}

Nonce Nonce::from_hex(std::string_view hex) { return Nonce(lss::from_hex(hex)); }

Nonce derive_nonce(const SecretKey& key, std::span<const std::uint8_t> content) {
  const Digest content_hash = sha256(content);
  Bytes message;
  append(message, kNonceTag);
  message.insert(message.end(), content_hash.begin(), content_hash.end());
  const Digest mac = hmac_sha256(key.bytes(), message);
  return Nonce(std::span<const std::uint8_t>(mac.data(), Nonce::kSize));
}

Payload::Payload(std::vector<bool> bits) : bits_(std::move(bits)) {
  require(!bits_.empty(), ErrorKind::kInvalidArgument, "payload must carry at least one bit");
}

Payload Payload::from_hex(std::string_view hex, std::size_t bit_length) {
  const Bytes bytes = lss::from_hex(hex);
  const std::size_t available = bytes.size() * 8;
  if (bit_length == 0) bit_length = available;
  require(bit_length <= available, ErrorKind::kInvalidArgument,
          "payload bit length " + std::to_string(bit_length) + " exceeds the " +
              std::to_string(available) + " bits supplied");
  std::vector<bool> bits(bit_length);
  for (std::size_t i = 0; i < bit_length; ++i) bits[i] = ((bytes[i / 8] >> (7 - i % 8)) & 1) != 0;
  return Payload(std::move(bits));
}

std::vector<int> Payload::signed_bits() const {
  std::vector<int> out(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] ? 1 : -1;
  return out;
}

Payload Payload::inverted() const {
  std::vector<bool> flipped(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) flipped[i] = !bits_[i];
  return Payload(std::move(flipped));
}

void ScheduleParams::validate(long dim) const {
  require(chunk_frames > 0, ErrorKind::kInvalidArgument, "chunk_frames must be positive");
  require(subchunk_frames > 0, ErrorKind::kInvalidArgument, "subchunk_frames must be positive");
  require(chunk_frames % subchunk_frames == 0, ErrorKind::kInvalidArgument,
          "subchunk_frames (" + std::to_string(subchunk_frames) + ") must divide chunk_frames (" +
              std::to_string(chunk_frames) + ")");
  require(planes_per_chunk > 0, ErrorKind::kInvalidArgument, "planes_per_chunk must be positive");
  require(theta >= 0.0 && std::isfinite(theta), ErrorKind::kInvalidArgument, "theta must be finite and non-negative");
  require(2 * planes_per_chunk <= candidate_components, ErrorKind::kInvalidArgument,
          "need 2*planes_per_chunk <= candidate_components (" + std::to_string(2 * planes_per_chunk) +
              " > " + std::to_string(candidate_components) + ")");
  if (dim > 0) {
    require(candidate_components <= dim, ErrorKind::kInvalidArgument,
            "candidate_components (" + std::to_string(candidate_components) +
                ") exceeds latent dimension " + std::to_string(dim));
  }
}

WatermarkSchedule::WatermarkSchedule(ScheduleParams params, long num_frames, std::vector<Plane> planes,
                                     std::vector<std::int8_t> bits, std::vector<std::int8_t> chips)
    : params_(params),
      num_frames_(num_frames),
      chunks_(0),
      planes_(std::move(planes)),
      bits_(std::move(bits)),
      chips_(std::move(chips)) {
  params_.validate();
  require(num_frames_ >= params_.chunk_frames, ErrorKind::kInvalidArgument,
          "sequence of " + std::to_string(num_frames_) + " frames is shorter than one chunk (" +
              std::to_string(params_.chunk_frames) + ")");
  chunks_ = static_cast<int>(num_frames_ / params_.chunk_frames);
  const auto slots = static_cast<std::size_t>(chunks_) * static_cast<std::size_t>(params_.planes_per_chunk);
  require(planes_.size() == slots && bits_.size() == slots &&
              chips_.size() == slots * static_cast<std::size_t>(params_.subchunks_per_chunk()),
          ErrorKind::kDimension, "schedule tables do not match the chunk layout");

  std::vector<char> used(static_cast<std::size_t>(params_.candidate_components));
  for (int c = 0; c < chunks_; ++c) {
    std::fill(used.begin(), used.end(), 0);
    for (const Plane& pl : chunk_planes(c)) {
      require(pl.i >= 0 && pl.i < pl.j && pl.j < params_.candidate_components, ErrorKind::kInvalidArgument,
              "plane indices must satisfy 0 <= i < j < candidate_components");
      require(!used[static_cast<std::size_t>(pl.i)] && !used[static_cast<std::size_t>(pl.j)],
              ErrorKind::kInvalidArgument, "planes within a chunk must be disjoint");
      used[static_cast<std::size_t>(pl.i)] = used[static_cast<std::size_t>(pl.j)] = 1;
    }
  }
  for (auto v : bits_) require(v == 1 || v == -1, ErrorKind::kInvalidArgument, "bits must be +-1");
  for (auto v : chips_) require(v == 1 || v == -1, ErrorKind::kInvalidArgument, "chips must be +-1");
}

std::span<const Plane> WatermarkSchedule::chunk_planes(int c) const {
  require(c >= 0 && c < chunks_, ErrorKind::kInvalidArgument, "chunk index out of range");
  return std::span<const Plane>(planes_).subspan(slot(c, 0), static_cast<std::size_t>(params_.planes_per_chunk));
}

WatermarkSchedule WatermarkSchedule::with_inverted_bits() const {
  std::vector<std::int8_t> flipped(bits_.size());
  std::transform(bits_.begin(), bits_.end(), flipped.begin(), [](std::int8_t b) { return static_cast<std::int8_t>(-b); });
  return WatermarkSchedule(params_, num_frames_, planes_, std::move(flipped), chips_);
}

WatermarkSchedule derive_schedule(const SecretKey& key, const Nonce& nonce, const Payload& payload,
                                  const ScheduleParams& params, long num_frames) {
  params.validate();
  require(num_frames >= params.chunk_frames, ErrorKind::kInvalidArgument,
          "sequence of " + std::to_string(num_frames) + " frames is shorter than one chunk (" +
              std::to_string(params.chunk_frames) + ")");

  const int chunks = static_cast<int>(num_frames / params.chunk_frames);
  const int planes_per_chunk = params.planes_per_chunk;
  const int subchunks = params.subchunks_per_chunk();
  const auto slots = static_cast<std::size_t>(chunks) * static_cast<std::size_t>(planes_per_chunk);

  std::vector<Plane> planes;
  std::vector<std::int8_t> bits;
  std::vector<std::int8_t> chips;
  planes.reserve(slots);
  bits.reserve(slots);
  chips.reserve(slots * static_cast<std::size_t>(subchunks));

  std::vector<int> pool(static_cast<std::size_t>(params.candidate_components));
  for (int c = 0; c < chunks; ++c) {
    // Partial Fisher-Yates: the first 2P entries become the chunk's planes.
    std::iota(pool.begin(), pool.end(), 0);
    KeyedStream plane_stream(key.bytes(), stream_prefix(nonce, "planes", c, 0));
    const auto pool_size = static_cast<std::uint32_t>(pool.size());
    for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(2 * planes_per_chunk); ++k) {
      const std::uint32_t pick = k + plane_stream.uniform(pool_size - k);
      std::swap(pool[k], pool[pick]);
    }
    for (int p = 0; p < planes_per_chunk; ++p) {
      const int a = pool[static_cast<std::size_t>(2 * p)];
      const int b = pool[static_cast<std::size_t>(2 * p + 1)];
      planes.push_back(Plane{std::min(a, b), std::max(a, b)});

      const std::size_t cyclic = (static_cast<std::size_t>(c) * static_cast<std::size_t>(planes_per_chunk) +
                                  static_cast<std::size_t>(p)) % payload.size();
      bits.push_back(static_cast<std::int8_t>(payload.signed_bit(cyclic)));

      KeyedStream chip_stream(key.bytes(), stream_prefix(nonce, "chips", c, p));
      for (int l = 0; l < subchunks; ++l) chips.push_back(chip_stream.next_bit() ? 1 : -1);
    }
  }
  return WatermarkSchedule(params, num_frames, std::move(planes), std::move(bits), std::move(chips));
}

double chip_balance(const WatermarkSchedule& schedule) {
  const auto chips = schedule.chips();
  if (chips.empty()) return 0.0;
  long long sum = 0;
  for (auto v : chips) sum += v;
  return static_cast<double>(sum) / static_cast<double>(chips.size());
}

}  // namespace lss
