#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lss/prf.hpp"

namespace lss {

class SecretKey {
 public:
  static constexpr std::size_t kSize = 32;

  explicit SecretKey(std::span<const std::uint8_t> bytes);
  static SecretKey from_hex(std::string_view hex);

  std::span<const std::uint8_t, kSize> bytes() const noexcept { return bytes_; }
  friend bool operator==(const SecretKey&, const SecretKey&) = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

class Nonce {
 public:
  static constexpr std::size_t kSize = 16;

  explicit Nonce(std::span<const std::uint8_t> bytes);
  static Nonce from_hex(std::string_view hex);

  std::span<const std::uint8_t, kSize> bytes() const noexcept { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }
  friend bool operator==(const Nonce&, const Nonce&) = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

/// Nonce bound to content: first 16 bytes of
/// HMAC-SHA256(K, "lss-nonce-v1" || SHA-256(content)).
Nonce derive_nonce(const SecretKey& key, std::span<const std::uint8_t> content);

class Payload {
 public:
  explicit Payload(std::vector<bool> bits);
  // Most significant bit of the first byte first; `bit_length` may cut the
  // last byte short. bit_length == 0 means 4 * hex.size().
  static Payload from_hex(std::string_view hex, std::size_t bit_length = 0);

  std::size_t size() const noexcept { return bits_.size(); }
  bool bit(std::size_t index) const { return bits_.at(index); }
  // 1 -> +1, 0 -> -1.
  int signed_bit(std::size_t index) const { return bits_.at(index) ? 1 : -1; }
  std::vector<int> signed_bits() const;
  Payload inverted() const;

 private:
  std::vector<bool> bits_;
};

struct ScheduleParams {
  int chunk_frames = 32;
  int subchunk_frames = 8;
  int planes_per_chunk = 24;
  double theta = 0.18;
  // Planes are drawn from the leading principal components only.
  int candidate_components = 64;

  int subchunks_per_chunk() const { return chunk_frames / subchunk_frames; }

  // Throws kInvalidArgument on violated invariants. With dim > 0 also
  // enforces candidate_components <= dim.
  void validate(long dim = 0) const;

  friend bool operator==(const ScheduleParams&, const ScheduleParams&) = default;
};

struct Plane {
  int i = 0;
  int j = 0;
  friend bool operator==(const Plane&, const Plane&) = default;
};

/// Planes, signed bits and chips for every chunk of one utterance. Indexing
/// is canonical (chunk, plane slot, subchunk).
class WatermarkSchedule {
 public:
  WatermarkSchedule(ScheduleParams params, long num_frames, std::vector<Plane> planes,
                    std::vector<std::int8_t> bits, std::vector<std::int8_t> chips);

  const ScheduleParams& params() const noexcept { return params_; }
  long num_frames() const noexcept { return num_frames_; }
  int chunks() const noexcept { return chunks_; }
  int planes_per_chunk() const noexcept { return params_.planes_per_chunk; }
  int subchunks() const noexcept { return params_.subchunks_per_chunk(); }

  Plane plane(int c, int p) const { return planes_.at(slot(c, p)); }
  int bit(int c, int p) const { return bits_.at(slot(c, p)); }
  int chip(int c, int p, int l) const {
    return chips_.at(slot(c, p) * static_cast<std::size_t>(subchunks()) + static_cast<std::size_t>(l));
  }

  std::span<const Plane> chunk_planes(int c) const;
  std::span<const std::int8_t> chips() const noexcept { return chips_; }

  // Same planes and chips with every payload sign flipped.
  WatermarkSchedule with_inverted_bits() const;

  friend bool operator==(const WatermarkSchedule&, const WatermarkSchedule&) = default;

 private:
  std::size_t slot(int c, int p) const {
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(params_.planes_per_chunk) +
           static_cast<std::size_t>(p);
  }

  ScheduleParams params_;
  long num_frames_;
  int chunks_;
  std::vector<Plane> planes_;
  std::vector<std::int8_t> bits_;
  std::vector<std::int8_t> chips_;
};

/// Expands (K, N, payload) for a sequence of `num_frames` frames. Chunk c
/// uses the plane stream HMAC(K, tag || N || "planes" || c) and plane slot p
/// the chip stream HMAC(K, tag || N || "chips" || c || p), so any chunk can
/// be reconstructed independently.
WatermarkSchedule derive_schedule(const SecretKey& key, const Nonce& nonce, const Payload& payload,
                                  const ScheduleParams& params, long num_frames);

// Mean of all chips.
double chip_balance(const WatermarkSchedule& schedule);

}  // namespace lss
