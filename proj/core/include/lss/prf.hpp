#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lss {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> message);
Digest hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);

std::string to_hex(std::span<const std::uint8_t> bytes);
// Accepts upper or lower case; throws kInvalidArgument on odd length or bad digits.
Bytes from_hex(std::string_view hex);

/// Deterministic byte stream HMAC-SHA256(key, prefix || be32(block)) for
/// block = 0, 1, 2, ...  Distinct prefixes give independent streams.
class KeyedStream {
 public:
  KeyedStream(std::span<const std::uint8_t> key, Bytes prefix);

  std::uint8_t next_byte();
  std::uint32_t next_u32();
  // Uniform integer in [0, bound) by rejection sampling; bound > 0.
  std::uint32_t uniform(std::uint32_t bound);
  bool next_bit();

 private:
  void refill();

  Bytes key_;
  Bytes prefix_;
  std::uint32_t block_ = 0;
  Digest buffer_{};
  std::size_t buffer_pos_ = buffer_.size();
  std::uint8_t bit_byte_ = 0;
  int bits_left_ = 0;
};

}  // namespace lss
