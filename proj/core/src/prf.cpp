#include "lss/prf.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "lss/error.hpp"

namespace lss {

Digest sha256(std::span<const std::uint8_t> message) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(message.data(), message.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    fail(ErrorKind::kNumerical, "SHA-256 computation failed");
  }
  return out;
}

Digest hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
  Digest out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
           out.data(), &len) == nullptr ||
      len != out.size()) {
    fail(ErrorKind::kNumerical, "HMAC-SHA256 computation failed");
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  require(hex.size() % 2 == 0, ErrorKind::kInvalidArgument, "hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    require(hi >= 0 && lo >= 0, ErrorKind::kInvalidArgument,
            "invalid hex digit in '" + std::string(hex) + "'");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

KeyedStream::KeyedStream(std::span<const std::uint8_t> key, Bytes prefix)
    : key_(key.begin(), key.end()), prefix_(std::move(prefix)) {}

void KeyedStream::refill() {
  Bytes message = prefix_;
  message.push_back(static_cast<std::uint8_t>(block_ >> 24));
  message.push_back(static_cast<std::uint8_t>(block_ >> 16));
  message.push_back(static_cast<std::uint8_t>(block_ >> 8));
  message.push_back(static_cast<std::uint8_t>(block_));
  ++block_;
  buffer_ = hmac_sha256(key_, message);
  buffer_pos_ = 0;
}

std::uint8_t KeyedStream::next_byte() {
  if (buffer_pos_ == buffer_.size()) refill();
  return buffer_[buffer_pos_++];
}

std::uint32_t KeyedStream::next_u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | next_byte();
  return v;
}

std::uint32_t KeyedStream::uniform(std::uint32_t bound) {
  require(bound > 0, ErrorKind::kInvalidArgument, "uniform bound must be positive");
  // Largest multiple of bound representable in 32 bits.
  const std::uint64_t range = std::uint64_t{1} << 32;
  const std::uint64_t limit = range - (range % bound);
  for (;;) {
    const std::uint64_t v = next_u32();
    if (v < limit) return static_cast<std::uint32_t>(v % bound);
  }
}

bool KeyedStream::next_bit() {
  if (bits_left_ == 0) {
    bit_byte_ = next_byte();
    bits_left_ = 8;
  }
  const bool bit = (bit_byte_ & 0x80) != 0;
  bit_byte_ = static_cast<std::uint8_t>(bit_byte_ << 1);
  --bits_left_;
  return bit;
}

}  // namespace lss
