#include "lss/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lss/error.hpp"
#include "lss/formats.hpp"

namespace lss {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

Waveform decode_wav(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= 12 && tag_is(bytes, 0, "RIFF") && tag_is(bytes, 8, "WAVE"), ErrorKind::kFormat,
          "not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = get_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
    if (tag_is(bytes, pos, "fmt ")) {
      require(available >= 16, ErrorKind::kFormat, "fmt chunk too short");
      format = get_u16(bytes, body);
      channels = get_u16(bytes, body + 2);
      rate = get_u32(bytes, body + 4);
      bits = get_u16(bytes, body + 14);
      if (format == kFormatExtensible && available >= 26) format = get_u16(bytes, body + 24);
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, available);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  require(have_fmt, ErrorKind::kFormat, "WAV file has no fmt chunk");
  require(have_data, ErrorKind::kFormat, "WAV file has no data chunk");
  require(channels == 1, ErrorKind::kFormat,
          "only mono WAV is supported, file has " + std::to_string(channels) + " channels");
  require(rate > 0, ErrorKind::kFormat, "WAV sample rate is zero");

  Waveform x;
  x.sample_rate_hz = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    x.samples.resize(data.size() / 2);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
      x.samples[i] = static_cast<std::int16_t>(get_u16(data, 2 * i)) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    x.samples.resize(data.size() / 4);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
      const std::uint32_t raw = get_u32(data, 4 * i);
      float v;
      std::memcpy(&v, &raw, sizeof v);
      x.samples[i] = v;
    }
  } else {
    fail(ErrorKind::kFormat, "unsupported WAV encoding (format " + std::to_string(format) + ", " +
                                 std::to_string(bits) + " bits); need PCM16 or float32");
  }
  return x;
}

Waveform read_wav(const std::filesystem::path& path) {
  try {
    return decode_wav(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kFormat) fail(ErrorKind::kFormat, path.string() + ": " + e.what());
    throw;
  }
}

std::vector<std::uint8_t> encode_wav(const Waveform& x, WavSampleFormat format) {
  require(x.sample_rate_hz > 0, ErrorKind::kInvalidArgument, "sample rate must be positive");
  const std::uint16_t bits = format == WavSampleFormat::kPcm16 ? 16 : 32;
  const std::uint16_t tag = format == WavSampleFormat::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t data_size = static_cast<std::uint32_t>(x.samples.size() * (bits / 8));
  const std::uint32_t rate = static_cast<std::uint32_t>(x.sample_rate_hz);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : x.samples) {
    const double clamped = std::clamp(std::isfinite(s) ? s : 0.0, -1.0, 1.0);
    if (format == WavSampleFormat::kPcm16) {
      const auto q = static_cast<std::int16_t>(std::lround(std::clamp(clamped * 32768.0, -32768.0, 32767.0)));
      put_u16(out, static_cast<std::uint16_t>(q));
    } else {
      const auto f = static_cast<float>(clamped);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof raw);
      put_u32(out, raw);
    }
  }
  return out;
}

void write_wav(const Waveform& x, const std::filesystem::path& path, WavSampleFormat format) {
  write_file(path, encode_wav(x, format));
}

}  // namespace lss
