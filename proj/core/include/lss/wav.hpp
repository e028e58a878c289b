#pragma once

#include <filesystem>

#include "lss/codecs.hpp"

namespace lss {

enum class WavSampleFormat { kPcm16, kFloat32 };

// Mono RIFF/WAVE, PCM 16-bit or IEEE float 32-bit. Multichannel files are
// rejected with a kFormat error.
Waveform read_wav(const std::filesystem::path& path);
Waveform decode_wav(std::span<const std::uint8_t> bytes);

// Samples are clamped to [-1, 1] on write.
void write_wav(const Waveform& x, const std::filesystem::path& path,
               WavSampleFormat format = WavSampleFormat::kFloat32);
std::vector<std::uint8_t> encode_wav(const Waveform& x, WavSampleFormat format = WavSampleFormat::kFloat32);

}  // namespace lss
