#pragma once

#include <filesystem>

#include "lss/latent.hpp"
#include "lss/prf.hpp"

namespace lss {

// LSSB: "LSSB", u32 version, u32 n, f64 mean[n], f64 eigenvalues[n],
// f64 components[n*n] column-major. Little-endian throughout.
inline constexpr std::uint32_t kBasisFormatVersion = 1;
// LSSL: "LSSL", u32 version, u32 n, u32 T, f64 frame_rate, f32 data[n*T]
// row-major. Little-endian throughout.
inline constexpr std::uint32_t kLatentFormatVersion = 1;

Bytes serialize_basis(const PcaBasis& basis);
PcaBasis deserialize_basis(std::span<const std::uint8_t> bytes);

Bytes serialize_latents(const LatentSequence& f);
LatentSequence deserialize_latents(std::span<const std::uint8_t> bytes);

void write_basis(const PcaBasis& basis, const std::filesystem::path& path);
PcaBasis read_basis(const std::filesystem::path& path);

void write_latents(const LatentSequence& f, const std::filesystem::path& path);
LatentSequence read_latents(const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace lss
