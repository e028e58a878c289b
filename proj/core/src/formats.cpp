#include "lss/formats.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lss/error.hpp"

namespace lss {

static_assert(std::endian::native == std::endian::little,
              "LSSB/LSSL serialization assumes a little-endian host");

namespace {

class Writer {
 public:
  void magic(const char (&tag)[5]) { out_.insert(out_.end(), tag, tag + 4); }

  template <typename T>
  void put(T value) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    out_.insert(out_.end(), raw, raw + sizeof(T));
  }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void expect_magic(const char (&tag)[5]) {
    need(4, "magic");
    if (std::memcmp(bytes_.data() + pos_, tag, 4) != 0) {
      fail(ErrorKind::kFormat, std::string("bad magic, expected '") + tag + "'");
    }
    pos_ += 4;
  }

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      fail(ErrorKind::kFormat,
           std::to_string(bytes_.size() - pos_) + " trailing bytes after payload");
    }
  }

 private:
  void need(std::size_t count, const char* what) const {
    if (bytes_.size() - pos_ < count) {
      fail(ErrorKind::kFormat, std::string("truncated file while reading ") + what);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Bytes serialize_basis(const PcaBasis& basis) {
  const Eigen::Index n = basis.dim();
  Writer w;
  w.magic("LSSB");
  w.put<std::uint32_t>(kBasisFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) w.put<double>(basis.mean()(i));
  for (Eigen::Index i = 0; i < n; ++i) w.put<double>(basis.eigenvalues()(i));
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) w.put<double>(basis.components()(r, c));
  }
  return w.take();
}

PcaBasis deserialize_basis(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect_magic("LSSB");
  const auto version = r.get<std::uint32_t>("version");
  require(version == kBasisFormatVersion, ErrorKind::kFormat,
          "unsupported LSSB version " + std::to_string(version));
  const auto n = static_cast<Eigen::Index>(r.get<std::uint32_t>("dimension"));
  require(n >= 2, ErrorKind::kFormat, "LSSB dimension must be at least 2");
  // Reject absurd headers before allocating.
  require(bytes.size() >= 12 + sizeof(double) * static_cast<std::size_t>(n * (n + 2)),
          ErrorKind::kFormat, "truncated LSSB payload");
  Vector mean(n), eigenvalues(n);
  Matrix components(n, n);
  for (Eigen::Index i = 0; i < n; ++i) mean(i) = r.get<double>("mean");
  for (Eigen::Index i = 0; i < n; ++i) eigenvalues(i) = r.get<double>("eigenvalues");
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index row = 0; row < n; ++row) components(row, c) = r.get<double>("components");
  }
  r.expect_end();
  return PcaBasis(std::move(mean), std::move(components), std::move(eigenvalues));
}

Bytes serialize_latents(const LatentSequence& f) {
  Writer w;
  w.magic("LSSL");
  w.put<std::uint32_t>(kLatentFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.dim()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.frames()));
  w.put<double>(f.frame_rate_hz());
  for (Eigen::Index r = 0; r < f.dim(); ++r) {
    for (Eigen::Index c = 0; c < f.frames(); ++c) {
      w.put<float>(static_cast<float>(f.data()(r, c)));
    }
  }
  return w.take();
}

LatentSequence deserialize_latents(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect_magic("LSSL");
  const auto version = r.get<std::uint32_t>("version");
  require(version == kLatentFormatVersion, ErrorKind::kFormat,
          "unsupported LSSL version " + std::to_string(version));
  const auto n = static_cast<Eigen::Index>(r.get<std::uint32_t>("dimension"));
  const auto t = static_cast<Eigen::Index>(r.get<std::uint32_t>("frame count"));
  const auto rate = r.get<double>("frame rate");
  require(bytes.size() >= 24 + sizeof(float) * static_cast<std::size_t>(n) * static_cast<std::size_t>(t),
          ErrorKind::kFormat, "truncated LSSL payload");
  Matrix data(n, t);
  for (Eigen::Index row = 0; row < n; ++row) {
    for (Eigen::Index c = 0; c < t; ++c) data(row, c) = r.get<float>("data");
  }
  r.expect_end();
  return LatentSequence(std::move(data), rate);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::kIo, "short write to '" + path.string() + "'");
}

void write_basis(const PcaBasis& basis, const std::filesystem::path& path) {
  write_file(path, serialize_basis(basis));
}

PcaBasis read_basis(const std::filesystem::path& path) { return deserialize_basis(read_file(path)); }

void write_latents(const LatentSequence& f, const std::filesystem::path& path) {
  write_file(path, serialize_latents(f));
}

LatentSequence read_latents(const std::filesystem::path& path) {
  return deserialize_latents(read_file(path));
}

}  // namespace lss
