#include <cstring>
#include <filesystem>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "lss/error.hpp"
#include "lss/formats.hpp"
#include "lss/synthetic.hpp"

namespace lss {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("lss_formats_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

PcaBasis sample_basis(long n) {
  Vector ev(n);
  for (long k = 0; k < n; ++k) ev(k) = 1.0 + static_cast<double>(n - k) / 3.0;
  Vector mean = Vector::LinSpaced(n, -1.0, 1.0);
  return PcaBasis(mean, random_orthonormal(n, 5), ev);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(Lssb, RoundTripIsExact) {
  const PcaBasis basis = sample_basis(16);
  const Bytes bytes = serialize_basis(basis);
  EXPECT_EQ(bytes.size(), 12u + 8u * (16 + 16 + 256));
  const PcaBasis back = deserialize_basis(bytes);
  EXPECT_EQ(back.mean(), basis.mean());
  EXPECT_EQ(back.eigenvalues(), basis.eigenvalues());
  EXPECT_EQ(back.components(), basis.components());
  EXPECT_EQ(back.id(), basis.id());
  EXPECT_EQ(serialize_basis(back), bytes);
}

TEST(Lssb, FileRoundTrip) {
  TempDir dir;
  const PcaBasis basis = sample_basis(8);
  write_basis(basis, dir.path() / "b.lssb");
  EXPECT_EQ(read_basis(dir.path() / "b.lssb").id(), basis.id());
}

TEST(Lssb, WrongMagicRaisesFormatError) {
  Bytes bytes = serialize_basis(sample_basis(4));
  bytes[3] = 'X';
  EXPECT_EQ(kind_of([&] { deserialize_basis(bytes); }), ErrorKind::kFormat);
}

TEST(Lssb, TruncatedOrPaddedRaisesFormatError) {
  Bytes bytes = serialize_basis(sample_basis(4));
  Bytes shorter(bytes.begin(), bytes.end() - 1);
  EXPECT_EQ(kind_of([&] { deserialize_basis(shorter); }), ErrorKind::kFormat);
  Bytes longer = bytes;
  longer.push_back(0);
  EXPECT_EQ(kind_of([&] { deserialize_basis(longer); }), ErrorKind::kFormat);
}

TEST(Lssb, UnsupportedVersionRaisesFormatError) {
  Bytes bytes = serialize_basis(sample_basis(4));
  bytes[4] = 9;
  EXPECT_EQ(kind_of([&] { deserialize_basis(bytes); }), ErrorKind::kFormat);
}

TEST(Lssl, FileSizeForTenSecondsAtSeventyFiveHertz) {
  TempDir dir;
  Matrix data = Matrix::Random(128, 750);
  write_latents(LatentSequence(data, 75.0), dir.path() / "x.lssl");
  EXPECT_EQ(fs::file_size(dir.path() / "x.lssl"), 384024u);
}

TEST(Lssl, RoundTripAtSinglePrecision) {
  Matrix data = Matrix::Random(6, 40);
  const LatentSequence f(data, 75.0);
  const LatentSequence back = deserialize_latents(serialize_latents(f));
  EXPECT_EQ(back.dim(), 6);
  EXPECT_EQ(back.frames(), 40);
  EXPECT_EQ(back.frame_rate_hz(), 75.0);
  EXPECT_EQ(back.data(), data.cast<float>().cast<double>());
}

TEST(Lssl, RowMajorLayout) {
  Matrix data(2, 3);
  data << 1, 2, 3,
          4, 5, 6;
  const Bytes bytes = serialize_latents(LatentSequence(data, 75.0));
  float second;
  std::memcpy(&second, bytes.data() + 24 + 4, sizeof(float));
  EXPECT_EQ(second, 2.0f);
}

TEST(Lssl, WrongMagicRaisesFormatError) {
  Bytes bytes = serialize_latents(LatentSequence(Matrix::Zero(2, 2), 75.0));
  bytes[0] = 'X';
  EXPECT_EQ(kind_of([&] { deserialize_latents(bytes); }), ErrorKind::kFormat);
}

TEST(Lssl, BasisBytesAreNotLatents) {
  const Bytes bytes = serialize_basis(sample_basis(4));
  EXPECT_EQ(kind_of([&] { deserialize_latents(bytes); }), ErrorKind::kFormat);
}

TEST(Files, MissingFileRaisesIoError) {
  EXPECT_EQ(kind_of([] { read_file("/nonexistent/lss/file.lssb"); }), ErrorKind::kIo);
}

}  // namespace
}  // namespace lss
