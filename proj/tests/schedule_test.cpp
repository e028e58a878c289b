#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include <gtest/gtest.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "lss/error.hpp"
#include "lss/prf.hpp"
#include "lss/schedule.hpp"

namespace lss {
namespace {

const SecretKey kKey = SecretKey::from_hex("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
const Nonce kNonce = Nonce::from_hex("f0e0d0c0b0a090807060504030201000");

Bytes text(std::string_view s) { return Bytes(s.begin(), s.end()); }

// RFC 4231 test cases 1, 2 and 6.
TEST(HmacSha256, Rfc4231Vectors) {
  const Bytes key1(20, 0x0b);
  EXPECT_EQ(to_hex(hmac_sha256(key1, text("Hi There"))),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  EXPECT_EQ(to_hex(hmac_sha256(text("Jefe"), text("what do ya want for nothing?"))),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
  const Bytes key6(131, 0xaa);
  EXPECT_EQ(to_hex(hmac_sha256(key6, text("Test Using Larger Than Block-Size Key - Hash Key First"))),
            "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
}

TEST(Sha256, EmptyString) {
  EXPECT_EQ(to_hex(sha256(Bytes{})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Hex, RoundTripAndErrors) {
  const Bytes b = {0x00, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "00abff");
  EXPECT_EQ(from_hex("00ABff"), b);
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
  EXPECT_THROW(SecretKey::from_hex("00"), Error);
}

// Independent expansion of the schedule: one flat byte string per stream
// built with OpenSSL directly, then consumed the same way the definition reads.
class OracleStream {
 public:
  OracleStream(const SecretKey& key, const Nonce& nonce, std::string_view label, int c, int p) {
    std::string tag = "lss-schedule-v1";
    prefix_.assign(tag.begin(), tag.end());
    prefix_.push_back(0);
    prefix_.insert(prefix_.end(), nonce.bytes().begin(), nonce.bytes().end());
    prefix_.insert(prefix_.end(), label.begin(), label.end());
    prefix_.push_back(0);
    for (std::uint32_t v : {static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(p)})
      for (int s = 24; s >= 0; s -= 8) prefix_.push_back(static_cast<std::uint8_t>(v >> s));
    key_.assign(key.bytes().begin(), key.bytes().end());
  }
  std::uint8_t byte_at(std::size_t index) {
    while (bytes_.size() <= index) {
      Bytes msg = prefix_;
      const auto block = static_cast<std::uint32_t>(bytes_.size() / 32);
      for (int s = 24; s >= 0; s -= 8) msg.push_back(static_cast<std::uint8_t>(block >> s));
      unsigned char out[EVP_MAX_MD_SIZE];
      unsigned int len = 0;
      HMAC(EVP_sha256(), key_.data(), static_cast<int>(key_.size()), msg.data(), msg.size(), out, &len);
      bytes_.insert(bytes_.end(), out, out + len);
    }
    return bytes_[index];
  }
  std::uint32_t word(std::size_t k) {
    return (std::uint32_t{byte_at(4 * k)} << 24) | (std::uint32_t{byte_at(4 * k + 1)} << 16) |
           (std::uint32_t{byte_at(4 * k + 2)} << 8) | std::uint32_t{byte_at(4 * k + 3)};
  }
  bool bit(std::size_t k) { return (byte_at(k / 8) >> (7 - k % 8)) & 1; }

 private:
  Bytes key_, prefix_, bytes_;
};

TEST(DeriveSchedule, MatchesIndependentExpansion) {
  const ScheduleParams params;
  const Payload payload = Payload::from_hex("a5c3", 16);
  const WatermarkSchedule s = derive_schedule(kKey, kNonce, payload, params, 750);
  ASSERT_EQ(s.chunks(), 23);
  for (int c = 0; c < s.chunks(); ++c) {
    OracleStream planes(kKey, kNonce, "planes", c, 0);
    std::vector<int> pool(64);
    std::iota(pool.begin(), pool.end(), 0);
    std::size_t w = 0;
    for (std::uint64_t k = 0; k < 48; ++k) {
      const std::uint64_t bound = 64 - k;
      const std::uint64_t limit = (std::uint64_t{1} << 32) / bound * bound;
      std::uint64_t v;
      do v = planes.word(w++);
      while (v >= limit);
      std::swap(pool[k], pool[k + v % bound]);
    }
    for (int p = 0; p < 24; ++p) {
      const int a = pool[2 * p], b = pool[2 * p + 1];
      EXPECT_EQ(s.plane(c, p), (Plane{std::min(a, b), std::max(a, b)}));
      const std::size_t idx = static_cast<std::size_t>(c * 24 + p) % 16;
      EXPECT_EQ(s.bit(c, p), payload.bit(idx) ? 1 : -1);
      OracleStream chips(kKey, kNonce, "chips", c, p);
      for (int l = 0; l < 4; ++l) EXPECT_EQ(s.chip(c, p, l), chips.bit(l) ? 1 : -1);
    }
  }
}

// Frozen vector: any change to the expansion breaks previously marked audio.
TEST(DeriveSchedule, FrozenVector) {
  const WatermarkSchedule s = derive_schedule(kKey, kNonce, Payload::from_hex("a5c3", 16), ScheduleParams{}, 64);
  std::string planes, chips;
  for (int p = 0; p < 4; ++p) planes += std::to_string(s.plane(0, p).i) + "-" + std::to_string(s.plane(0, p).j) + " ";
  for (int l = 0; l < 4; ++l) chips += s.chip(1, 23, l) > 0 ? '+' : '-';
  EXPECT_EQ(planes, "32-47 38-45 27-42 14-20 ");
  EXPECT_EQ(chips, "--++");
}

TEST(DeriveSchedule, Deterministic) {
  const Payload payload = Payload::from_hex("1234", 16);
  EXPECT_EQ(derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 500),
            derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 500));
}

TEST(DeriveSchedule, PlanesDisjointAndOrdered) {
  const WatermarkSchedule s = derive_schedule(kKey, kNonce, Payload::from_hex("ff", 8), ScheduleParams{}, 3200);
  for (int c = 0; c < s.chunks(); ++c) {
    std::set<int> seen;
    for (const Plane& pl : s.chunk_planes(c)) {
      EXPECT_LT(pl.i, pl.j);
      EXPECT_GE(pl.i, 0);
      EXPECT_LT(pl.j, 64);
      EXPECT_TRUE(seen.insert(pl.i).second);
      EXPECT_TRUE(seen.insert(pl.j).second);
    }
  }
}

TEST(DeriveSchedule, ChunkCountDropsPartialChunk) {
  const Payload payload = Payload::from_hex("ff", 8);
  EXPECT_EQ(derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 63).chunks(), 1);
  EXPECT_EQ(derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 64).chunks(), 2);
  EXPECT_THROW(derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 31), Error);
}

TEST(DeriveSchedule, SingleBitPayloadSignsEveryPlane) {
  const WatermarkSchedule s = derive_schedule(kKey, kNonce, Payload({true}), ScheduleParams{}, 320);
  for (int c = 0; c < s.chunks(); ++c)
    for (int p = 0; p < 24; ++p) EXPECT_EQ(s.bit(c, p), 1);
}

TEST(DeriveSchedule, CyclicPayloadLaw) {
  std::vector<bool> bits = {true, false, false, true, true};
  const Payload payload(bits);
  const WatermarkSchedule s = derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 320);
  for (int c = 0; c < s.chunks(); ++c)
    for (int p = 0; p < 24; ++p) EXPECT_EQ(s.bit(c, p), bits[(c * 24 + p) % 5] ? 1 : -1);
}

TEST(DeriveSchedule, PrefixReconstructionIsConsistent) {
  const Payload payload = Payload::from_hex("abcd", 16);
  const auto longer = derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 960);
  const auto shorter = derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 320);
  for (int c = 0; c < shorter.chunks(); ++c)
    for (int p = 0; p < 24; ++p) {
      EXPECT_EQ(longer.plane(c, p), shorter.plane(c, p));
      for (int l = 0; l < 4; ++l) EXPECT_EQ(longer.chip(c, p, l), shorter.chip(c, p, l));
    }
}

double fraction_of_chunks_changed(const WatermarkSchedule& a, const WatermarkSchedule& b) {
  int changed = 0;
  for (int c = 0; c < a.chunks(); ++c) {
    bool differs = false;
    for (int p = 0; p < a.planes_per_chunk() && !differs; ++p) {
      differs = !(a.plane(c, p) == b.plane(c, p));
      for (int l = 0; l < a.subchunks() && !differs; ++l) differs = a.chip(c, p, l) != b.chip(c, p, l);
    }
    changed += differs;
  }
  return static_cast<double>(changed) / a.chunks();
}

TEST(DeriveSchedule, SingleBitKeyOrNonceFlipChangesChunks) {
  const Payload payload = Payload::from_hex("abcd", 16);
  const auto base = derive_schedule(kKey, kNonce, payload, ScheduleParams{}, 750);
  for (int flip = 0; flip < 100; ++flip) {
    auto kb = Bytes(kKey.bytes().begin(), kKey.bytes().end());
    kb[static_cast<std::size_t>(flip % 256) / 8] ^= static_cast<std::uint8_t>(1u << (flip % 8));
    const auto other_key = derive_schedule(SecretKey(kb), kNonce, payload, ScheduleParams{}, 750);
    EXPECT_GE(fraction_of_chunks_changed(base, other_key), 0.99) << "key bit " << flip;

    auto nb = Bytes(kNonce.bytes().begin(), kNonce.bytes().end());
    nb[static_cast<std::size_t>(flip % 128) / 8] ^= static_cast<std::uint8_t>(1u << (flip % 8));
    const auto other_nonce = derive_schedule(kKey, Nonce(nb), payload, ScheduleParams{}, 750);
    EXPECT_GE(fraction_of_chunks_changed(base, other_nonce), 0.99) << "nonce bit " << flip;
  }
}

TEST(DeriveSchedule, ChipsAreUncorrelatedAcrossNonces) {
  const Payload payload = Payload::from_hex("abcd", 16);
  std::vector<std::vector<std::int8_t>> runs;
  for (int k = 0; k < 8; ++k) {
    Bytes nb(16, 0);
    nb[15] = static_cast<std::uint8_t>(k);
    const auto s = derive_schedule(kKey, Nonce(nb), payload, ScheduleParams{}, 10000);
    runs.emplace_back(s.chips().begin(), s.chips().end());
  }
  for (std::size_t a = 0; a < runs.size(); ++a) {
    double mean = std::accumulate(runs[a].begin(), runs[a].end(), 0.0) / static_cast<double>(runs[a].size());
    EXPECT_LT(std::abs(mean), 0.03);
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      double dot = 0.0;
      for (std::size_t k = 0; k < runs[a].size(); ++k) dot += runs[a][k] * runs[b][k];
      EXPECT_LT(std::abs(dot / static_cast<double>(runs[a].size())), 0.03);
    }
  }
}

TEST(ChipBalance, Cases) {
  ScheduleParams params;
  params.planes_per_chunk = 1;
  params.candidate_components = 2;
  const WatermarkSchedule all_plus(params, 32, {Plane{0, 1}}, {1}, {1, 1, 1, 1});
  EXPECT_EQ(chip_balance(all_plus), 1.0);
  const WatermarkSchedule half(params, 32, {Plane{0, 1}}, {1}, {1, -1, 1, -1});
  EXPECT_EQ(chip_balance(half), 0.0);
  const WatermarkSchedule quarter(params, 32, {Plane{0, 1}}, {1}, {1, -1, -1, -1});
  EXPECT_EQ(chip_balance(quarter), -0.5);
}

TEST(WatermarkSchedule, RejectsOverlappingPlanes) {
  ScheduleParams params;
  params.planes_per_chunk = 2;
  params.candidate_components = 4;
  EXPECT_THROW(WatermarkSchedule(params, 32, {Plane{0, 1}, Plane{1, 2}}, {1, 1}, std::vector<std::int8_t>(8, 1)),
               Error);
  EXPECT_THROW(WatermarkSchedule(params, 32, {Plane{1, 0}, Plane{2, 3}}, {1, 1}, std::vector<std::int8_t>(8, 1)),
               Error);
  EXPECT_NO_THROW(WatermarkSchedule(params, 32, {Plane{0, 1}, Plane{2, 3}}, {1, -1}, std::vector<std::int8_t>(8, 1)));
}

TEST(ScheduleParams, Validation) {
  ScheduleParams p;
  EXPECT_NO_THROW(p.validate(128));
  EXPECT_THROW(p.validate(32), Error);
  p.subchunk_frames = 7;
  EXPECT_THROW(p.validate(), Error);
  p = ScheduleParams{};
  p.planes_per_chunk = 33;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Payload, HexParsing) {
  const Payload p = Payload::from_hex("a0", 3);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_TRUE(p.bit(0));
  EXPECT_FALSE(p.bit(1));
  EXPECT_TRUE(p.bit(2));
  EXPECT_EQ(Payload::from_hex("ff").size(), 8u);
  EXPECT_THROW(Payload::from_hex("ff", 9), Error);
  EXPECT_EQ(p.inverted().signed_bits(), (std::vector<int>{-1, 1, -1}));
}

TEST(DeriveNonce, BoundToContentAndKey) {
  const Bytes a = text("utterance one"), b = text("utterance two");
  EXPECT_EQ(derive_nonce(kKey, a), derive_nonce(kKey, a));
  EXPECT_FALSE(derive_nonce(kKey, a) == derive_nonce(kKey, b));
  Bytes ob(32, 7);
  EXPECT_FALSE(derive_nonce(kKey, a) == derive_nonce(SecretKey(ob), a));
}

}  // namespace
}  // namespace lss
