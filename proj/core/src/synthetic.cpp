#include "lss/synthetic.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include "lss/error.hpp"

namespace lss {

namespace {

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorKind::kFormat,
          "'" + std::string(s) + "' is not a number");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Vector EigenSpectrum::materialize(long n) const {
  require(n >= 2, ErrorKind::kInvalidArgument, "spectrum dimension must be at least 2");
  Vector out(n);
  switch (kind) {
    case Kind::kGeometric:
      require(ratio > 0.0, ErrorKind::kInvalidArgument, "geometric ratio must be positive");
      for (long k = 0; k < n; ++k) out(k) = std::pow(ratio, static_cast<double>(k));
      break;
    case Kind::kGeometricSpan: {
      require(span >= 1.0, ErrorKind::kInvalidArgument, "geometric span must be >= 1");
      const double r = std::pow(span, -1.0 / static_cast<double>(n - 1));
      for (long k = 0; k < n; ++k) out(k) = std::pow(r, static_cast<double>(k));
      break;
    }
    case Kind::kLinear:
      require(hi >= lo && lo > 0.0, ErrorKind::kInvalidArgument, "linear spectrum needs hi >= lo > 0");
      for (long k = 0; k < n; ++k) out(k) = hi + (lo - hi) * static_cast<double>(k) / static_cast<double>(n - 1);
      break;
    case Kind::kExplicit:
      require(static_cast<long>(values.size()) == n, ErrorKind::kDimension,
              "explicit spectrum has " + std::to_string(values.size()) + " values for dimension " + std::to_string(n));
      for (long k = 0; k < n; ++k) out(k) = values[static_cast<std::size_t>(k)];
      break;
  }
  for (long k = 0; k < n; ++k) {
    require(out(k) > 0.0 && std::isfinite(out(k)), ErrorKind::kInvalidArgument, "spectrum must be strictly positive");
  }
  return out;
}

EigenSpectrum EigenSpectrum::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  require(colon != std::string_view::npos, ErrorKind::kFormat, "spectrum '" + std::string(text) + "' needs kind:args");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  EigenSpectrum s;
  if (kind == "explicit") {
    s.kind = Kind::kExplicit;
    for (auto part : split(args, ',')) s.values.push_back(to_double(part));
    return s;
  }
  for (auto part : split(args, ',')) {
    const std::size_t eq = part.find('=');
    require(eq != std::string_view::npos, ErrorKind::kFormat, "expected key=value in spectrum '" + std::string(text) + "'");
    const std::string_view key = part.substr(0, eq);
    const double value = to_double(part.substr(eq + 1));
    if (kind == "geometric" && key == "ratio") {
      s.kind = Kind::kGeometric;
      s.ratio = value;
    } else if (kind == "geometric" && key == "span") {
      s.kind = Kind::kGeometricSpan;
      s.span = value;
    } else if (kind == "linear" && (key == "hi" || key == "lo")) {
      s.kind = Kind::kLinear;
      (key == "hi" ? s.hi : s.lo) = value;
    } else {
      fail(ErrorKind::kFormat, "unknown spectrum parameter '" + std::string(part) + "'");
    }
  }
  return s;
}

std::string EigenSpectrum::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kGeometric: os << "geometric:ratio=" << ratio; break;
    case Kind::kGeometricSpan: os << "geometric:span=" << span; break;
    case Kind::kLinear: os << "linear:hi=" << hi << ",lo=" << lo; break;
    case Kind::kExplicit:
      os << "explicit:";
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
      break;
  }
  return os.str();
}

void SyntheticCorpusSpec::validate() const {
  require(n >= 2, ErrorKind::kInvalidArgument, "synthetic corpus dimension must be at least 2");
  require(frames >= 1, ErrorKind::kInvalidArgument, "synthetic utterances need at least one frame");
  require(num_utterances >= 1, ErrorKind::kInvalidArgument, "synthetic corpus needs at least one utterance");
  require(variance_scale > 0.0, ErrorKind::kInvalidArgument, "variance scale must be positive");
  require(frame_rate_hz > 0.0, ErrorKind::kInvalidArgument, "frame rate must be positive");
}

Matrix random_orthonormal(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (long c = 0; c < n; ++c) {
    for (long r = 0; r < n; ++r) g(r, c) = gauss(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // Fixing the signs of diag(R) makes Q Haar distributed.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

SyntheticCorpus::SyntheticCorpus(SyntheticCorpusSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  eigenvalues_ = spec_.variance_scale * spec_.spectrum.materialize(spec_.n);
  mixing_ = random_orthonormal(spec_.n, mix_seed(spec_.basis_seed, 0));
  std::mt19937_64 rng(mix_seed(spec_.basis_seed, 1));
  std::normal_distribution<double> gauss(0.0, std::sqrt(spec_.variance_scale));
  mean_.resize(spec_.n);
  for (long k = 0; k < spec_.n; ++k) mean_(k) = gauss(rng);
}

LatentSequence SyntheticCorpus::utterance(long index) const {
  require(index >= 0 && index < spec_.num_utterances, ErrorKind::kInvalidArgument, "utterance index out of range");
  std::mt19937_64 rng(mix_seed(spec_.seed, static_cast<std::uint64_t>(index)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(spec_.n, spec_.frames);
  const Vector scale = eigenvalues_.cwiseSqrt();
  for (long t = 0; t < spec_.frames; ++t) {
    for (long k = 0; k < spec_.n; ++k) g(k, t) = scale(k) * gauss(rng);
  }
  Matrix f = (mixing_ * g).colwise() + mean_;
  return LatentSequence(std::move(f), spec_.frame_rate_hz);
}

std::string SyntheticCorpus::utterance_id(long index) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn%05ld", index);
  return buf;
}

std::vector<LatentSequence> generate_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  const SyntheticCorpus corpus(spec);
  std::vector<LatentSequence> out;
  out.reserve(static_cast<std::size_t>(corpus.size()));
  for (long u = 0; u < corpus.size(); ++u) out.push_back(corpus.utterance(u));
  return out;
}

}  // namespace lss
