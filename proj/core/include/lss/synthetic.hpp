#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lss/latent.hpp"

namespace lss {

/// Diagonal covariance of a synthetic corpus. Text forms:
///   geometric:ratio=0.95     lambda_k = ratio^k
///   geometric:span=10        ratio chosen so lambda_1 / lambda_n = span
///   linear:hi=2,lo=0.2       evenly spaced from hi down to lo
///   explicit:4,2,1,...       one value per dimension
struct EigenSpectrum {
  enum class Kind { kGeometric, kGeometricSpan, kLinear, kExplicit };

  Kind kind = Kind::kGeometricSpan;
  double ratio = 0.0;
  double span = 10.0;
  double hi = 1.0;
  double lo = 1.0;
  std::vector<double> values;

  // Strictly positive, length n.
  Vector materialize(long n) const;

  static EigenSpectrum parse(std::string_view text);
  std::string to_string() const;
};

struct SyntheticCorpusSpec {
  long n = 128;
  long frames = 750;  // 10 s at 75 Hz
  long num_utterances = 100;
  EigenSpectrum spectrum;
  double variance_scale = 1.0;  // multiplies the whole spectrum
  double frame_rate_hz = 75.0;
  std::uint64_t basis_seed = 1;  // mixing basis and mean: the "distribution"
  std::uint64_t seed = 1;        // frame draws

  void validate() const;
};

/// Frames f_t = mu + Q diag(sqrt(lambda)) g_t with g_t iid standard normal,
/// Q a seeded random orthonormal matrix. Utterances are individually
/// addressable and reproducible.
class SyntheticCorpus {
 public:
  explicit SyntheticCorpus(SyntheticCorpusSpec spec);

  const SyntheticCorpusSpec& spec() const noexcept { return spec_; }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& mixing() const noexcept { return mixing_; }
  const Vector& mean() const noexcept { return mean_; }
  long size() const noexcept { return spec_.num_utterances; }

  LatentSequence utterance(long index) const;
  std::string utterance_id(long index) const;

 private:
  SyntheticCorpusSpec spec_;
  Vector eigenvalues_;
  Matrix mixing_;
  Vector mean_;
};

std::vector<LatentSequence> generate_synthetic_corpus(const SyntheticCorpusSpec& spec);

// Haar-distributed orthonormal matrix from a seed.
Matrix random_orthonormal(long n, std::uint64_t seed);

// Seed for stream `index` derived from `seed` (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace lss
