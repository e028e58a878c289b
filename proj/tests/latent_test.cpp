#include <random>

#include <gtest/gtest.h>

#include "lss/error.hpp"
#include "lss/formats.hpp"
#include "lss/latent.hpp"
#include "lss/synthetic.hpp"

namespace lss {
namespace {

Matrix random_matrix(long rows, long cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (long c = 0; c < cols; ++c)
    for (long r = 0; r < rows; ++r) m(r, c) = g(rng);
  return m;
}

PcaBasis random_basis(long n, std::uint64_t seed) {
  Vector ev(n);
  for (long k = 0; k < n; ++k) ev(k) = 10.0 / (1.0 + k);
  Vector mean = random_matrix(n, 1, seed + 7).col(0);
  return PcaBasis(mean, random_orthonormal(n, seed), ev);
}

TEST(FitPca, RecoversDiagonalGaussianSpectrum) {
  const long n = 8;
  const std::vector<double> d = {8.0, 6.0, 4.5, 3.0, 2.0, 1.2, 0.7, 0.3};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix frames(n, 100000);
  for (long t = 0; t < frames.cols(); ++t)
    for (long k = 0; k < n; ++k) frames(k, t) = 3.0 + std::sqrt(d[k]) * g(rng);

  // Split the stream over several sequences to exercise the merge step.
  std::vector<LatentSequence> corpus;
  for (long s = 0; s < 10; ++s) corpus.emplace_back(frames.middleCols(s * 10000, 10000), 75.0);
  const PcaBasis basis = fit_pca(corpus);
  for (long k = 0; k < n; ++k) {
    EXPECT_NEAR(basis.eigenvalues()(k), d[k], 0.05 * d[k]) << "component " << k;
  }
  EXPECT_NEAR(basis.mean()(0), 3.0, 0.05);
}

TEST(FitPca, ZeroVarianceCorpusFails) {
  Matrix frames = Matrix::Constant(4, 50, 1.5);
  std::vector<LatentSequence> corpus{LatentSequence(frames, 75.0)};
  try {
    fit_pca(corpus);
    FAIL() << "expected a numerical error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumerical);
  }
}

TEST(FitPca, HandComputedTwoByTwo) {
  Matrix frames(2, 4);
  frames << 1, -1, 0, 0,
            0, 0, 2, -2;
  std::vector<LatentSequence> corpus{LatentSequence(frames, 75.0)};
  const PcaBasis basis = fit_pca(corpus);
  EXPECT_NEAR(basis.eigenvalues()(0), 2.0, 1e-12);
  EXPECT_NEAR(basis.eigenvalues()(1), 0.5, 1e-12);
  EXPECT_NEAR(basis.mean().norm(), 0.0, 1e-15);
  // Largest-magnitude entry of each column is positive.
  Matrix expected(2, 2);
  expected << 0, 1,
              1, 0;
  EXPECT_LT((basis.components() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitPca, TooFewFramesFails) {
  std::vector<LatentSequence> corpus{LatentSequence(random_matrix(5, 5, 1), 75.0)};
  EXPECT_THROW(fit_pca(corpus), Error);
}

TEST(FitPca, DimensionMismatchFails) {
  PcaAccumulator acc;
  acc.add(LatentSequence(random_matrix(4, 20, 1), 75.0));
  try {
    acc.add(LatentSequence(random_matrix(5, 20, 2), 75.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
}

TEST(FitPca, DeterministicBitIdentical) {
  SyntheticCorpusSpec spec;
  spec.n = 16;
  spec.frames = 200;
  spec.num_utterances = 5;
  const auto corpus = generate_synthetic_corpus(spec);
  EXPECT_EQ(serialize_basis(fit_pca(corpus)), serialize_basis(fit_pca(corpus)));
}

TEST(FitPca, SignConventionAndOrthonormality) {
  SyntheticCorpusSpec spec;
  spec.n = 12;
  spec.frames = 500;
  spec.num_utterances = 4;
  const PcaBasis basis = fit_pca(generate_synthetic_corpus(spec));
  const Matrix& u = basis.components();
  EXPECT_LT((u.transpose() * u - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-9);
  for (long k = 0; k < 12; ++k) {
    Eigen::Index pivot;
    u.col(k).cwiseAbs().maxCoeff(&pivot);
    EXPECT_GT(u(pivot, k), 0.0);
    if (k > 0) EXPECT_LE(basis.eigenvalues()(k), basis.eigenvalues()(k - 1));
  }
}

TEST(FitPca, ProjectedCovarianceIsDiagonal) {
  SyntheticCorpusSpec spec;
  spec.n = 10;
  spec.frames = 2000;
  spec.num_utterances = 10;
  spec.spectrum = EigenSpectrum::parse("geometric:span=20");
  const auto corpus = generate_synthetic_corpus(spec);
  const PcaBasis basis = fit_pca(corpus);
  PcaAccumulator acc;
  for (const auto& f : corpus) {
    const auto z = project(f, basis);
    acc.add(LatentSequence(z.data(), 75.0));
  }
  const Matrix cov = acc.covariance();
  const double total = static_cast<double>(acc.frames());
  const Vector& ev = basis.eigenvalues();
  for (long i = 0; i < 10; ++i) {
    for (long j = 0; j < 10; ++j) {
      if (i == j) continue;
      EXPECT_LE(std::abs(cov(i, j)), 3.0 * std::sqrt(ev(i) * ev(j) / total)) << i << "," << j;
    }
  }
}

TEST(Project, CenteringGivesZero) {
  const PcaBasis basis = random_basis(6, 3);
  Matrix f = basis.mean().replicate(1, 9);
  const auto z = project(LatentSequence(f, 75.0), basis);
  EXPECT_LT(z.data().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Project, IdentityBasisIsExact) {
  Vector ev(5);
  ev << 5, 4, 3, 2, 1;
  const PcaBasis basis = PcaBasis::identity(5, ev);
  const Matrix f = random_matrix(5, 30, 4);
  const auto z = project(LatentSequence(f, 75.0), basis);
  EXPECT_EQ(z.data(), f);
  EXPECT_EQ(z.basis_id(), basis.id());
}

TEST(Project, DimensionMismatch) {
  const PcaBasis basis = random_basis(6, 3);
  EXPECT_THROW(project(LatentSequence(random_matrix(5, 10, 1), 75.0), basis), Error);
}

TEST(Unproject, ZeroGivesMean) {
  const PcaBasis basis = random_basis(6, 5);
  const auto f = unproject(ProjectedSequence(Matrix::Zero(6, 4), 75.0), basis);
  for (long t = 0; t < 4; ++t) EXPECT_LT((f.data().col(t) - basis.mean()).norm(), 1e-15);
}

TEST(Unproject, RejectsForeignBasis) {
  const PcaBasis a = random_basis(6, 5);
  const PcaBasis b = random_basis(6, 6);
  const auto z = project(LatentSequence(random_matrix(6, 10, 1), 75.0), a);
  EXPECT_THROW(unproject(z, b), Error);
}

// Property: round trip and isometry on random bases and sequences.
TEST(ProjectProperty, RoundTripAndIsometry) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const long n = 2 + static_cast<long>(rng() % 40);
    const long t = 1 + static_cast<long>(rng() % 100);
    const PcaBasis basis = random_basis(n, rng());
    const LatentSequence f(10.0 * random_matrix(n, t, rng()), 75.0);
    const auto z = project(f, basis);
    const auto back = unproject(z, basis);
    EXPECT_LT((back.data() - f.data()).cwiseAbs().maxCoeff(), 1e-9);
    for (long c = 0; c < t; ++c) {
      EXPECT_NEAR(z.data().col(c).norm(), (f.data().col(c) - basis.mean()).norm(), 1e-9);
    }
  }
}

TEST(PcaBasis, RejectsNonOrthonormal) {
  Vector ev(2);
  ev << 2, 1;
  Matrix u(2, 2);
  u << 1, 0.1,
       0, 1;
  EXPECT_THROW(PcaBasis(Vector::Zero(2), u, ev), Error);
}

TEST(PcaBasis, RejectsUnsortedOrNonPositiveEigenvalues) {
  Vector up(2), zero(2);
  up << 1, 2;
  zero << 1, 0;
  EXPECT_THROW(PcaBasis::identity(2, up), Error);
  EXPECT_THROW(PcaBasis::identity(2, zero), Error);
}

TEST(PcaBasis, TiedEigenvaluesAccepted) {
  Vector ev(3);
  ev << 2, 1, 1;
  EXPECT_NO_THROW(PcaBasis::identity(3, ev));
}

TEST(LatentSequence, Invariants) {
  EXPECT_THROW(LatentSequence(Matrix::Zero(1, 5), 75.0), Error);
  EXPECT_THROW(LatentSequence(Matrix::Zero(3, 0), 75.0), Error);
  EXPECT_THROW(LatentSequence(Matrix::Zero(3, 5), 0.0), Error);
  Matrix bad = Matrix::Zero(3, 5);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(LatentSequence(bad, 75.0), Error);
}

}  // namespace
}  // namespace lss
