#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Core>

namespace lss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Continuous latent features of one utterance: `dim()` rows by `frames()` columns.
class LatentSequence {
 public:
  LatentSequence(Matrix data, double frame_rate_hz, std::size_t trailing_samples = 0);

  const Matrix& data() const noexcept { return data_; }
  Eigen::Index dim() const noexcept { return data_.rows(); }
  Eigen::Index frames() const noexcept { return data_.cols(); }
  double frame_rate_hz() const noexcept { return frame_rate_hz_; }

  // Waveform samples the encoder could not fit into a whole frame.
  std::size_t trailing_samples() const noexcept { return trailing_samples_; }

 private:
  Matrix data_;
  double frame_rate_hz_;
  std::size_t trailing_samples_;
};

/// Corpus mean, orthonormal principal directions (columns) and their
/// eigenvalues in non-increasing order.
class PcaBasis {
 public:
  PcaBasis(Vector mean, Matrix components, Vector eigenvalues);

  const Vector& mean() const noexcept { return mean_; }
  const Matrix& components() const noexcept { return components_; }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  Eigen::Index dim() const noexcept { return mean_.size(); }

  // Hex SHA-256 of the LSSB serialization.
  const std::string& id() const noexcept { return id_; }

  static PcaBasis identity(Eigen::Index n, const Vector& eigenvalues);

 private:
  Vector mean_;
  Matrix components_;
  Vector eigenvalues_;
  std::string id_;
};

/// Latent frames expressed in principal-component coordinates.
class ProjectedSequence {
 public:
  ProjectedSequence(Matrix data, double frame_rate_hz, std::string basis_id = {});

  const Matrix& data() const noexcept { return data_; }
  Matrix& mutable_data() noexcept { return data_; }
  Eigen::Index dim() const noexcept { return data_.rows(); }
  Eigen::Index frames() const noexcept { return data_.cols(); }
  double frame_rate_hz() const noexcept { return frame_rate_hz_; }
  const std::string& basis_id() const noexcept { return basis_id_; }

 private:
  Matrix data_;
  double frame_rate_hz_;
  std::string basis_id_;
};

// Eigenvalues below this fraction of the largest one reject the fit.
inline constexpr double kMinRelativeEigenvalue = 1e-12;

/// Streaming mean/covariance accumulator feeding the eigendecomposition.
/// Each added sequence is reduced with a two-pass mean/scatter and merged
/// into the running totals with the pairwise update, so the corpus is
/// visited once without the cancellation of a naive sum of squares.
class PcaAccumulator {
 public:
  PcaAccumulator() = default;

  void add(const LatentSequence& sequence);

  Eigen::Index dim() const noexcept { return mean_.size(); }
  long long frames() const noexcept { return count_; }

  // Population covariance of everything added so far.
  Matrix covariance() const;
  const Vector& mean() const noexcept { return mean_; }

  PcaBasis finish() const;

 private:
  long long count_ = 0;
  Vector mean_;
  Matrix scatter_;
};

PcaBasis fit_pca(std::span<const LatentSequence> corpus);

ProjectedSequence project(const LatentSequence& f, const PcaBasis& basis);
LatentSequence unproject(const ProjectedSequence& z, const PcaBasis& basis);

}  // namespace lss
