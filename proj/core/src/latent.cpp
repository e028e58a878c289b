#include "lss/latent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lss/error.hpp"
#include "lss/formats.hpp"

namespace lss {

LatentSequence::LatentSequence(Matrix data, double frame_rate_hz, std::size_t trailing_samples)
    : data_(std::move(data)), frame_rate_hz_(frame_rate_hz), trailing_samples_(trailing_samples) {
  require(data_.rows() >= 2, ErrorKind::kDimension, "latent dimension must be at least 2");
  require(data_.cols() >= 1, ErrorKind::kDimension, "latent sequence needs at least one frame");
  require(frame_rate_hz_ > 0.0 && std::isfinite(frame_rate_hz_), ErrorKind::kInvalidArgument,
          "frame rate must be positive");
  require(data_.allFinite(), ErrorKind::kInvalidArgument, "latent data contains non-finite values");
}

PcaBasis::PcaBasis(Vector mean, Matrix components, Vector eigenvalues)
    : mean_(std::move(mean)), components_(std::move(components)), eigenvalues_(std::move(eigenvalues)) {
  const Eigen::Index n = mean_.size();
  require(n >= 2, ErrorKind::kDimension, "basis dimension must be at least 2");
  require(components_.rows() == n && components_.cols() == n && eigenvalues_.size() == n,
          ErrorKind::kDimension, "basis mean, components and eigenvalues disagree on dimension");
  require(mean_.allFinite() && components_.allFinite() && eigenvalues_.allFinite(),
          ErrorKind::kInvalidArgument, "basis contains non-finite values");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(eigenvalues_(i) > 0.0, ErrorKind::kNumerical, "basis eigenvalues must be positive");
    require(i == 0 || eigenvalues_(i) <= eigenvalues_(i - 1), ErrorKind::kInvalidArgument,
            "basis eigenvalues must be sorted non-increasing");
  }
  const double deviation =
      (components_.transpose() * components_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  require(deviation <= 1e-9, ErrorKind::kNumerical,
          "basis components are not orthonormal (max |U'U - I| = " + std::to_string(deviation) + ")");
  id_ = to_hex(sha256(serialize_basis(*this)));
}

PcaBasis PcaBasis::identity(Eigen::Index n, const Vector& eigenvalues) {
  return PcaBasis(Vector::Zero(n), Matrix::Identity(n, n), eigenvalues);
}

ProjectedSequence::ProjectedSequence(Matrix data, double frame_rate_hz, std::string basis_id)
    : data_(std::move(data)), frame_rate_hz_(frame_rate_hz), basis_id_(std::move(basis_id)) {
  require(data_.rows() >= 2 && data_.cols() >= 1, ErrorKind::kDimension,
          "projected sequence needs n >= 2 rows and at least one frame");
  require(frame_rate_hz_ > 0.0, ErrorKind::kInvalidArgument, "frame rate must be positive");
}

void PcaAccumulator::add(const LatentSequence& sequence) {
  const Matrix& x = sequence.data();
  if (count_ == 0) {
    mean_ = Vector::Zero(x.rows());
    scatter_ = Matrix::Zero(x.rows(), x.rows());
  }
  require(x.rows() == mean_.size(), ErrorKind::kDimension,
          "corpus sequences disagree on latent dimension (" + std::to_string(x.rows()) + " vs " +
              std::to_string(mean_.size()) + ")");

  const auto frames = static_cast<long long>(x.cols());
  const Vector local_mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - local_mean;
  Matrix local_scatter = Matrix::Zero(x.rows(), x.rows());
  local_scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  local_scatter = local_scatter.selfadjointView<Eigen::Lower>();

  const auto total = count_ + frames;
  const Vector delta = local_mean - mean_;
  const double weight = static_cast<double>(count_) * static_cast<double>(frames) / static_cast<double>(total);
  scatter_ += local_scatter + weight * delta * delta.transpose();
  mean_ += delta * (static_cast<double>(frames) / static_cast<double>(total));
  count_ = total;
}

Matrix PcaAccumulator::covariance() const {
  require(count_ > 0, ErrorKind::kInvalidArgument, "no frames accumulated");
  return scatter_ / static_cast<double>(count_);
}

PcaBasis PcaAccumulator::finish() const {
  require(count_ > 0, ErrorKind::kInvalidArgument, "empty corpus");
  const Eigen::Index n = mean_.size();
  require(count_ >= n + 1, ErrorKind::kNumerical,
          "corpus has " + std::to_string(count_) + " frames, need at least n+1 = " +
              std::to_string(n + 1));

  const Matrix sigma = covariance();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma);
  require(solver.info() == Eigen::Success, ErrorKind::kNumerical, "eigendecomposition did not converge");

  // Eigen returns ascending order; a stable sort on descending value keeps
  // exact ties in solver order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& values = solver.eigenvalues();
  std::reverse(order.begin(), order.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  Vector eigenvalues(n);
  Matrix components(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    eigenvalues(k) = values(src);
    Vector column = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    column.cwiseAbs().maxCoeff(&pivot);
    if (column(pivot) < 0.0) column = -column;
    components.col(k) = column;
  }

  const double largest = eigenvalues(0);
  require(largest > 0.0, ErrorKind::kNumerical, "corpus covariance is zero");
  require(eigenvalues(n - 1) > kMinRelativeEigenvalue * largest, ErrorKind::kNumerical,
          "corpus covariance is rank deficient (smallest eigenvalue " +
              std::to_string(eigenvalues(n - 1)) + ", largest " + std::to_string(largest) + ")");

  const double sigma_norm = sigma.norm();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double residual = (sigma * components.col(k) - eigenvalues(k) * components.col(k)).norm();
    require(residual <= 1e-8 * sigma_norm, ErrorKind::kNumerical,
            "eigenpair residual check failed for component " + std::to_string(k));
  }

  return PcaBasis(mean_, std::move(components), std::move(eigenvalues));
}

PcaBasis fit_pca(std::span<const LatentSequence> corpus) {
  PcaAccumulator acc;
  for (const auto& f : corpus) acc.add(f);
  return acc.finish();
}

ProjectedSequence project(const LatentSequence& f, const PcaBasis& basis) {
  require(f.dim() == basis.dim(), ErrorKind::kDimension,
          "latent dimension " + std::to_string(f.dim()) + " does not match basis dimension " +
              std::to_string(basis.dim()));
  Matrix z = basis.components().transpose() * (f.data().colwise() - basis.mean());
  return ProjectedSequence(std::move(z), f.frame_rate_hz(), basis.id());
}

LatentSequence unproject(const ProjectedSequence& z, const PcaBasis& basis) {
  require(z.dim() == basis.dim(), ErrorKind::kDimension,
          "projected dimension " + std::to_string(z.dim()) + " does not match basis dimension " +
              std::to_string(basis.dim()));
  require(z.basis_id().empty() || z.basis_id() == basis.id(), ErrorKind::kDimension,
          "projected sequence was produced with a different basis");
  Matrix f = (basis.components() * z.data()).colwise() + basis.mean();
  return LatentSequence(std::move(f), z.frame_rate_hz());
}

}  // namespace lss
