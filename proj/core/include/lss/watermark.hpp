#pragma once

#include <span>
#include <string>
#include <vector>

#include "lss/latent.hpp"
#include "lss/schedule.hpp"

namespace lss {

// Half-open frame interval [begin, end).
struct FrameRange {
  long begin = 0;
  long end = 0;
  long size() const noexcept { return end - begin; }
};

struct PlaneRotation {
  FrameRange frames;
  Plane plane;
  double angle = 0.0;  // beta * chi * theta
};

/// Every rotation a schedule implies, in (chunk, plane slot, subchunk) order.
std::vector<PlaneRotation> plan_rotations(const WatermarkSchedule& schedule);

/// Rotates the (i, j) coordinate pair of every frame in `frames` by R(angle):
///   z_i' = cos * z_i - sin * z_j,   z_j' = sin * z_i + cos * z_j.
void rotate_plane_inplace(Matrix& z, Plane plane, double angle, FrameRange frames);
ProjectedSequence rotate_plane(const ProjectedSequence& z, Plane plane, double angle, FrameRange frames);

/// Applies all scheduled rotations. Frames past the last full chunk are
/// left as they are.
ProjectedSequence embed(const ProjectedSequence& z, const WatermarkSchedule& schedule);

struct DetectionTerm {
  int chunk = 0;
  int plane_slot = 0;
  int subchunk = 0;
  Plane plane;
  int bit = 0;
  int chip = 0;
  double covariance = 0.0;    // normalized local covariance C
  double contribution = 0.0;  // bit * chip * C
};

struct DetectionReport {
  double score = 0.0;
  double threshold = 0.0;
  bool decision = false;
  std::vector<DetectionTerm> terms;

  long num_terms() const noexcept { return static_cast<long>(terms.size()); }
  double normalized_score() const noexcept { return terms.empty() ? 0.0 : score / static_cast<double>(terms.size()); }
};

/// Signed covariance detector. Each subchunk term is the covariance of the
/// plane's two coordinates about their subchunk means, scaled by
/// 1 / (|subchunk| * sqrt(lambda_i * lambda_j)); the score is the sum of
/// bit * chip * term over all terms. decision = score > threshold.
DetectionReport detect(const ProjectedSequence& z, const WatermarkSchedule& schedule,
                       const Vector& eigenvalues, double threshold);

// Score only; no per-term bookkeeping.
double detection_score(const ProjectedSequence& z, const WatermarkSchedule& schedule, const Vector& eigenvalues);

/// Smallest null score whose rank reaches the (1 - target_fpr) quantile.
/// Needs at least 100 null scores.
double calibrate_threshold(std::span<const double> null_scores, double target_fpr);

inline constexpr std::size_t kMinCalibrationScores = 100;
inline constexpr double kDefaultFalsePositiveRate = 0.01;

/// Threshold at `target_fpr` for unwatermarked frames that are iid
/// Gaussian in the basis they were projected with:
///   S ~ N(0, num_terms * (L - 1) / L^2),  L = subchunk_frames.
double default_threshold(long num_terms, int subchunk_frames, double target_fpr = kDefaultFalsePositiveRate);
double default_threshold(const WatermarkSchedule& schedule, double target_fpr = kDefaultFalsePositiveRate);

/// {"score", "normalized_score", "threshold", "decision", "num_terms", "terms"?}
std::string to_json(const DetectionReport& report, bool include_terms = false);

}  // namespace lss
