#include "lss/watermark.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "lss/error.hpp"

namespace lss {

namespace {

void check_schedule_fits(const ProjectedSequence& z, const WatermarkSchedule& schedule) {
  require(z.frames() == schedule.num_frames(), ErrorKind::kDimension,
          "schedule was derived for " + std::to_string(schedule.num_frames()) + " frames, sequence has " +
              std::to_string(z.frames()));
  schedule.params().validate(static_cast<long>(z.dim()));
}

FrameRange subchunk_range(const ScheduleParams& params, int c, int l) {
  const long begin = static_cast<long>(c) * params.chunk_frames + static_cast<long>(l) * params.subchunk_frames;
  return FrameRange{begin, begin + params.subchunk_frames};
}

double local_covariance(const Matrix& z, Plane plane, FrameRange frames) {
  const auto len = static_cast<Eigen::Index>(frames.size());
  const auto xi = z.row(plane.i).segment(frames.begin, len);
  const auto xj = z.row(plane.j).segment(frames.begin, len);
  const double mi = xi.mean();
  const double mj = xj.mean();
  return ((xi.array() - mi) * (xj.array() - mj)).sum();
}

}  // namespace

std::vector<PlaneRotation> plan_rotations(const WatermarkSchedule& schedule) {
  const ScheduleParams& params = schedule.params();
  std::vector<PlaneRotation> plan;
  plan.reserve(static_cast<std::size_t>(schedule.chunks()) * static_cast<std::size_t>(schedule.planes_per_chunk()) *
               static_cast<std::size_t>(schedule.subchunks()));
  for (int c = 0; c < schedule.chunks(); ++c) {
    for (int p = 0; p < schedule.planes_per_chunk(); ++p) {
      const Plane plane = schedule.plane(c, p);
      const int bit = schedule.bit(c, p);
      for (int l = 0; l < schedule.subchunks(); ++l) {
        plan.push_back(PlaneRotation{subchunk_range(params, c, l), plane,
                                     static_cast<double>(bit * schedule.chip(c, p, l)) * params.theta});
      }
    }
  }
  return plan;
}

void rotate_plane_inplace(Matrix& z, Plane plane, double angle, FrameRange frames) {
  // Messages are built only on failure; this runs once per subchunk.
  if (plane.i < 0 || plane.i >= plane.j || plane.j >= z.rows()) {
    fail(ErrorKind::kInvalidArgument, "plane (" + std::to_string(plane.i) + ", " + std::to_string(plane.j) +
                                          ") invalid for dimension " + std::to_string(z.rows()));
  }
  if (frames.begin < 0 || frames.begin > frames.end || frames.end > z.cols()) {
    fail(ErrorKind::kInvalidArgument,
         "frame range [" + std::to_string(frames.begin) + ", " + std::to_string(frames.end) + ") out of bounds");
  }
  if (angle == 0.0) return;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (long t = frames.begin; t < frames.end; ++t) {
    const double a = z(plane.i, t);
    const double b = z(plane.j, t);
    z(plane.i, t) = c * a - s * b;
    z(plane.j, t) = s * a + c * b;
  }
}

ProjectedSequence rotate_plane(const ProjectedSequence& z, Plane plane, double angle, FrameRange frames) {
  ProjectedSequence out = z;
  rotate_plane_inplace(out.mutable_data(), plane, angle, frames);
  return out;
}

ProjectedSequence embed(const ProjectedSequence& z, const WatermarkSchedule& schedule) {
  check_schedule_fits(z, schedule);
  ProjectedSequence out = z;
  for (const PlaneRotation& r : plan_rotations(schedule)) {
    rotate_plane_inplace(out.mutable_data(), r.plane, r.angle, r.frames);
  }
  return out;
}

DetectionReport detect(const ProjectedSequence& z, const WatermarkSchedule& schedule, const Vector& eigenvalues,
                       double threshold) {
  check_schedule_fits(z, schedule);
  require(eigenvalues.size() == z.dim(), ErrorKind::kDimension, "eigenvalue count does not match dimension");
  require((eigenvalues.array() > 0.0).all(), ErrorKind::kNumerical, "eigenvalues must be positive");

  const ScheduleParams& params = schedule.params();
  DetectionReport report;
  report.threshold = threshold;
  report.terms.reserve(static_cast<std::size_t>(schedule.chunks()) *
                       static_cast<std::size_t>(schedule.planes_per_chunk()) *
                       static_cast<std::size_t>(schedule.subchunks()));
  const double len = params.subchunk_frames;
  for (int c = 0; c < schedule.chunks(); ++c) {
    for (int p = 0; p < schedule.planes_per_chunk(); ++p) {
      const Plane plane = schedule.plane(c, p);
      const double scale = 1.0 / (len * std::sqrt(eigenvalues(plane.i) * eigenvalues(plane.j)));
      const int bit = schedule.bit(c, p);
      for (int l = 0; l < schedule.subchunks(); ++l) {
        DetectionTerm term;
        term.chunk = c;
        term.plane_slot = p;
        term.subchunk = l;
        term.plane = plane;
        term.bit = bit;
        term.chip = schedule.chip(c, p, l);
        term.covariance = scale * local_covariance(z.data(), plane, subchunk_range(params, c, l));
        term.contribution = static_cast<double>(term.bit * term.chip) * term.covariance;
        report.terms.push_back(term);
      }
    }
  }
  for (const auto& term : report.terms) report.score += term.contribution;
  report.decision = report.score > threshold;
  return report;
}

double detection_score(const ProjectedSequence& z, const WatermarkSchedule& schedule, const Vector& eigenvalues) {
  return detect(z, schedule, eigenvalues, 0.0).score;
}

double calibrate_threshold(std::span<const double> null_scores, double target_fpr) {
  require(null_scores.size() >= kMinCalibrationScores, ErrorKind::kInvalidArgument,
          "threshold calibration needs at least " + std::to_string(kMinCalibrationScores) + " null scores, got " +
              std::to_string(null_scores.size()));
  require(target_fpr > 0.0 && target_fpr < 1.0, ErrorKind::kInvalidArgument, "target FPR must lie in (0, 1)");
  std::vector<double> sorted(null_scores.begin(), null_scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double position = (1.0 - target_fpr) * static_cast<double>(sorted.size() - 1);
  auto index = static_cast<std::size_t>(std::ceil(position - 1e-9));
  index = std::min(index, sorted.size() - 1);
  return sorted[index];
}

double default_threshold(long num_terms, int subchunk_frames, double target_fpr) {
  require(num_terms > 0, ErrorKind::kInvalidArgument, "num_terms must be positive");
  require(subchunk_frames >= 2, ErrorKind::kInvalidArgument, "subchunk_frames must be at least 2");
  require(target_fpr > 0.0 && target_fpr < 1.0, ErrorKind::kInvalidArgument, "target FPR must lie in (0, 1)");
  const double len = subchunk_frames;
  const double sigma = std::sqrt(static_cast<double>(num_terms) * (len - 1.0) / (len * len));
  const boost::math::normal_distribution<double> null(0.0, sigma);
  return boost::math::quantile(boost::math::complement(null, target_fpr));
}

double default_threshold(const WatermarkSchedule& schedule, double target_fpr) {
  const long terms = static_cast<long>(schedule.chunks()) * schedule.planes_per_chunk() * schedule.subchunks();
  return default_threshold(terms, schedule.params().subchunk_frames, target_fpr);
}

std::string to_json(const DetectionReport& report, bool include_terms) {
  nlohmann::ordered_json j;
  j["score"] = report.score;
  j["normalized_score"] = report.normalized_score();
  j["threshold"] = report.threshold;
  j["decision"] = report.decision;
  j["num_terms"] = report.num_terms();
  if (include_terms) {
    auto terms = nlohmann::ordered_json::array();
    for (const auto& t : report.terms) {
      terms.push_back({{"chunk", t.chunk},
                       {"plane", t.plane_slot},
                       {"subchunk", t.subchunk},
                       {"i", t.plane.i},
                       {"j", t.plane.j},
                       {"bit", t.bit},
                       {"chip", t.chip},
                       {"covariance", t.covariance},
                       {"contribution", t.contribution}});
    }
    j["terms"] = std::move(terms);
  }
  return j.dump(2);
}

}  // namespace lss
