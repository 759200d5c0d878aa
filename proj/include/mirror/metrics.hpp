#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <mirror/error.hpp>
#include <mirror/shape.hpp>

// Mirror error, alignment error, PCK, per-point statistics and correlation.
//
// The mirror error compares a detection on an image with the back-transformed
// detection on its horizontal mirror; it needs no ground truth. The alignment
// error is the usual normalized mean distance to ground truth.

namespace mirror {

/// One sample's detections plus (optionally) ground truth and the errors
/// computed from them.
struct SampleRecord {
  std::string sample_id;
  Shape det_original;
  Shape det_mirror;               ///< detection on the flipped image, in its frame
  std::optional<Shape> ground_truth;
  ImageMeta meta;

  std::optional<double> e_m;        ///< mirror error
  std::optional<double> e_a;        ///< alignment error, original image
  std::optional<double> e_a_mirror; ///< alignment error, mirror image
};

/// Mean normalized distance between the original-image detection and the
/// back-transform of the mirror-image detection:
///   e_m = (1/K) sum_k |x_k - back_k| / s,   s computed on det_original.
inline double mirror_error(const Shape& det_original, const Shape& det_mirror,
                           const ImageMeta& meta, const SymmetryMap& map,
                           const NormalizationSpec& norm) {
  if (det_original.k() != det_mirror.k())
    raise(Errc::LengthMismatch,
          "detections disagree on K: " + std::to_string(det_original.k()) +
              " vs " + std::to_string(det_mirror.k()));
  const Shape back = mirror_shape(det_mirror, meta, map);
  const double s = normalization_size(det_original, norm);
  double sum = 0.0;
  for (std::size_t k = 0; k < det_original.k(); ++k)
    sum += distance(det_original.points[k], back.points[k]);
  return sum / (static_cast<double>(det_original.k()) * s);
}

/// Mean normalized distance to ground truth:
///   e_a = (1/K) sum_k |x_k - gt_k| / s,   s computed on gt.
inline double alignment_error(const Shape& det, const Shape& gt,
                              const NormalizationSpec& norm) {
  if (det.k() != gt.k())
    raise(Errc::LengthMismatch,
          "detection K=" + std::to_string(det.k()) + " vs ground truth K=" +
              std::to_string(gt.k()));
  if (det.points.empty()) raise(Errc::EmptyShape, "alignment of empty shapes");
  const double s = normalization_size(gt, norm);
  double sum = 0.0;
  for (std::size_t k = 0; k < det.k(); ++k)
    sum += distance(det.points[k], gt.points[k]);
  return sum / (static_cast<double>(det.k()) * s);
}

/// A sample dropped by batch evaluation, with the reason.
struct SkippedSample {
  std::string sample_id;
  Errc code = Errc::IoError;
  std::string message;
};

struct EvaluationResult {
  std::vector<SampleRecord> records;  ///< successfully evaluated, input order
  std::vector<SkippedSample> skipped;
};

/// Fill e_m (always) and e_a / e_a_mirror (when ground truth is present) for
/// every record. A failing sample is reported in `skipped` instead of
/// aborting the batch; output order follows input order.
inline EvaluationResult evaluate_records(std::vector<SampleRecord> records,
                                         const SymmetryMap& map,
                                         const NormalizationSpec& norm) {
  EvaluationResult out;
  out.records.reserve(records.size());
  for (SampleRecord& rec : records) {
    try {
      rec.e_m = mirror_error(rec.det_original, rec.det_mirror, rec.meta, map,
                             norm);
      if (rec.ground_truth) {
        rec.e_a = alignment_error(rec.det_original, *rec.ground_truth, norm);
        const Shape gt_mirror = mirror_shape(*rec.ground_truth, rec.meta, map);
        rec.e_a_mirror = alignment_error(rec.det_mirror, gt_mirror, norm);
      }
      out.records.push_back(std::move(rec));
    } catch (const Error& e) {
      out.skipped.push_back({rec.sample_id, e.code(), e.what()});
    }
  }
  return out;
}

/// Per-landmark summary of the normalized errors across a dataset.
/// Standard deviation is the population convention (divide by n).
struct PerPointStats {
  std::vector<double> mirror_mean;  ///< length K
  std::vector<double> mirror_std;   ///< length K
  std::vector<double> align_mean;   ///< length K; empty when no ground truth
  std::size_t n_mirror = 0;
  std::size_t n_align = 0;
};

inline PerPointStats per_point_stats(const std::vector<SampleRecord>& records,
                                     const SymmetryMap& map,
                                     const NormalizationSpec& norm) {
  if (records.size() < 2)
    raise(Errc::InsufficientData,
          "per-point statistics need at least 2 records, got " +
              std::to_string(records.size()));
  const std::size_t k_count = records.front().det_original.k();
  std::vector<std::vector<double>> mirror_vals(k_count);
  std::vector<double> align_sum(k_count, 0.0);
  std::size_t n_align = 0;

  for (const SampleRecord& rec : records) {
    if (rec.det_original.k() != k_count)
      raise(Errc::LengthMismatch,
            "record " + rec.sample_id + " has K=" +
                std::to_string(rec.det_original.k()) + ", expected " +
                std::to_string(k_count));
    const Shape back = mirror_shape(rec.det_mirror, rec.meta, map);
    const double s = normalization_size(rec.det_original, norm);
    for (std::size_t k = 0; k < k_count; ++k)
      mirror_vals[k].push_back(
          distance(rec.det_original.points[k], back.points[k]) / s);
    if (rec.ground_truth) {
      const double sg = normalization_size(*rec.ground_truth, norm);
      for (std::size_t k = 0; k < k_count; ++k)
        align_sum[k] +=
            distance(rec.det_original.points[k], rec.ground_truth->points[k]) /
            sg;
      ++n_align;
    }
  }

  PerPointStats stats;
  stats.n_mirror = records.size();
  stats.n_align = n_align;
  stats.mirror_mean.resize(k_count);
  stats.mirror_std.resize(k_count);
  const double n = static_cast<double>(records.size());
  for (std::size_t k = 0; k < k_count; ++k) {
    double sum = 0.0;
    for (double v : mirror_vals[k]) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : mirror_vals[k]) ss += (v - mean) * (v - mean);
    stats.mirror_mean[k] = mean;
    stats.mirror_std[k] = std::sqrt(ss / n);
  }
  if (n_align > 0) {
    stats.align_mean.resize(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
      stats.align_mean[k] = align_sum[k] / static_cast<double>(n_align);
  }
  return stats;
}

/// Percentage of correct keypoints: point k of a sample counts as correct iff
/// its distance to ground truth is <= alpha * max side of the ground-truth
/// tight box.
struct PckResult {
  std::vector<double> per_point;  ///< fraction correct per landmark
  double average = 0.0;           ///< mean over landmarks
  std::size_t n_samples = 0;
};

inline PckResult pck(const std::vector<Shape>& dets,
                     const std::vector<Shape>& gts, double alpha) {
  if (dets.size() != gts.size())
    raise(Errc::LengthMismatch,
          "pck got " + std::to_string(dets.size()) + " detections vs " +
              std::to_string(gts.size()) + " ground truths");
  if (dets.empty())
    raise(Errc::InsufficientData, "pck needs at least one sample");
  if (alpha < 0.0) raise(Errc::BadConfig, "pck alpha must be >= 0");
  const std::size_t k_count = gts.front().k();
  std::vector<std::size_t> correct(k_count, 0);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].k() != k_count || gts[i].k() != k_count)
      raise(Errc::LengthMismatch,
            "pck sample " + std::to_string(i) + " has mismatched K");
    const double s = bounding_box(gts[i]).max_side();
    if (!(s > 0.0))
      raise(Errc::ZeroSize,
            "pck sample " + std::to_string(i) + " has a degenerate gt box");
    for (std::size_t k = 0; k < k_count; ++k) {
      if (distance(dets[i].points[k], gts[i].points[k]) <= alpha * s)
        ++correct[k];
    }
  }
  PckResult result;
  result.n_samples = dets.size();
  result.per_point.resize(k_count);
  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    result.per_point[k] =
        static_cast<double>(correct[k]) / static_cast<double>(dets.size());
    total += result.per_point[k];
  }
  result.average = total / static_cast<double>(k_count);
  return result;
}

/// Pearson product-moment correlation coefficient.
inline double pearson(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    raise(Errc::LengthMismatch,
          "pearson got " + std::to_string(xs.size()) + " vs " +
              std::to_string(ys.size()) + " values");
  const std::size_t n = xs.size();
  if (n < 2) raise(Errc::ConstantInput, "pearson needs n >= 2");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) raise(Errc::ConstantInput, "first input is constant");
  if (!(syy > 0.0)) raise(Errc::ConstantInput, "second input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman rank correlation: Pearson over average-ranked values.
inline double spearman(const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    raise(Errc::LengthMismatch,
          "spearman got " + std::to_string(xs.size()) + " vs " +
              std::to_string(ys.size()) + " values");
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  return pearson(ranks(xs), ranks(ys));
}

/// Rows of the alignment-vs-mirror error curve: samples sorted by alignment
/// error ascending (ties by sample_id), each paired with its mirror error.
struct CurveRow {
  std::size_t rank = 0;  ///< 1-based
  std::string sample_id;
  double e_a = 0.0;
  double e_m = 0.0;
};

inline std::vector<CurveRow> sorted_error_curve(
    const std::vector<SampleRecord>& records) {
  std::vector<CurveRow> rows;
  rows.reserve(records.size());
  for (const SampleRecord& rec : records) {
    if (!rec.e_a || !rec.e_m)
      raise(Errc::MissingError,
            "record " + rec.sample_id + " lacks e_a or e_m");
    rows.push_back({0, rec.sample_id, *rec.e_a, *rec.e_m});
  }
  std::sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
    if (a.e_a != b.e_a) return a.e_a < b.e_a;
    return a.sample_id < b.sample_id;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
  return rows;
}

}  // namespace mirror
