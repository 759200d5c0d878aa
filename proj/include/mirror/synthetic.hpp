#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <mirror/error.hpp>
#include <mirror/rng.hpp>
#include <mirror/shape.hpp>
#include <mirror/shape_model.hpp>

// Synthetic stand-ins for images and detectors.
//
// A Scene is a probe-able scalar field with one channel per landmark: a bump
// at the true landmark plus difficulty-scaled distractor bumps that create
// false basins of attraction. A simulated detector perturbs the ground truth
// with difficulty-driven noise so that error statistics can be studied in
// closed form. Everything is deterministic given the seeds.

namespace mirror {

struct Bump {
  Vec2 center;
  double amplitude = 1.0;
  double width = 1.0;  ///< Gaussian sigma, image units
};

/// Immutable per-landmark bump lists; shared between a scene and its mirror.
struct SceneField {
  std::vector<std::vector<Bump>> channels;  ///< one list per landmark
  double image_width = 0.0;
};

struct SceneConfig {
  double width = 256.0;
  double height = 256.0;
  double object_frac_min = 0.25;   ///< object size / min canvas side
  double object_frac_max = 0.40;
  double placement_rotation = 0.1; ///< radians, +-
  double margin_frac = 0.05;       ///< keep-inside margin / min canvas side
  double bump_width_frac = 0.1;    ///< bump sigma / object size
  double distractors_per_difficulty = 10.0;
  double distractor_amp_min = 0.8;
  double distractor_amp_max = 1.2;
  double distractor_radius_min = 0.25;  ///< offset / object size
  double distractor_radius_max = 0.5;
  double box_shift_frac = 0.1;         ///< detection-box shift / box size
  double coefficient_clamp = 2.5;
};

/// A synthetic sample: ground truth embedded in a probe-able field, plus the
/// (noisy) detection box a face/person detector would supply. `mirrored`
/// selects the horizontally flipped view of the same immutable field.
struct Scene {
  Shape ground_truth;
  ImageMeta meta;
  BoundingBox detection_box;
  double difficulty = 0.0;
  SymmetryMap symmetry;
  std::shared_ptr<const SceneField> field;
  bool mirrored = false;

  /// Field value at point p on the given landmark channel. Defined (and
  /// finite) everywhere; probes outside the canvas are legal.
  double probe(Vec2 p, std::size_t channel) const {
    std::size_t ch = channel;
    if (mirrored) {
      p.x = field->image_width - p.x;
      ch = symmetry[channel];
    }
    double value = 0.0;
    for (const Bump& b : field->channels[ch]) {
      const double dx = p.x - b.center.x;
      const double dy = p.y - b.center.y;
      value += b.amplitude *
               std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
    }
    return value;
  }
};

/// The same scene viewed in a mirror: probe'(x, y, k) = probe(W - x, y, pi(k)).
/// Exact coordinate reflection — no resampling, so applying it twice gives a
/// scene with bit-identical probes.
inline Scene mirror_scene(const Scene& scene) {
  Scene out = scene;
  out.ground_truth = mirror_shape(scene.ground_truth, scene.meta, scene.symmetry);
  out.detection_box.x_min = scene.meta.width - scene.detection_box.x_max;
  out.detection_box.x_max = scene.meta.width - scene.detection_box.x_min;
  out.mirrored = !scene.mirrored;
  return out;
}

namespace detail {

inline Shape rotate_about(const Shape& shape, Vec2 center, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Shape out;
  out.points.reserve(shape.k());
  for (const Vec2& p : shape.points) {
    const Vec2 d = p - center;
    out.points.push_back({center.x + c * d.x - s * d.y,
                          center.y + s * d.x + c * d.y});
  }
  return out;
}

}  // namespace detail

/// Build a scene: draw a shape from the model, place it with a random
/// similarity transform inside the canvas (margin >= margin_frac of the
/// smaller side by construction), attach one bump channel per landmark with
/// round(distractors_per_difficulty * difficulty) distractor bumps, and
/// shift the detection box by up to box_shift_frac of its size.
inline Scene generate_scene(const ShapeModel& model, const SymmetryMap& map,
                            const SceneConfig& config, double difficulty,
                            std::uint64_t seed,
                            const std::string& sample_id) {
  if (!(config.width > 0.0) || !(config.height > 0.0))
    raise(Errc::BadConfig, "scene canvas must have positive dimensions");
  if (model.k() != map.k())
    raise(Errc::LengthMismatch, "shape model K=" + std::to_string(model.k()) +
                                    " vs symmetry map K=" +
                                    std::to_string(map.k()));

  Rng rng(derive_key(seed, "scene", 0, sample_id));

  // 1. Shape in the canonical frame.
  Shape canon = sample_shape(model, rng, config.coefficient_clamp);

  // 2. Random similarity placement.
  const double angle = rng.uniform(-config.placement_rotation,
                                   config.placement_rotation);
  canon = detail::rotate_about(canon, bounding_box(canon).center(), angle);
  const double min_side = std::min(config.width, config.height);
  const double object_size =
      rng.uniform(config.object_frac_min, config.object_frac_max) * min_side;
  const BoundingBox canon_box = bounding_box(canon);
  const double canon_size = canon_box.max_side();
  if (!(canon_size > 0.0))
    raise(Errc::DegenerateShapes, "sampled shape has a zero-size box");
  const double scale = object_size / canon_size;

  const double margin = config.margin_frac * min_side;
  const double half_w = canon_box.width() * scale / 2.0;
  const double half_h = canon_box.height() * scale / 2.0;
  if (margin + half_w > config.width - margin - half_w ||
      margin + half_h > config.height - margin - half_h)
    raise(Errc::BadConfig, "object does not fit inside the canvas margins");
  const double cx = rng.uniform(margin + half_w, config.width - margin - half_w);
  const double cy = rng.uniform(margin + half_h, config.height - margin - half_h);

  Scene scene;
  scene.ground_truth.points.reserve(canon.k());
  const Vec2 canon_center = canon_box.center();
  for (const Vec2& p : canon.points)
    scene.ground_truth.points.push_back(
        {cx + (p.x - canon_center.x) * scale,
         cy + (p.y - canon_center.y) * scale});

  scene.meta = {sample_id, config.width, config.height};
  scene.difficulty = difficulty;
  scene.symmetry = map;

  // 3. Detection box: the gt tight box shifted by up to box_shift_frac of
  // its size. The size itself is preserved so that detector-noise scales
  // derived from it stay decoupled from the box draw.
  const BoundingBox gt_box = bounding_box(scene.ground_truth);
  const double box_size = gt_box.max_side();
  const double sx = rng.uniform(-config.box_shift_frac, config.box_shift_frac) * box_size;
  const double sy = rng.uniform(-config.box_shift_frac, config.box_shift_frac) * box_size;
  scene.detection_box = {gt_box.x_min + sx, gt_box.y_min + sy,
                         gt_box.x_max + sx, gt_box.y_max + sy};

  // 4. Field: one channel per landmark. Each channel gets a unit bump at the
  // true landmark plus difficulty-many distractor bumps at independent random
  // offsets, some stronger than the true bump. False basins are local and
  // incoherent across landmarks, so whether a cascade run escapes them
  // depends mostly on where it was initialized.
  auto field = std::make_shared<SceneField>();
  field->image_width = config.width;
  field->channels.resize(canon.k());
  const double bump_width = config.bump_width_frac * box_size;
  const long n_distractors =
      std::lround(config.distractors_per_difficulty * difficulty);
  for (std::size_t k = 0; k < canon.k(); ++k) {
    field->channels[k].push_back(
        {scene.ground_truth.points[k], 1.0, bump_width});
    for (long j = 0; j < n_distractors; ++j) {
      const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double radius = rng.uniform(config.distractor_radius_min,
                                        config.distractor_radius_max) * box_size;
      const double amp = rng.uniform(config.distractor_amp_min,
                                     config.distractor_amp_max);
      field->channels[k].push_back(
          {scene.ground_truth.points[k] +
               Vec2{radius * std::cos(theta), radius * std::sin(theta)},
           amp, bump_width});
    }
  }
  scene.field = std::move(field);
  return scene;
}

/// Controlled model of detector error: per-landmark isotropic Gaussian noise
/// of scale (sigma0 + sigma1 * difficulty) * detection-box size, plus rare
/// large outlier displacements.
struct SimDetectorConfig {
  double sigma0 = 0.01;       ///< base noise, normalized units
  double sigma1 = 0.0;        ///< difficulty gain
  double outlier_rate = 0.0;  ///< per-landmark probability of a 0.5*s jump
  std::uint64_t seed = 0;
};

struct DetectionPair {
  Shape det_original;
  Shape det_mirror;  ///< in the mirror image's frame
};

/// Simulate a detector run on the scene and on its mirror. The original
/// detection is gt + noise; the mirror detection is the mirrored original
/// plus an independent draw at scale sqrt(2) * sigma * s, so the expected
/// mirror error matches two independent equal-sigma detections while the
/// sample's alignment and mirror errors stay driven only by the shared
/// difficulty.
inline DetectionPair simulate_detector(const Scene& scene,
                                       const SimDetectorConfig& config) {
  const double box_size = scene.detection_box.max_side();
  if (!(box_size > 0.0))
    raise(Errc::ZeroSize, "scene detection box has no size");
  const double sigma =
      (config.sigma0 + config.sigma1 * scene.difficulty) * box_size;

  auto perturb = [&config](Shape shape, Rng& rng, double scale,
                           double outlier_step) {
    for (Vec2& p : shape.points) {
      p.x += rng.normal() * scale;
      p.y += rng.normal() * scale;
      if (config.outlier_rate > 0.0 && rng.uniform() < config.outlier_rate) {
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        p.x += outlier_step * std::cos(theta);
        p.y += outlier_step * std::sin(theta);
      }
    }
    return shape;
  };

  DetectionPair pair;
  Rng rng_original(
      derive_key(config.seed, "detector", 0, scene.meta.sample_id));
  pair.det_original = perturb(scene.ground_truth, rng_original, sigma,
                              0.5 * box_size);

  // Fresh noise on the mirror side, on top of the mirrored original
  // detection; sqrt(2) * sigma is the scale of the difference of two
  // independent sigma draws, keeping the mirror-error magnitude identical to
  // a detector run independently on the flipped image.
  Rng rng_mirror(
      derive_key(config.seed, "detector-mirror", 0, scene.meta.sample_id));
  pair.det_mirror = perturb(
      mirror_shape(pair.det_original, scene.meta, scene.symmetry), rng_mirror,
      std::numbers::sqrt2 * sigma, 0.5 * box_size);
  return pair;
}

/// Analytic expectation of the per-point normalized alignment error for the
/// pure-Gaussian detector: E|N(0, sigma^2 I_2)| = sigma * sqrt(pi/2).
inline double expected_alignment_error(const SimDetectorConfig& config,
                                       double difficulty) {
  if (config.outlier_rate != 0.0)
    raise(Errc::OutlierUnsupported,
          "analytic error oracle requires outlier_rate = 0");
  return (config.sigma0 + config.sigma1 * difficulty) *
         std::sqrt(std::numbers::pi / 2.0);
}

/// Analytic expectation of the mirror error for the same detector: the two
/// detections differ by an independent sqrt(2)*sigma draw.
inline double expected_mirror_error(const SimDetectorConfig& config,
                                    double difficulty) {
  return std::numbers::sqrt2 * expected_alignment_error(config, difficulty);
}

}  // namespace mirror
