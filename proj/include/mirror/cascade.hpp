#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <mirror/error.hpp>
#include <mirror/metrics.hpp>
#include <mirror/rng.hpp>
#include <mirror/shape.hpp>
#include <mirror/shape_model.hpp>
#include <mirror/synthetic.hpp>

// Cascaded shape regression: T ridge-regularized linear stages over
// shape-indexed probe features, multi-initialization inference with
// coordinate-wise median aggregation, and the variance-based smart-restart
// baseline.

namespace mirror {

/// Probe offsets shared by every landmark, expressed in the shape's
/// normalized frame (unit = current shape's box max side).
struct ProbeLayout {
  std::vector<Vec2> offsets;

  std::size_t probes_per_landmark() const { return offsets.size(); }

  /// Default layout: the landmark itself plus `ring_count` probes on a ring.
  static ProbeLayout ring(std::size_t ring_count = 8, double radius = 0.15) {
    ProbeLayout layout;
    layout.offsets.push_back({0.0, 0.0});
    for (std::size_t j = 0; j < ring_count; ++j) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(j) /
                       static_cast<double>(ring_count);
      layout.offsets.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    return layout;
  }
};

/// One cascade stage: a linear map from the feature vector to a shape update
/// in the normalized frame.
struct CascadeStage {
  Eigen::MatrixXd weights;   ///< D x 2K
  Eigen::VectorXd intercept; ///< 2K
};

struct CascadeModel {
  ShapeModel shape_model;
  std::vector<CascadeStage> stages;
  ProbeLayout probe_layout;
  double ridge_lambda = 1.0;
  bool trained_with_mirror_augmentation = false;
  std::uint64_t train_seed = 0;

  std::size_t k() const { return shape_model.k(); }
  std::size_t n_stages() const { return stages.size(); }
  std::size_t feature_dim() const {
    return k() * probe_layout.probes_per_landmark();
  }
};

/// Random-initialization parameters: how many starts and how strongly each
/// perturbs the mean-shape placement inside the detection box.
struct InitConfig {
  std::size_t n_inits = 5;
  double translation_frac = 0.1;  ///< +- fraction of box size
  double scale_min = 0.9;
  double scale_max = 1.1;
  double rotation = 0.1;          ///< +- radians
  std::uint64_t seed = 0;
};

/// Sample the scene at every landmark's probe ring; one fixed-size vector.
/// Offsets are scaled by the current shape's box size, so the features are
/// invariant to where the shape sits in the image.
inline Eigen::VectorXd extract_features(const Scene& scene, const Shape& shape,
                                        const ProbeLayout& layout) {
  const std::size_t k_count = shape.k();
  const std::size_t per = layout.probes_per_landmark();
  const double size = std::max(bounding_box(shape).max_side(), 1e-12);
  Eigen::VectorXd features(k_count * per);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t j = 0; j < per; ++j) {
      const Vec2 p = shape.points[k] + layout.offsets[j] * size;
      features(k * per + j) = scene.probe(p, k);
    }
  }
  return features;
}

namespace detail {

/// One perturbed placement of the model's mean shape in the detection box.
/// Consumes exactly four uniforms: scale factor, rotation, x shift, y shift.
inline Shape draw_initialization(const ShapeModel& model,
                                 const BoundingBox& box, Rng& rng,
                                 const InitConfig& config) {
  const double scale_jitter = rng.uniform(config.scale_min, config.scale_max);
  const double angle = rng.uniform(-config.rotation, config.rotation);
  const double box_size = box.max_side();
  const double dx =
      rng.uniform(-config.translation_frac, config.translation_frac) * box_size;
  const double dy =
      rng.uniform(-config.translation_frac, config.translation_frac) * box_size;

  const BoundingBox mean_box = bounding_box(model.mean_shape);
  const double base_scale = box_size / mean_box.max_side();
  const Shape rotated =
      rotate_about(model.mean_shape, mean_box.center(), angle);
  const Vec2 target = box.center() + Vec2{dx, dy};
  Shape placed;
  placed.points.reserve(rotated.k());
  for (const Vec2& p : rotated.points)
    placed.points.push_back(target + (p - mean_box.center()) *
                                         (base_scale * scale_jitter));
  return placed;
}

inline std::vector<Shape> draw_initializations(const CascadeModel& model,
                                               const Scene& scene,
                                               const InitConfig& config,
                                               std::uint64_t round,
                                               const char* stream_tag) {
  Rng rng(derive_key(config.seed, stream_tag, round, scene.meta.sample_id));
  std::vector<Shape> inits;
  inits.reserve(config.n_inits);
  for (std::size_t i = 0; i < config.n_inits; ++i)
    inits.push_back(
        draw_initialization(model.shape_model, scene.detection_box, rng, config));
  return inits;
}

/// Apply stages [first, last) to the shape.
inline Shape run_stages(const CascadeModel& model, const Scene& scene,
                        Shape shape, std::size_t first, std::size_t last) {
  for (std::size_t t = first; t < last; ++t) {
    const Eigen::VectorXd features =
        extract_features(scene, shape, model.probe_layout);
    const CascadeStage& stage = model.stages[t];
    const Eigen::VectorXd update =
        stage.weights.transpose() * features + stage.intercept;
    const double size = std::max(bounding_box(shape).max_side(), 1e-12);
    for (std::size_t k = 0; k < shape.k(); ++k) {
      shape.points[k].x += size * update(2 * k);
      shape.points[k].y += size * update(2 * k + 1);
    }
  }
  return shape;
}

/// Coordinate-wise median over shapes (per landmark, per axis). Even counts
/// average the two middle values.
inline Shape coordinate_median(const std::vector<Shape>& shapes) {
  if (shapes.empty()) raise(Errc::EmptyShape, "median of zero shapes");
  const std::size_t k_count = shapes.front().k();
  Shape median;
  median.points.resize(k_count);
  std::vector<double> vals(shapes.size());
  auto median_of = [&vals]() {
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    return n % 2 == 1 ? vals[n / 2]
                      : (vals[n / 2 - 1] + vals[n / 2]) / 2.0;
  };
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < shapes.size(); ++i)
      vals[i] = shapes[i].points[k].x;
    median.points[k].x = median_of();
    for (std::size_t i = 0; i < shapes.size(); ++i)
      vals[i] = shapes[i].points[k].y;
    median.points[k].y = median_of();
  }
  return median;
}

/// Mean over landmarks of the per-landmark standard deviation of positions
/// across shapes, normalized by `size`. Zero when all shapes agree.
inline double normalized_spread(const std::vector<Shape>& shapes,
                                double size) {
  const std::size_t n = shapes.size();
  const std::size_t k_count = shapes.front().k();
  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    Vec2 mean{0.0, 0.0};
    for (const Shape& s : shapes) mean = mean + s.points[k];
    mean = mean * (1.0 / static_cast<double>(n));
    double ss = 0.0;
    for (const Shape& s : shapes) {
      const Vec2 d = s.points[k] - mean;
      ss += d.x * d.x + d.y * d.y;
    }
    total += std::sqrt(ss / static_cast<double>(n));
  }
  return total / (static_cast<double>(k_count) * size);
}

/// Ridge regression with intercept via centering:
///   W = (Xc'Xc + lambda I)^-1 Xc'Yc,  b = mean_y - W' mean_x.
/// lambda = 0 falls back to an exact solve and reports rank deficiency
/// instead of silently regularizing.
inline CascadeStage solve_ridge(const Eigen::MatrixXd& features,
                                const Eigen::MatrixXd& targets,
                                double lambda) {
  const Eigen::RowVectorXd mean_f = features.colwise().mean();
  const Eigen::RowVectorXd mean_t = targets.colwise().mean();
  const Eigen::MatrixXd fc = features.rowwise() - mean_f;
  const Eigen::MatrixXd tc = targets.rowwise() - mean_t;
  Eigen::MatrixXd gram = fc.transpose() * fc;
  gram.diagonal().array() += lambda;

  CascadeStage stage;
  if (lambda > 0.0) {
    stage.weights = gram.ldlt().solve(fc.transpose() * tc);
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible())
      raise(Errc::SingularSystem,
            "features are rank-deficient and lambda = 0; increase lambda or "
            "enrich the probe layout");
    stage.weights = lu.solve(fc.transpose() * tc);
  }
  stage.intercept =
      (mean_t - mean_f * stage.weights).transpose();
  return stage;
}

}  // namespace detail

struct TrainConfig {
  std::size_t stages = 10;
  double ridge_lambda = 1.0;
  std::size_t n_components = 6;
  ProbeLayout probe_layout = ProbeLayout::ring();
  InitConfig init;                ///< init.seed also seeds training draws
  bool augment_mirror = true;
};

struct TrainResult {
  CascadeModel model;
  /// Mean alignment error over all training rows: entry 0 before any stage,
  /// entry t after stage t.
  std::vector<double> stage_errors;
};

/// Train the cascade on synthetic scenes (each carries its ground truth).
/// With augment_mirror, every scene is duplicated as its mirror view, which
/// both doubles the data and makes the learned stages statistically
/// symmetric. Deterministic given the config.
inline TrainResult train_cascade(const std::vector<Scene>& scenes,
                                 const TrainConfig& config) {
  if (scenes.size() < 10)
    raise(Errc::InsufficientData, "cascade training needs >= 10 scenes, got " +
                                      std::to_string(scenes.size()));
  const std::size_t k_count = scenes.front().ground_truth.k();
  for (const Scene& s : scenes) {
    if (s.ground_truth.k() != k_count)
      raise(Errc::LengthMismatch, "training scenes disagree on K");
  }
  if (config.stages == 0) raise(Errc::BadConfig, "cascade needs >= 1 stage");

  std::vector<Scene> data = scenes;
  if (config.augment_mirror) {
    data.reserve(2 * scenes.size());
    for (const Scene& s : scenes) data.push_back(mirror_scene(s));
  }

  std::vector<Shape> gts;
  gts.reserve(data.size());
  for (const Scene& s : data) gts.push_back(s.ground_truth);

  TrainResult result;
  CascadeModel& model = result.model;
  model.shape_model = fit_shape_model(gts, config.n_components);
  model.probe_layout = config.probe_layout;
  model.ridge_lambda = config.ridge_lambda;
  model.trained_with_mirror_augmentation = config.augment_mirror;
  model.train_seed = config.init.seed;

  struct Row {
    std::size_t scene;
    Shape current;
  };
  std::vector<Row> rows;
  rows.reserve(data.size() * config.init.n_inits);
  for (std::size_t i = 0; i < data.size(); ++i) {
    Rng rng(derive_key(config.init.seed, "train-init", i,
                       data[i].meta.sample_id));
    for (std::size_t j = 0; j < config.init.n_inits; ++j)
      rows.push_back({i, detail::draw_initialization(
                             model.shape_model, data[i].detection_box, rng,
                             config.init)});
  }

  auto mean_alignment = [&]() {
    double sum = 0.0;
    for (const Row& row : rows)
      sum += alignment_error(row.current, data[row.scene].ground_truth,
                             NormalizationSpec::bbox());
    return sum / static_cast<double>(rows.size());
  };

  const std::size_t dim = k_count * config.probe_layout.probes_per_landmark();
  Eigen::MatrixXd features(rows.size(), dim);
  Eigen::MatrixXd targets(rows.size(), 2 * k_count);

  result.stage_errors.reserve(config.stages + 1);
  result.stage_errors.push_back(mean_alignment());

  for (std::size_t t = 0; t < config.stages; ++t) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Scene& scene = data[rows[r].scene];
      const Shape& current = rows[r].current;
      features.row(r) =
          extract_features(scene, current, config.probe_layout).transpose();
      const double size =
          std::max(bounding_box(current).max_side(), 1e-12);
      for (std::size_t k = 0; k < k_count; ++k) {
        targets(r, 2 * k) =
            (scene.ground_truth.points[k].x - current.points[k].x) / size;
        targets(r, 2 * k + 1) =
            (scene.ground_truth.points[k].y - current.points[k].y) / size;
      }
    }
    model.stages.push_back(
        detail::solve_ridge(features, targets, config.ridge_lambda));
    const CascadeStage& stage = model.stages.back();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Eigen::VectorXd update =
          stage.weights.transpose() * features.row(r).transpose() +
          stage.intercept;
      Shape& current = rows[r].current;
      const double size =
          std::max(bounding_box(current).max_side(), 1e-12);
      for (std::size_t k = 0; k < k_count; ++k) {
        current.points[k].x += size * update(2 * k);
        current.points[k].y += size * update(2 * k + 1);
      }
    }
    result.stage_errors.push_back(mean_alignment());
  }
  return result;
}

/// Run all stages from one initialization.
inline Shape run_cascade(const CascadeModel& model, const Scene& scene,
                         const Shape& init_shape) {
  if (init_shape.k() != model.k())
    raise(Errc::LengthMismatch, "init shape K=" +
                                    std::to_string(init_shape.k()) +
                                    " vs model K=" + std::to_string(model.k()));
  return detail::run_stages(model, scene, init_shape, 0, model.n_stages());
}

struct MultiInitResult {
  Shape shape;                   ///< coordinate-wise median
  std::vector<Shape> per_init;
};

/// Run the cascade from n_inits perturbed placements of the mean shape in
/// the scene's detection box; aggregate with the coordinate-wise median.
/// The RNG stream is keyed by (seed, round, sample_id) so results do not
/// depend on batch order; `round` selects fresh draws for restart schemes.
inline MultiInitResult run_multi_init(const CascadeModel& model,
                                      const Scene& scene,
                                      const InitConfig& config,
                                      std::uint64_t round = 0,
                                      const char* stream_tag = "init") {
  if (config.n_inits == 0)
    raise(Errc::BadConfig, "multi-init needs n_inits >= 1");
  const std::vector<Shape> inits =
      detail::draw_initializations(model, scene, config, round, stream_tag);
  MultiInitResult result;
  result.per_init.reserve(inits.size());
  for (const Shape& init : inits)
    result.per_init.push_back(run_cascade(model, scene, init));
  result.shape = detail::coordinate_median(result.per_init);
  return result;
}

struct VarianceRestartConfig {
  InitConfig init;
  double head_fraction = 0.1;  ///< fraction of stages run before the check
  double var_threshold = 0.0;  ///< restart when spread exceeds this
  std::size_t max_rounds = 3;  ///< total rounds including the first
};

struct VarianceRestartOutcome {
  Shape shape;
  bool restarted = false;
  std::size_t rounds_used = 0;
  std::vector<double> spreads;  ///< one head-spread per round
};

/// Smart-restart baseline: run the head of the cascade from all inits and
/// check how much the partial predictions disagree. Low spread completes the
/// cascade; high spread redraws initializations, up to max_rounds, after
/// which the final round is completed regardless (only the last round's
/// draws are kept).
inline VarianceRestartOutcome variance_restart_run(
    const CascadeModel& model, const Scene& scene,
    const VarianceRestartConfig& config) {
  if (!(config.head_fraction > 0.0) || config.head_fraction > 1.0)
    raise(Errc::BadConfig, "head_fraction must be in (0, 1]");
  if (config.max_rounds == 0)
    raise(Errc::BadConfig, "max_rounds must be >= 1");
  if (config.init.n_inits == 0)
    raise(Errc::BadConfig, "variance restart needs n_inits >= 1");
  const std::size_t head = static_cast<std::size_t>(std::ceil(
      config.head_fraction * static_cast<double>(model.n_stages())));
  const double box_size = scene.detection_box.max_side();

  VarianceRestartOutcome outcome;
  for (std::size_t round = 0; round < config.max_rounds; ++round) {
    const std::vector<Shape> inits = detail::draw_initializations(
        model, scene, config.init, round, "init");
    std::vector<Shape> heads;
    heads.reserve(inits.size());
    for (const Shape& init : inits)
      heads.push_back(detail::run_stages(model, scene, init, 0, head));
    const double spread = detail::normalized_spread(heads, box_size);
    outcome.spreads.push_back(spread);
    outcome.rounds_used = round + 1;
    if (spread <= config.var_threshold || round + 1 == config.max_rounds) {
      std::vector<Shape> finals;
      finals.reserve(heads.size());
      for (const Shape& h : heads)
        finals.push_back(
            detail::run_stages(model, scene, h, head, model.n_stages()));
      outcome.shape = detail::coordinate_median(finals);
      outcome.restarted = round > 0;
      return outcome;
    }
  }
  raise(Errc::BadConfig, "variance restart loop exited without completing");
}

}  // namespace mirror
