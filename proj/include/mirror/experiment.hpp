#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <mirror/cascade.hpp>
#include <mirror/feedback.hpp>
#include <mirror/metrics.hpp>
#include <mirror/presets.hpp>
#include <mirror/rng.hpp>
#include <mirror/synthetic.hpp>

// End-to-end experiment pipelines: build shape pools and scene sets, train
// the cascade, run the restart-scheme comparison, and run the simulated
// detector correlation study. Everything is reproducible from (config, seed).

namespace mirror {

/// Random variants of a template shape: anisotropic stretch plus per-point
/// jitter, in canonical units. Used as the population a ShapeModel is fit to.
inline std::vector<Shape> sample_template_shapes(const Shape& template_shape,
                                                 std::size_t count,
                                                 std::uint64_t seed,
                                                 double stretch = 0.15,
                                                 double jitter = 0.03) {
  std::vector<Shape> shapes;
  shapes.reserve(count);
  Rng rng(derive_key(seed, "shape-pool"));
  for (std::size_t i = 0; i < count; ++i) {
    const double sx = rng.uniform(1.0 - stretch, 1.0 + stretch);
    const double sy = rng.uniform(1.0 - stretch, 1.0 + stretch);
    Shape shape;
    shape.points.reserve(template_shape.k());
    for (const Vec2& p : template_shape.points)
      shape.points.push_back({p.x * sx + rng.normal() * jitter,
                              p.y * sy + rng.normal() * jitter});
    shapes.push_back(std::move(shape));
  }
  return shapes;
}

struct SceneSetConfig {
  SceneConfig scene;
  std::size_t count = 0;
  double difficulty_min = 0.0;
  double difficulty_max = 1.0;
  std::string id_prefix;
  std::uint64_t seed = 0;
};

/// Generate `count` scenes with difficulties drawn uniformly from the
/// configured range; sample ids are prefix + zero-padded index.
inline std::vector<Scene> make_scene_set(const ShapeModel& generator,
                                         const SymmetryMap& map,
                                         const SceneSetConfig& config) {
  Rng difficulty_rng(derive_key(config.seed, "difficulty", 0, config.id_prefix));
  std::vector<Scene> scenes;
  scenes.reserve(config.count);
  for (std::size_t i = 0; i < config.count; ++i) {
    const double d =
        config.difficulty_min == config.difficulty_max
            ? config.difficulty_min
            : difficulty_rng.uniform(config.difficulty_min,
                                     config.difficulty_max);
    std::string id = std::to_string(i);
    id.insert(0, id.size() < 6 ? 6 - id.size() : 0, '0');
    id.insert(0, config.id_prefix);
    scenes.push_back(generate_scene(generator, map, config.scene, d,
                                    derive_key(config.seed, "scene-seed", i,
                                               config.id_prefix),
                                    id));
  }
  return scenes;
}

// ---------------------------------------------------------------------------
// Restart-scheme comparison
// ---------------------------------------------------------------------------

struct ComparisonConfig {
  InitConfig base_init;           ///< shared by no-restart, variance, F1
  std::size_t f1_rounds = 3;      ///< 5 inits, up to two restarts
  std::size_t f2_inits = 10;      ///< F2: more inits ...
  std::size_t f2_rounds = 5;      ///< ... and up to four restarts
  double head_fraction = 0.1;
  std::size_t variance_rounds = 3;
  double target_recall = 0.63;
  double good_threshold = 0.10;   ///< on e_a under align_norm
  SymmetryMap map;
  NormalizationSpec align_norm = NormalizationSpec::interocular(0, 1);
  NormalizationSpec em_norm = NormalizationSpec::interocular(0, 1);
  std::optional<double> fixed_mirror_threshold;
  std::optional<double> fixed_var_threshold;
};

struct MethodSummary {
  std::string name;
  double mean_e_a = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> threshold;  ///< absent for the no-restart reference
  std::size_t n_triggered = 0;
};

struct SampleComparison {
  std::string sample_id;
  double difficulty = 0.0;
  bool bad = false;          ///< no-restart result classified bad
  double e_a_none = 0.0;     ///< plain multi-init
  double e_a_variance = 0.0;
  double e_a_f1 = 0.0;
  double e_a_f2 = 0.0;
  double e_m_round0 = 0.0;   ///< feedback statistic before any restart
  double spread_round0 = 0.0;///< variance statistic before any restart
  bool trig_variance = false;
  bool trig_f1 = false;
  bool trig_f2 = false;
  std::size_t rounds_f1 = 0;
  std::size_t rounds_f2 = 0;
  double best_e_m_f1 = 0.0;
  double min_round_e_m_f1 = 0.0;  ///< for the keep-best dominance check
};

struct ComparisonReport {
  std::vector<MethodSummary> methods;   ///< none, variance, f1, f2
  std::vector<SampleComparison> samples;
  double mirror_threshold = 0.0;
  double var_threshold = 0.0;
};

/// Evaluate the four result-selection schemes on held-out scenes:
/// plain multi-init, variance smart-restart, and mirror feedback with a small
/// (F1) and a large (F2) budget. Thresholds are calibrated on the same set to
/// the target recall unless fixed values are supplied; both feedback budgets
/// share the calibrated mirror threshold.
inline ComparisonReport compare_feedback_vs_baseline(
    const std::vector<Scene>& scenes, const CascadeModel& model,
    const ComparisonConfig& config) {
  if (scenes.empty())
    raise(Errc::InsufficientData, "comparison needs at least one scene");

  ComparisonReport report;
  report.samples.resize(scenes.size());
  std::vector<bool> bad_labels(scenes.size());
  std::vector<double> em_stats(scenes.size());
  std::vector<double> spread_stats(scenes.size());

  const std::size_t head_stages = static_cast<std::size_t>(std::ceil(
      config.head_fraction * static_cast<double>(model.n_stages())));

  // Pass 1: the no-restart reference plus the two round-0 restart statistics.
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Scene& scene = scenes[i];
    SampleComparison& row = report.samples[i];
    row.sample_id = scene.meta.sample_id;
    row.difficulty = scene.difficulty;

    const MultiInitResult base =
        run_multi_init(model, scene, config.base_init, 0, "init");
    row.e_a_none =
        alignment_error(base.shape, scene.ground_truth, config.align_norm);
    row.bad = !classify_good(row.e_a_none, config.good_threshold);
    bad_labels[i] = row.bad;

    const MultiInitResult mirrored = run_multi_init(
        model, mirror_scene(scene), config.base_init, 0, "init-mirror");
    row.e_m_round0 = mirror_error(base.shape, mirrored.shape, scene.meta,
                                  config.map, config.em_norm);
    em_stats[i] = row.e_m_round0;

    std::vector<Shape> heads;
    heads.reserve(config.base_init.n_inits);
    for (const Shape& init : detail::draw_initializations(
             model, scene, config.base_init, 0, "init"))
      heads.push_back(detail::run_stages(model, scene, init, 0, head_stages));
    row.spread_round0 =
        detail::normalized_spread(heads, scene.detection_box.max_side());
    spread_stats[i] = row.spread_round0;
  }

  report.mirror_threshold =
      config.fixed_mirror_threshold
          ? *config.fixed_mirror_threshold
          : calibrate_threshold(em_stats, bad_labels, config.target_recall);
  report.var_threshold =
      config.fixed_var_threshold
          ? *config.fixed_var_threshold
          : calibrate_threshold(spread_stats, bad_labels, config.target_recall);

  // Pass 2: the three restart schemes with their calibrated thresholds.
  VarianceRestartConfig variance_config;
  variance_config.init = config.base_init;
  variance_config.head_fraction = config.head_fraction;
  variance_config.var_threshold = report.var_threshold;
  variance_config.max_rounds = config.variance_rounds;

  FeedbackConfig f1_config;
  f1_config.init = config.base_init;
  f1_config.mirror_threshold = report.mirror_threshold;
  f1_config.max_rounds = config.f1_rounds;

  FeedbackConfig f2_config = f1_config;
  f2_config.init.n_inits = config.f2_inits;
  f2_config.max_rounds = config.f2_rounds;

  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Scene& scene = scenes[i];
    SampleComparison& row = report.samples[i];

    const VarianceRestartOutcome variance =
        variance_restart_run(model, scene, variance_config);
    row.e_a_variance =
        alignment_error(variance.shape, scene.ground_truth, config.align_norm);
    row.trig_variance = variance.restarted;

    const FeedbackOutcome f1 = mirror_feedback_run(
        model, scene, config.map, config.em_norm, f1_config);
    row.e_a_f1 =
        alignment_error(f1.shape, scene.ground_truth, config.align_norm);
    row.trig_f1 = f1.triggered;
    row.rounds_f1 = f1.rounds_used;
    row.best_e_m_f1 = f1.best_e_m;
    row.min_round_e_m_f1 = f1.per_round.front().e_m;
    for (const FeedbackRound& r : f1.per_round)
      row.min_round_e_m_f1 = std::min(row.min_round_e_m_f1, r.e_m);

    const FeedbackOutcome f2 = mirror_feedback_run(
        model, scene, config.map, config.em_norm, f2_config);
    row.e_a_f2 =
        alignment_error(f2.shape, scene.ground_truth, config.align_norm);
    row.trig_f2 = f2.triggered;
    row.rounds_f2 = f2.rounds_used;
  }

  auto summarize = [&](const std::string& name, auto error_of, auto trig_of,
                       std::optional<double> threshold) {
    MethodSummary s;
    s.name = name;
    double sum = 0.0;
    std::vector<bool> triggers(scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      sum += error_of(report.samples[i]);
      triggers[i] = trig_of(report.samples[i]);
      s.n_triggered += triggers[i];
    }
    s.mean_e_a = sum / static_cast<double>(scenes.size());
    s.threshold = threshold;
    if (threshold) {
      const PrecisionRecall pr = precision_recall(triggers, bad_labels);
      s.precision = pr.precision;
      s.recall = pr.recall;
    }
    return s;
  };

  report.methods.push_back(summarize(
      "none", [](const SampleComparison& r) { return r.e_a_none; },
      [](const SampleComparison&) { return false; }, std::nullopt));
  report.methods.push_back(summarize(
      "variance", [](const SampleComparison& r) { return r.e_a_variance; },
      [](const SampleComparison& r) { return r.trig_variance; },
      report.var_threshold));
  report.methods.push_back(summarize(
      "feedback_f1", [](const SampleComparison& r) { return r.e_a_f1; },
      [](const SampleComparison& r) { return r.trig_f1; },
      report.mirror_threshold));
  report.methods.push_back(summarize(
      "feedback_f2", [](const SampleComparison& r) { return r.e_a_f2; },
      [](const SampleComparison& r) { return r.trig_f2; },
      report.mirror_threshold));
  return report;
}

// ---------------------------------------------------------------------------
// Simulated-detector correlation study
// ---------------------------------------------------------------------------

struct SimulationConfig {
  std::uint64_t seed = 5;
  std::string landmarks = "synth14";
  SceneConfig scene;
  std::size_t shape_pool_count = 200;
  std::size_t pca_components = 6;
  std::size_t samples = 1000;
  double difficulty_min = 0.0;
  double difficulty_max = 1.0;
  SimDetectorConfig detector;
  NormalizationSpec norm = NormalizationSpec::bbox();
};

struct SimulationReport {
  std::vector<SampleRecord> records;   ///< evaluated, scene order
  std::vector<double> difficulties;    ///< aligned with records
  double mean_e_m = 0.0;
  double mean_e_a = 0.0;
  double pearson_r = 0.0;
  double spearman_r = 0.0;
  std::optional<double> expected_mean_e_a;  ///< analytic, outlier-free only
};

/// Generate scenes, run the simulated detector on each plus its mirror, and
/// correlate the resulting mirror and alignment errors.
inline SimulationReport run_simulation(const SimulationConfig& config,
                                       const SymmetryMap& map,
                                       const Shape& template_shape) {
  const std::vector<Shape> pool = sample_template_shapes(
      template_shape, config.shape_pool_count, derive_key(config.seed, "pool"));
  const ShapeModel generator = fit_shape_model(pool, config.pca_components);

  SceneSetConfig set_config;
  set_config.scene = config.scene;
  set_config.count = config.samples;
  set_config.difficulty_min = config.difficulty_min;
  set_config.difficulty_max = config.difficulty_max;
  set_config.id_prefix = "sim";
  set_config.seed = derive_key(config.seed, "scenes");
  const std::vector<Scene> scenes = make_scene_set(generator, map, set_config);

  SimDetectorConfig detector = config.detector;
  detector.seed = derive_key(config.seed, "detector");

  std::vector<SampleRecord> records;
  records.reserve(scenes.size());
  SimulationReport report;
  report.difficulties.reserve(scenes.size());
  double expected_sum = 0.0;
  for (const Scene& scene : scenes) {
    DetectionPair pair = simulate_detector(scene, detector);
    SampleRecord rec;
    rec.sample_id = scene.meta.sample_id;
    rec.det_original = std::move(pair.det_original);
    rec.det_mirror = std::move(pair.det_mirror);
    rec.ground_truth = scene.ground_truth;
    rec.meta = scene.meta;
    records.push_back(std::move(rec));
    report.difficulties.push_back(scene.difficulty);
    if (detector.outlier_rate == 0.0)
      expected_sum += expected_alignment_error(detector, scene.difficulty);
  }

  EvaluationResult evaluated = evaluate_records(std::move(records), map,
                                                config.norm);
  if (!evaluated.skipped.empty())
    raise(Errc::ZeroSize, "simulation produced unevaluable records (first: " +
                              evaluated.skipped.front().message + ")");
  report.records = std::move(evaluated.records);

  std::vector<double> ems, eas;
  ems.reserve(report.records.size());
  eas.reserve(report.records.size());
  for (const SampleRecord& rec : report.records) {
    ems.push_back(*rec.e_m);
    eas.push_back(*rec.e_a);
  }
  double sum_m = 0.0, sum_a = 0.0;
  for (std::size_t i = 0; i < ems.size(); ++i) {
    sum_m += ems[i];
    sum_a += eas[i];
  }
  report.mean_e_m = sum_m / static_cast<double>(ems.size());
  report.mean_e_a = sum_a / static_cast<double>(eas.size());
  report.pearson_r = pearson(ems, eas);
  report.spearman_r = spearman(ems, eas);
  if (detector.outlier_rate == 0.0)
    report.expected_mean_e_a =
        expected_sum / static_cast<double>(report.records.size());
  return report;
}

}  // namespace mirror
