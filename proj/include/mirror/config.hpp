#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <mirror/cascade.hpp>
#include <mirror/error.hpp>
#include <mirror/experiment.hpp>
#include <mirror/io.hpp>
#include <mirror/presets.hpp>
#include <mirror/synthetic.hpp>

// Experiment configuration files (JSON). Unknown keys are rejected so typos
// fail loudly instead of silently running defaults.

namespace mirror {

/// Everything needed to train the cascade and to evaluate the restart
/// schemes on held-out scenes; one file serves both commands.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string landmarks = "synth14";
  SceneConfig scene;
  std::size_t shape_pool_count = 200;
  std::size_t pca_components = 6;

  std::size_t train_count = 500;
  double train_difficulty_min = 0.0;
  double train_difficulty_max = 1.0;
  std::size_t test_count = 300;
  double test_difficulty_min = 0.0;
  double test_difficulty_max = 1.0;

  std::size_t stages = 10;
  double ridge_lambda = 1.0;
  std::size_t probe_count = 8;
  double probe_radius = 0.15;
  bool augment_mirror = true;

  InitConfig init;  ///< seed field is filled from the top-level seed

  std::size_t f1_rounds = 3;
  std::size_t f2_inits = 10;
  std::size_t f2_rounds = 5;
  double target_recall = 0.63;
  double good_threshold = 0.10;
  std::optional<double> mirror_threshold;    ///< fixed tau; absent = calibrate
  std::optional<double> variance_threshold;  ///< fixed; absent = calibrate
  double head_fraction = 0.1;
  std::size_t variance_rounds = 3;

  NormalizationSpec align_norm = NormalizationSpec::interocular(0, 1);
  NormalizationSpec em_norm = NormalizationSpec::interocular(0, 1);
};

namespace detail {

inline void check_keys(const nlohmann::json& object,
                       const std::vector<std::string>& allowed,
                       const std::string& context) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (const std::string& key : allowed) known = known || key == item.key();
    if (!known)
      raise(Errc::BadConfig,
            "unknown key '" + item.key() + "' in " + context);
  }
}

template <typename T>
inline void get_to_if(const nlohmann::json& object, const char* key, T& out) {
  if (!object.contains(key)) return;
  try {
    object.at(key).get_to(out);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::BadConfig, std::string("bad value for '") + key + "': " +
                               e.what());
  }
}

inline void parse_canvas(const nlohmann::json& doc, SceneConfig& scene) {
  if (!doc.contains("canvas")) return;
  const nlohmann::json& canvas = doc.at("canvas");
  check_keys(canvas, {"width", "height"}, "canvas");
  get_to_if(canvas, "width", scene.width);
  get_to_if(canvas, "height", scene.height);
}

inline void parse_scene_overrides(const nlohmann::json& doc,
                                  SceneConfig& scene) {
  if (!doc.contains("scene")) return;
  const nlohmann::json& s = doc.at("scene");
  check_keys(s,
             {"object_frac_min", "object_frac_max", "placement_rotation",
              "margin_frac", "bump_width_frac", "distractors_per_difficulty",
              "distractor_amp_min", "distractor_amp_max",
              "distractor_radius_min", "distractor_radius_max",
              "box_shift_frac", "coefficient_clamp"},
             "scene");
  get_to_if(s, "object_frac_min", scene.object_frac_min);
  get_to_if(s, "object_frac_max", scene.object_frac_max);
  get_to_if(s, "placement_rotation", scene.placement_rotation);
  get_to_if(s, "margin_frac", scene.margin_frac);
  get_to_if(s, "bump_width_frac", scene.bump_width_frac);
  get_to_if(s, "distractors_per_difficulty",
            scene.distractors_per_difficulty);
  get_to_if(s, "distractor_amp_min", scene.distractor_amp_min);
  get_to_if(s, "distractor_amp_max", scene.distractor_amp_max);
  get_to_if(s, "distractor_radius_min", scene.distractor_radius_min);
  get_to_if(s, "distractor_radius_max", scene.distractor_radius_max);
  get_to_if(s, "box_shift_frac", scene.box_shift_frac);
  get_to_if(s, "coefficient_clamp", scene.coefficient_clamp);
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::BadConfig, path.string() + ": " + e.what());
  }
}

inline void parse_norm_block(const nlohmann::json& doc,
                             NormalizationSpec& align,
                             NormalizationSpec& em) {
  if (!doc.contains("norm")) return;
  const nlohmann::json& n = doc.at("norm");
  check_keys(n, {"align", "mirror"}, "norm");
  if (n.contains("align"))
    align = parse_norm_spec(n.at("align").get<std::string>());
  if (n.contains("mirror"))
    em = parse_norm_spec(n.at("mirror").get<std::string>());
}

}  // namespace detail

inline ExperimentConfig load_experiment_config(
    const std::filesystem::path& path) {
  const nlohmann::json doc = detail::parse_json_file(path);
  if (!doc.is_object())
    raise(Errc::BadConfig, path.string() + ": config must be a JSON object");
  detail::check_keys(doc,
                     {"seed", "landmarks", "canvas", "shape_pool_count",
                      "pca_components", "train", "test", "cascade", "init",
                      "feedback", "variance", "norm", "scene"},
                     "config");
  ExperimentConfig config;
  detail::get_to_if(doc, "seed", config.seed);
  detail::get_to_if(doc, "landmarks", config.landmarks);
  detail::get_to_if(doc, "shape_pool_count", config.shape_pool_count);
  detail::get_to_if(doc, "pca_components", config.pca_components);
  detail::parse_canvas(doc, config.scene);
  detail::parse_scene_overrides(doc, config.scene);

  if (doc.contains("train")) {
    const nlohmann::json& t = doc.at("train");
    detail::check_keys(t, {"count", "difficulty_min", "difficulty_max"},
                       "train");
    detail::get_to_if(t, "count", config.train_count);
    detail::get_to_if(t, "difficulty_min", config.train_difficulty_min);
    detail::get_to_if(t, "difficulty_max", config.train_difficulty_max);
  }
  if (doc.contains("test")) {
    const nlohmann::json& t = doc.at("test");
    detail::check_keys(t, {"count", "difficulty_min", "difficulty_max"},
                       "test");
    detail::get_to_if(t, "count", config.test_count);
    detail::get_to_if(t, "difficulty_min", config.test_difficulty_min);
    detail::get_to_if(t, "difficulty_max", config.test_difficulty_max);
  }
  if (doc.contains("cascade")) {
    const nlohmann::json& c = doc.at("cascade");
    detail::check_keys(c,
                       {"stages", "ridge_lambda", "probe_count",
                        "probe_radius", "augment_mirror"},
                       "cascade");
    detail::get_to_if(c, "stages", config.stages);
    detail::get_to_if(c, "ridge_lambda", config.ridge_lambda);
    detail::get_to_if(c, "probe_count", config.probe_count);
    detail::get_to_if(c, "probe_radius", config.probe_radius);
    detail::get_to_if(c, "augment_mirror", config.augment_mirror);
  }
  if (doc.contains("init")) {
    const nlohmann::json& i = doc.at("init");
    detail::check_keys(
        i, {"count", "translation", "scale_min", "scale_max", "rotation"},
        "init");
    detail::get_to_if(i, "count", config.init.n_inits);
    detail::get_to_if(i, "translation", config.init.translation_frac);
    detail::get_to_if(i, "scale_min", config.init.scale_min);
    detail::get_to_if(i, "scale_max", config.init.scale_max);
    detail::get_to_if(i, "rotation", config.init.rotation);
  }
  if (doc.contains("feedback")) {
    const nlohmann::json& f = doc.at("feedback");
    detail::check_keys(f,
                       {"f1_rounds", "f2_inits", "f2_rounds", "target_recall",
                        "good_threshold", "mirror_threshold",
                        "variance_threshold"},
                       "feedback");
    detail::get_to_if(f, "f1_rounds", config.f1_rounds);
    detail::get_to_if(f, "f2_inits", config.f2_inits);
    detail::get_to_if(f, "f2_rounds", config.f2_rounds);
    detail::get_to_if(f, "target_recall", config.target_recall);
    detail::get_to_if(f, "good_threshold", config.good_threshold);
    if (f.contains("mirror_threshold") && !f.at("mirror_threshold").is_null())
      config.mirror_threshold = f.at("mirror_threshold").get<double>();
    if (f.contains("variance_threshold") &&
        !f.at("variance_threshold").is_null())
      config.variance_threshold = f.at("variance_threshold").get<double>();
  }
  if (doc.contains("variance")) {
    const nlohmann::json& v = doc.at("variance");
    detail::check_keys(v, {"head_fraction", "rounds"}, "variance");
    detail::get_to_if(v, "head_fraction", config.head_fraction);
    detail::get_to_if(v, "rounds", config.variance_rounds);
  }
  detail::parse_norm_block(doc, config.align_norm, config.em_norm);

  config.init.seed = config.seed;
  return config;
}

inline SimulationConfig load_simulation_config(
    const std::filesystem::path& path) {
  const nlohmann::json doc = detail::parse_json_file(path);
  if (!doc.is_object())
    raise(Errc::BadConfig, path.string() + ": config must be a JSON object");
  detail::check_keys(doc,
                     {"seed", "landmarks", "canvas", "shape_pool_count",
                      "pca_components", "samples", "difficulty_min",
                      "difficulty_max", "detector", "norm", "scene"},
                     "config");
  SimulationConfig config;
  detail::get_to_if(doc, "seed", config.seed);
  detail::get_to_if(doc, "landmarks", config.landmarks);
  detail::get_to_if(doc, "shape_pool_count", config.shape_pool_count);
  detail::get_to_if(doc, "pca_components", config.pca_components);
  detail::get_to_if(doc, "samples", config.samples);
  detail::get_to_if(doc, "difficulty_min", config.difficulty_min);
  detail::get_to_if(doc, "difficulty_max", config.difficulty_max);
  detail::parse_canvas(doc, config.scene);
  detail::parse_scene_overrides(doc, config.scene);
  if (doc.contains("detector")) {
    const nlohmann::json& d = doc.at("detector");
    detail::check_keys(d, {"sigma0", "sigma1", "outlier_rate"}, "detector");
    detail::get_to_if(d, "sigma0", config.detector.sigma0);
    detail::get_to_if(d, "sigma1", config.detector.sigma1);
    detail::get_to_if(d, "outlier_rate", config.detector.outlier_rate);
  }
  if (doc.contains("norm"))
    config.norm = parse_norm_spec(doc.at("norm").get<std::string>());
  return config;
}

/// The synthetic experiments need a landmark set that ships with a template
/// shape; synth14 is the one that does.
inline Shape experiment_template(const std::string& landmarks) {
  if (landmarks == "synth14") return synth14_template();
  raise(Errc::BadConfig,
        "experiments require the synth14 landmark set, got '" + landmarks +
            "'");
}

inline SymmetryMap experiment_symmetry(const std::string& landmarks) {
  if (auto preset = symmetry_preset(landmarks)) return *preset;
  raise(Errc::BadConfig, "'" + landmarks + "' is not a built-in landmark set");
}

/// Train-pipeline assembly shared by the CLI and tests: build the shape
/// pool, fit the scene-generator model, generate training scenes, and train.
struct TrainingArtifacts {
  ShapeModel generator;
  std::vector<Scene> train_scenes;
  TrainResult result;
};

inline TrainingArtifacts run_training(const ExperimentConfig& config) {
  const Shape template_shape = experiment_template(config.landmarks);
  const SymmetryMap map = experiment_symmetry(config.landmarks);

  TrainingArtifacts artifacts;
  const std::vector<Shape> pool = sample_template_shapes(
      template_shape, config.shape_pool_count, derive_key(config.seed, "pool"));
  artifacts.generator = fit_shape_model(pool, config.pca_components);

  SceneSetConfig set_config;
  set_config.scene = config.scene;
  set_config.count = config.train_count;
  set_config.difficulty_min = config.train_difficulty_min;
  set_config.difficulty_max = config.train_difficulty_max;
  set_config.id_prefix = "train";
  set_config.seed = derive_key(config.seed, "train-scenes");
  artifacts.train_scenes = make_scene_set(artifacts.generator, map, set_config);

  TrainConfig train_config;
  train_config.stages = config.stages;
  train_config.ridge_lambda = config.ridge_lambda;
  train_config.n_components = config.pca_components;
  train_config.probe_layout =
      ProbeLayout::ring(config.probe_count, config.probe_radius);
  train_config.init = config.init;
  train_config.augment_mirror = config.augment_mirror;
  artifacts.result = train_cascade(artifacts.train_scenes, train_config);
  return artifacts;
}

/// Test-scene generation + comparison assembly for feedback-eval.
struct FeedbackEvalArtifacts {
  std::vector<Scene> test_scenes;
  ComparisonReport report;
};

inline FeedbackEvalArtifacts run_feedback_eval(const ExperimentConfig& config,
                                               const CascadeModel& model) {
  const Shape template_shape = experiment_template(config.landmarks);
  const SymmetryMap map = experiment_symmetry(config.landmarks);
  if (model.k() != map.k())
    raise(Errc::LengthMismatch,
          "model K=" + std::to_string(model.k()) + " does not match the '" +
              config.landmarks + "' landmark set (K=" +
              std::to_string(map.k()) + ")");

  FeedbackEvalArtifacts artifacts;
  const std::vector<Shape> pool = sample_template_shapes(
      template_shape, config.shape_pool_count, derive_key(config.seed, "pool"));
  const ShapeModel generator = fit_shape_model(pool, config.pca_components);

  SceneSetConfig set_config;
  set_config.scene = config.scene;
  set_config.count = config.test_count;
  set_config.difficulty_min = config.test_difficulty_min;
  set_config.difficulty_max = config.test_difficulty_max;
  set_config.id_prefix = "test";
  set_config.seed = derive_key(config.seed, "test-scenes");
  artifacts.test_scenes = make_scene_set(generator, map, set_config);

  ComparisonConfig comparison;
  comparison.base_init = config.init;
  comparison.f1_rounds = config.f1_rounds;
  comparison.f2_inits = config.f2_inits;
  comparison.f2_rounds = config.f2_rounds;
  comparison.head_fraction = config.head_fraction;
  comparison.variance_rounds = config.variance_rounds;
  comparison.target_recall = config.target_recall;
  comparison.good_threshold = config.good_threshold;
  comparison.map = map;
  comparison.align_norm = config.align_norm;
  comparison.em_norm = config.em_norm;
  comparison.fixed_mirror_threshold = config.mirror_threshold;
  comparison.fixed_var_threshold = config.variance_threshold;
  artifacts.report =
      compare_feedback_vs_baseline(artifacts.test_scenes, model, comparison);
  return artifacts;
}

}  // namespace mirror
