#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <mirror/cascade.hpp>
#include <mirror/error.hpp>
#include <mirror/metrics.hpp>
#include <mirror/selection.hpp>
#include <mirror/shape.hpp>
#include <mirror/synthetic.hpp>

// Mirror-error feedback around the cascade: run the regressor on a scene and
// on its mirror, and use the disagreement between the two results — which
// needs no ground truth — to decide whether the current initialization round
// failed and should be redrawn. Rounds are compared by mirror error and the
// best one is kept.

namespace mirror {

struct FeedbackConfig {
  InitConfig init;               ///< per-round initializations (and seed)
  double mirror_threshold = 0.0; ///< e_m above this triggers a restart
  std::size_t max_rounds = 1;    ///< total rounds including the first
};

struct FeedbackRound {
  double e_m = 0.0;
  Shape shape;         ///< original-image multi-init result
  Shape mirror_shape;  ///< mirror-image multi-init result, in its own frame
};

struct FeedbackOutcome {
  Shape shape;          ///< best round's original-image result
  Shape mirror_result;  ///< the same round's mirror-image result
  double best_e_m = 0.0;
  std::size_t rounds_used = 0;
  bool triggered = false;  ///< any restart fired
  std::vector<FeedbackRound> per_round;
};

/// Run multi-init on the scene and its mirror; restart with fresh draws while
/// the mirror error between the two results exceeds the threshold, up to
/// max_rounds total rounds. Returns the round with the smallest mirror error
/// (never unconditionally the last). Original and mirror draws come from
/// separate streams keyed by (seed, round, sample_id).
inline FeedbackOutcome mirror_feedback_run(const CascadeModel& model,
                                           const Scene& scene,
                                           const SymmetryMap& map,
                                           const NormalizationSpec& norm,
                                           const FeedbackConfig& config) {
  if (!(config.mirror_threshold > 0.0))
    raise(Errc::BadConfig, "mirror_threshold must be > 0");
  if (config.max_rounds == 0)
    raise(Errc::BadConfig, "max_rounds must be >= 1");

  const Scene mirrored = mirror_scene(scene);
  FeedbackOutcome outcome;
  for (std::size_t round = 0; round < config.max_rounds; ++round) {
    MultiInitResult original =
        run_multi_init(model, scene, config.init, round, "init");
    MultiInitResult mirror =
        run_multi_init(model, mirrored, config.init, round, "init-mirror");
    const double e_m = mirror_error(original.shape, mirror.shape, scene.meta,
                                    map, norm);
    outcome.per_round.push_back(
        {e_m, std::move(original.shape), std::move(mirror.shape)});
    if (e_m <= config.mirror_threshold) break;
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcome.per_round.size(); ++r) {
    if (outcome.per_round[r].e_m < outcome.per_round[best].e_m) best = r;
  }
  outcome.shape = outcome.per_round[best].shape;
  outcome.mirror_result = outcome.per_round[best].mirror_shape;
  outcome.best_e_m = outcome.per_round[best].e_m;
  outcome.rounds_used = outcome.per_round.size();
  outcome.triggered = outcome.rounds_used > 1;
  return outcome;
}

/// A result is good iff its alignment error is strictly below the threshold
/// (default: 10% of the inter-ocular distance); the boundary counts as bad.
inline bool classify_good(double e_a, double threshold = 0.10) {
  return e_a < threshold;
}

struct PrecisionRecall {
  std::optional<double> precision;  ///< absent when nothing triggered
  double recall = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Precision/recall of a restart rule treated as a bad-sample detector:
/// trigger = predicted bad, label = actually bad.
inline PrecisionRecall precision_recall(const std::vector<bool>& triggers,
                                        const std::vector<bool>& bad_labels) {
  if (triggers.size() != bad_labels.size())
    raise(Errc::LengthMismatch,
          "precision_recall got " + std::to_string(triggers.size()) +
              " triggers vs " + std::to_string(bad_labels.size()) + " labels");
  PrecisionRecall pr;
  for (std::size_t i = 0; i < triggers.size(); ++i) {
    if (triggers[i] && bad_labels[i]) ++pr.tp;
    else if (triggers[i] && !bad_labels[i]) ++pr.fp;
    else if (!triggers[i] && bad_labels[i]) ++pr.fn;
    else ++pr.tn;
  }
  if (pr.tp + pr.fn == 0)
    raise(Errc::NoBadLabels, "recall undefined: no bad labels present");
  if (pr.tp + pr.fp > 0)
    pr.precision = static_cast<double>(pr.tp) /
                   static_cast<double>(pr.tp + pr.fp);
  pr.recall = static_cast<double>(pr.tp) / static_cast<double>(pr.tp + pr.fn);
  return pr;
}

/// Choose the trigger threshold reaching a target recall on labeled data.
/// Sweeps the distinct observed statistic values from above; the calibration
/// trigger rule is `stat >= tau`, so the returned tau is the largest value
/// whose recall meets the target (recall grows as tau descends).
inline double calibrate_threshold(const std::vector<double>& stats,
                                  const std::vector<bool>& bad_labels,
                                  double target_recall) {
  if (stats.size() != bad_labels.size())
    raise(Errc::LengthMismatch,
          "calibrate_threshold got " + std::to_string(stats.size()) +
              " stats vs " + std::to_string(bad_labels.size()) + " labels");
  if (!(target_recall > 0.0) || target_recall > 1.0)
    raise(Errc::BadConfig, "target_recall must be in (0, 1]");
  std::size_t n_bad = 0;
  for (bool b : bad_labels) n_bad += b;
  if (n_bad == 0)
    raise(Errc::Unachievable,
          "no bad samples: every threshold has undefined recall");

  std::vector<double> candidates = stats;
  std::sort(candidates.begin(), candidates.end(),
            [](double a, double b) { return a > b; });
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (double tau : candidates) {
    std::size_t tp = 0;
    for (std::size_t i = 0; i < stats.size(); ++i)
      tp += (bad_labels[i] && stats[i] >= tau);
    const double recall = static_cast<double>(tp) / static_cast<double>(n_bad);
    if (recall >= target_recall) return tau;
  }
  raise(Errc::Unachievable, "no threshold reaches the target recall");
}

}  // namespace mirror
