// mirroreval: command-line surface for the mirror-consistency toolkit.
//
// Subcommands:
//   evaluate         mirror/alignment errors for detection dumps
//   select-difficult top-M samples by an error key
//   consistency      pairwise selection-overlap matrix across methods
//   train-cascade    train the synthetic-scene cascade, save the model
//   feedback-eval    compare restart schemes on held-out synthetic scenes
//   simulate         simulated-detector error-correlation study
//
// All failures print one line, "<Category>: <message>", and exit nonzero.

#include <cstddef>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <mirror/config.hpp>
#include <mirror/error.hpp>
#include <mirror/experiment.hpp>
#include <mirror/io.hpp>
#include <mirror/metrics.hpp>
#include <mirror/selection.hpp>
#include <mirror/version.hpp>

namespace fs = std::filesystem;
using namespace mirror;

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    raise(Errc::IoError,
          "cannot create directory " + dir.string() + ": " + ec.message());
}

void ensure_parent(const fs::path& file) {
  const fs::path parent = file.parent_path();
  if (!parent.empty()) ensure_dir(parent);
}

// -----------------------------------------------------------------------
// evaluate
// -----------------------------------------------------------------------

struct EvaluateOpts {
  std::string original;
  std::string mirror_file;
  std::string widths;
  std::string gt;
  std::string symmetry;
  std::string norm = "bbox";
  std::string out;
  bool with_spearman = false;
};

void cmd_evaluate(const EvaluateOpts& opt) {
  const std::vector<LandmarkRow> originals = parse_landmarks(opt.original);
  std::optional<std::size_t> k;
  if (!originals.empty()) k = originals.front().shape.k();
  const std::vector<LandmarkRow> mirrors = parse_landmarks(opt.mirror_file, k);
  const std::map<std::string, double> widths = parse_widths(opt.widths);
  const bool has_gt = !opt.gt.empty();
  std::vector<LandmarkRow> gts;
  if (has_gt) gts = parse_landmarks(opt.gt, k);
  const SymmetryMap map = resolve_symmetry(opt.symmetry);
  const NormalizationSpec norm = parse_norm_spec(opt.norm);

  std::unordered_map<std::string, const Shape*> mirror_by_id;
  for (const LandmarkRow& row : mirrors)
    mirror_by_id.emplace(row.sample_id, &row.shape);
  std::unordered_map<std::string, const Shape*> gt_by_id;
  for (const LandmarkRow& row : gts)
    gt_by_id.emplace(row.sample_id, &row.shape);

  // Join by sample id, keeping the original file's row order. A sample
  // missing from any companion file is reported, not fatal.
  std::vector<SampleRecord> records;
  std::vector<SkippedSample> skipped;
  for (const LandmarkRow& row : originals) {
    const auto mirror_it = mirror_by_id.find(row.sample_id);
    if (mirror_it == mirror_by_id.end()) {
      skipped.push_back({row.sample_id, Errc::MissingEntry,
                         "no mirror-image detection row"});
      continue;
    }
    const auto width_it = widths.find(row.sample_id);
    if (width_it == widths.end()) {
      skipped.push_back({row.sample_id, Errc::MissingEntry, "no image width"});
      continue;
    }
    const Shape* gt = nullptr;
    if (has_gt) {
      const auto gt_it = gt_by_id.find(row.sample_id);
      if (gt_it == gt_by_id.end()) {
        skipped.push_back(
            {row.sample_id, Errc::MissingEntry, "no ground-truth row"});
        continue;
      }
      gt = gt_it->second;
    }
    SampleRecord rec;
    rec.sample_id = row.sample_id;
    rec.det_original = row.shape;
    rec.det_mirror = *mirror_it->second;
    if (gt) rec.ground_truth = *gt;
    rec.meta = {row.sample_id, width_it->second, width_it->second};
    records.push_back(std::move(rec));
  }

  EvaluationResult result = evaluate_records(std::move(records), map, norm);
  for (SkippedSample& s : result.skipped) skipped.push_back(std::move(s));

  ensure_dir(opt.out);
  const KeyValues header_entries = {{"command", "evaluate"},
                                    {"norm", norm_spec_name(norm)}};
  const std::string header = report_header(header_entries);
  const fs::path out_dir = opt.out;
  write_text_file(out_dir / "per_sample.csv",
                  render_per_sample_csv(result.records, header));
  write_text_file(out_dir / "skipped.csv",
                  render_skipped_csv(skipped, header));
  if (result.records.size() >= 2)
    write_text_file(
        out_dir / "per_point.csv",
        render_per_point_csv(per_point_stats(result.records, map, norm),
                             header));
  if (has_gt)
    write_text_file(out_dir / "curve.csv",
                    render_curve_csv(sorted_error_curve(result.records),
                                     header));

  KeyValues values;
  values.emplace_back("n_evaluated", std::to_string(result.records.size()));
  values.emplace_back("n_skipped", std::to_string(skipped.size()));
  if (!result.records.empty()) {
    const double n = static_cast<double>(result.records.size());
    double sum_m = 0.0, sum_a = 0.0, sum_am = 0.0;
    std::vector<double> ems, eas;
    for (const SampleRecord& rec : result.records) {
      sum_m += *rec.e_m;
      ems.push_back(*rec.e_m);
      if (rec.e_a) {
        sum_a += *rec.e_a;
        eas.push_back(*rec.e_a);
      }
      if (rec.e_a_mirror) sum_am += *rec.e_a_mirror;
    }
    values.emplace_back("mean_e_m", format_double(sum_m / n));
    if (has_gt) {
      values.emplace_back("mean_e_a", format_double(sum_a / n));
      values.emplace_back("mean_e_a_mirror", format_double(sum_am / n));
      if (result.records.size() >= 2) {
        try {
          values.emplace_back("pearson_r", format_double(pearson(ems, eas)));
          if (opt.with_spearman)
            values.emplace_back("spearman_r",
                                format_double(spearman(ems, eas)));
        } catch (const Error&) {
          // Correlation is undefined for constant inputs; the fields are
          // simply omitted, like e_a fields without ground truth.
        }
      }
    }
  }
  write_text_file(out_dir / "summary.txt",
                  render_summary(header_entries, values));
}

// -----------------------------------------------------------------------
// select-difficult
// -----------------------------------------------------------------------

struct SelectOpts {
  std::string errors;
  std::string key = "em";
  std::size_t top = 0;
  std::string out;
};

void cmd_select_difficult(const SelectOpts& opt) {
  const std::vector<SampleRecord> records = parse_per_sample_csv(opt.errors);
  const ErrorKey key =
      opt.key == "em" ? ErrorKey::MirrorError : ErrorKey::AlignmentError;
  const SelectionSet set = select_top_m(records, key, opt.top, opt.errors);
  ensure_parent(opt.out);
  write_text_file(opt.out,
                  render_selection(
                      set, report_header({{"command", "select-difficult"},
                                          {"key", opt.key},
                                          {"top", std::to_string(opt.top)},
                                          {"n", std::to_string(records.size())}})));
}

// -----------------------------------------------------------------------
// consistency
// -----------------------------------------------------------------------

struct ConsistencyOpts {
  std::vector<std::string> sets;
  std::string mode = "em-em";
  std::size_t top = 0;
  std::string out;
};

void cmd_consistency(const ConsistencyOpts& opt) {
  std::vector<std::pair<std::string, std::vector<SampleRecord>>> methods;
  std::unordered_set<std::string> seen;
  for (const std::string& dir : opt.sets) {
    if (!seen.insert(dir).second)
      raise(Errc::DuplicateId, "set '" + dir + "' given more than once");
    methods.emplace_back(dir,
                         parse_per_sample_csv(fs::path(dir) / "per_sample.csv"));
  }
  ConsistencyMode mode = ConsistencyMode::EmVsEm;
  if (opt.mode == "em-ea") mode = ConsistencyMode::EmVsEa;
  else if (opt.mode == "ea-ea") mode = ConsistencyMode::EaVsEa;
  const ConsistencyMatrix matrix = consistency_matrix(methods, mode, opt.top);
  ensure_parent(opt.out);
  write_text_file(opt.out,
                  render_matrix_csv(
                      matrix, report_header({{"command", "consistency"},
                                             {"mode", opt.mode},
                                             {"top", std::to_string(opt.top)},
                                             {"n", std::to_string(matrix.n)}})));
}

// -----------------------------------------------------------------------
// train-cascade
// -----------------------------------------------------------------------

void cmd_train_cascade(const std::string& config_path,
                       const std::string& out) {
  const ExperimentConfig config = load_experiment_config(config_path);
  const TrainingArtifacts artifacts = run_training(config);
  ensure_parent(out);
  save_cascade_model(out, artifacts.result.model);
  const std::vector<double>& errors = artifacts.result.stage_errors;
  std::cout << "trained " << artifacts.result.model.n_stages() << " stages on "
            << artifacts.train_scenes.size() << " scenes; train e_a "
            << format_double(errors.front()) << " -> "
            << format_double(errors.back()) << "\n";
}

// -----------------------------------------------------------------------
// feedback-eval
// -----------------------------------------------------------------------

void cmd_feedback_eval(const std::string& model_path,
                       const std::string& config_path,
                       const std::string& out) {
  const ExperimentConfig config = load_experiment_config(config_path);
  const CascadeModel model = load_cascade_model(model_path);
  const FeedbackEvalArtifacts artifacts = run_feedback_eval(config, model);
  const ComparisonReport& report = artifacts.report;

  ensure_dir(out);
  const KeyValues header_entries = {
      {"command", "feedback-eval"},
      {"seed", std::to_string(config.seed)},
      {"align_norm", norm_spec_name(config.align_norm)},
      {"em_norm", norm_spec_name(config.em_norm)}};
  const std::string header = report_header(header_entries);
  const fs::path out_dir = out;
  write_text_file(out_dir / "methods.csv",
                  render_methods_csv(report, header));
  write_text_file(out_dir / "per_sample.csv",
                  render_comparison_per_sample_csv(report, header));

  KeyValues values;
  values.emplace_back("n_samples", std::to_string(report.samples.size()));
  values.emplace_back("mirror_threshold",
                      format_double(report.mirror_threshold));
  values.emplace_back("var_threshold", format_double(report.var_threshold));
  std::size_t n_bad = 0;
  for (const SampleComparison& row : report.samples) n_bad += row.bad;
  values.emplace_back("n_bad", std::to_string(n_bad));
  for (const MethodSummary& m : report.methods) {
    values.emplace_back("mean_e_a_" + m.name, format_double(m.mean_e_a));
    if (m.precision)
      values.emplace_back("precision_" + m.name, format_double(*m.precision));
    if (m.recall)
      values.emplace_back("recall_" + m.name, format_double(*m.recall));
    values.emplace_back("n_triggered_" + m.name,
                        std::to_string(m.n_triggered));
  }
  write_text_file(out_dir / "summary.txt",
                  render_summary(header_entries, values));
}

// -----------------------------------------------------------------------
// simulate
// -----------------------------------------------------------------------

void cmd_simulate(const std::string& config_path, const std::string& out) {
  const SimulationConfig config = load_simulation_config(config_path);
  const SymmetryMap map = experiment_symmetry(config.landmarks);
  const Shape template_shape = experiment_template(config.landmarks);
  const SimulationReport report = run_simulation(config, map, template_shape);

  ensure_dir(out);
  const KeyValues header_entries = {{"command", "simulate"},
                                    {"seed", std::to_string(config.seed)},
                                    {"norm", norm_spec_name(config.norm)}};
  const std::string header = report_header(header_entries);
  const fs::path out_dir = out;
  write_text_file(out_dir / "per_sample.csv",
                  render_sim_per_sample_csv(report, header));

  KeyValues values;
  values.emplace_back("n_samples", std::to_string(report.records.size()));
  values.emplace_back("sigma0", format_double(config.detector.sigma0));
  values.emplace_back("sigma1", format_double(config.detector.sigma1));
  values.emplace_back("outlier_rate",
                      format_double(config.detector.outlier_rate));
  values.emplace_back("mean_e_m", format_double(report.mean_e_m));
  values.emplace_back("mean_e_a", format_double(report.mean_e_a));
  values.emplace_back("pearson_r", format_double(report.pearson_r));
  values.emplace_back("spearman_r", format_double(report.spearman_r));
  if (report.expected_mean_e_a)
    values.emplace_back("expected_mean_e_a",
                        format_double(*report.expected_mean_e_a));
  write_text_file(out_dir / "summary.txt",
                  render_summary(header_entries, values));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mirror-consistency evaluation toolkit"};
  app.set_version_flag("--version", std::string("mirroreval ") + version_string);
  app.require_subcommand(1);

  EvaluateOpts evaluate_opts;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "compute mirror/alignment errors for detection dumps");
  evaluate->add_option("--original", evaluate_opts.original,
                       "landmark CSV, original images")->required();
  evaluate->add_option("--mirror", evaluate_opts.mirror_file,
                       "landmark CSV, mirrored images (their own frame)")
      ->required();
  evaluate->add_option("--widths", evaluate_opts.widths,
                       "two-column CSV: sample_id,width")->required();
  evaluate->add_option("--gt", evaluate_opts.gt,
                       "landmark CSV, ground truth (optional)");
  evaluate->add_option("--symmetry", evaluate_opts.symmetry,
                       "symmetry map: preset name or JSON file")->required();
  evaluate->add_option("--norm", evaluate_opts.norm,
                       "normalization: bbox | interocular:i,j | fixed:v");
  evaluate->add_option("--out", evaluate_opts.out, "output directory")
      ->required();
  evaluate->add_flag("--spearman", evaluate_opts.with_spearman,
                     "also report the Spearman rank correlation");
  evaluate->callback([&] { cmd_evaluate(evaluate_opts); });

  SelectOpts select_opts;
  CLI::App* select = app.add_subcommand(
      "select-difficult", "pick the top-M samples by an error key");
  select->add_option("--errors", select_opts.errors,
                     "per_sample.csv from evaluate")->required();
  select->add_option("--key", select_opts.key, "ranking key")
      ->check(CLI::IsMember({"em", "ea"}));
  select->add_option("--top", select_opts.top, "selection size M")
      ->required();
  select->add_option("--out", select_opts.out, "output id list")->required();
  select->callback([&] { cmd_select_difficult(select_opts); });

  ConsistencyOpts consistency_opts;
  CLI::App* consistency = app.add_subcommand(
      "consistency", "selection-overlap matrix across method directories");
  consistency->add_option("--sets", consistency_opts.sets,
                          "directories each holding a per_sample.csv")
      ->required()
      ->expected(1, -1);
  consistency->add_option("--mode", consistency_opts.mode, "key pairing")
      ->check(CLI::IsMember({"em-ea", "em-em", "ea-ea"}));
  consistency->add_option("--top", consistency_opts.top, "selection size M")
      ->required();
  consistency->add_option("--out", consistency_opts.out, "output matrix CSV")
      ->required();
  consistency->callback([&] { cmd_consistency(consistency_opts); });

  std::string train_config, train_out;
  CLI::App* train = app.add_subcommand(
      "train-cascade", "train the cascade on synthetic scenes");
  train->add_option("--config", train_config, "experiment JSON config")
      ->required();
  train->add_option("--out", train_out, "output model file")->required();
  train->callback([&] { cmd_train_cascade(train_config, train_out); });

  std::string feedback_model, feedback_config, feedback_out;
  CLI::App* feedback = app.add_subcommand(
      "feedback-eval", "compare restart schemes on held-out scenes");
  feedback->add_option("--model", feedback_model, "trained model file")
      ->required();
  feedback->add_option("--config", feedback_config, "experiment JSON config")
      ->required();
  feedback->add_option("--out", feedback_out, "output directory")->required();
  feedback->callback(
      [&] { cmd_feedback_eval(feedback_model, feedback_config, feedback_out); });

  std::string simulate_config, simulate_out;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "simulated-detector error-correlation study");
  simulate->add_option("--config", simulate_config, "simulation JSON config")
      ->required();
  simulate->add_option("--out", simulate_out, "output directory")->required();
  simulate->callback([&] { cmd_simulate(simulate_config, simulate_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
