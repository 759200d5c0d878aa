// File formats: numeric round-trips, landmark/width CSV parsing with precise
// line diagnostics, symmetry-map JSON, normalization specs, the versioned
// binary model file, and the report renderers.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <mirror/io.hpp>
#include <mirror/presets.hpp>
#include <mirror/rng.hpp>

#include "test_util.hpp"

using namespace mirror;
using testutil::TempDir;
using testutil::thrown_code;

TEST_CASE("format_double round-trips bit for bit") {
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    double value = 0.0;
    switch (i % 4) {
      case 0: value = rng.uniform(-1.0, 1.0); break;
      case 1: value = rng.uniform(-1e12, 1e12); break;
      case 2: value = rng.normal() * 1e-9; break;
      case 3: value = std::ldexp(rng.uniform(0.5, 1.0), static_cast<int>(rng.next_u64() % 120) - 60); break;
    }
    const std::string text = format_double(value);
    REQUIRE(parse_double(text, 1) == value);
  }
  REQUIRE(format_double(1.0) == "1");
  REQUIRE(format_double(0.5) == "0.5");
  REQUIRE(format_double(-0.025) == "-0.025");

  REQUIRE(thrown_code([] { parse_double("abc", 3); }) == Errc::MalformedRow);
  REQUIRE(thrown_code([] { parse_double("1.5x", 3); }) == Errc::MalformedRow);
  REQUIRE(thrown_code([] { parse_double("", 3); }) == Errc::MalformedRow);
}

TEST_CASE("text file round-trip and errors") {
  TempDir dir;
  const auto path = dir.path / "blob.bin";
  const std::string content = std::string("line\n") + '\0' + "\r\nafter";
  write_text_file(path, content);
  REQUIRE(read_text_file(path) == content);

  REQUIRE(thrown_code([&] { read_text_file(dir.path / "missing.txt"); }) ==
          Errc::IoError);
  REQUIRE(thrown_code([&] {
            write_text_file(dir.path / "no_such_dir" / "x.txt", "y");
          }) == Errc::IoError);
}

TEST_CASE("split_lines tolerates CRLF and missing final newline") {
  const std::vector<std::string> lines = split_lines("a\r\nb\nc");
  REQUIRE(lines == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(split_lines("").empty());
  REQUIRE(split_lines("x\n") == std::vector<std::string>{"x"});
  REQUIRE(split_fields("a,b,,c") ==
          std::vector<std::string>{"a", "b", "", "c"});
  REQUIRE(split_fields("") == std::vector<std::string>{""});
}

TEST_CASE("parse_landmarks happy path with and without header") {
  TempDir dir;
  const auto path = dir.path / "marks.csv";
  write_text_file(path,
                  "sample_id,x0,y0,x1,y1\n"
                  "img1,1.5,2,3,4\n"
                  "img2,5,6,7,8\n");
  const std::vector<LandmarkRow> rows = parse_landmarks(path);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].sample_id == "img1");
  REQUIRE(rows[0].shape.k() == 2);
  REQUIRE(rows[0].shape.points[0].x == 1.5);
  REQUIRE(rows[1].shape.points[1].y == 8.0);

  write_text_file(path, "img1,1,2,3,4\n");  // headerless
  REQUIRE(parse_landmarks(path).size() == 1);

  write_text_file(path, "img1,1,2\r\nimg2,3,4\r\n");  // CRLF, K=1
  const std::vector<LandmarkRow> crlf = parse_landmarks(path);
  REQUIRE(crlf.size() == 2);
  REQUIRE(crlf[1].shape.points[0].y == 4.0);
}

TEST_CASE("parse_landmarks rejects malformed rows with line numbers") {
  TempDir dir;
  const auto path = dir.path / "marks.csv";

  write_text_file(path, "sample_id,x0,y0\nimg1,1,2,3\n");  // even fields
  try {
    parse_landmarks(path);
    FAIL("expected a malformed-row failure");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::MalformedRow);
    REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
  }

  write_text_file(path, "img1\n");
  REQUIRE(thrown_code([&] { parse_landmarks(path); }) == Errc::MalformedRow);

  write_text_file(path, "img1,1,2\nimg2,1,2,3,4\n");
  REQUIRE(thrown_code([&] { parse_landmarks(path); }) == Errc::InconsistentK);

  write_text_file(path, "img1,1,2\nimg1,3,4\n");
  REQUIRE(thrown_code([&] { parse_landmarks(path); }) == Errc::DuplicateId);

  write_text_file(path, "img1,nan,2\n");
  REQUIRE(thrown_code([&] { parse_landmarks(path); }) == Errc::MalformedRow);

  write_text_file(path, "img1,1,oops\n");
  REQUIRE(thrown_code([&] { parse_landmarks(path); }) == Errc::MalformedRow);

  write_text_file(path, ",1,2\n");  // empty id
  REQUIRE(thrown_code([&] { parse_landmarks(path); }) == Errc::MalformedRow);

  write_text_file(path, "img1,1,2\n");
  REQUIRE(thrown_code([&] { parse_landmarks(path, 2); }) ==
          Errc::InconsistentK);
}

TEST_CASE("render_landmarks round-trips exactly") {
  Rng rng(102);
  std::vector<LandmarkRow> rows;
  for (int i = 0; i < 5; ++i)
    rows.push_back({"id" + std::to_string(i), testutil::random_shape(3, rng)});

  TempDir dir;
  const auto path = dir.path / "marks.csv";
  write_landmarks(path, rows);
  const std::vector<LandmarkRow> back = parse_landmarks(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(back[i].sample_id == rows[i].sample_id);
    REQUIRE(back[i].shape == rows[i].shape);  // bitwise via to_chars
  }

  REQUIRE(render_landmarks({}) == "sample_id\n");
}

TEST_CASE("parse_widths") {
  TempDir dir;
  const auto path = dir.path / "widths.csv";
  write_text_file(path, "sample_id,width\nimg1,640\nimg2,512.5\n");
  const std::map<std::string, double> widths = parse_widths(path);
  REQUIRE(widths.size() == 2);
  REQUIRE(widths.at("img1") == 640.0);
  REQUIRE(widths.at("img2") == 512.5);

  write_text_file(path, "img1,640\nimg1,512\n");
  REQUIRE(thrown_code([&] { parse_widths(path); }) == Errc::DuplicateId);
  write_text_file(path, "img1,0\n");
  REQUIRE(thrown_code([&] { parse_widths(path); }) == Errc::MalformedRow);
  write_text_file(path, "img1,-5\n");
  REQUIRE(thrown_code([&] { parse_widths(path); }) == Errc::MalformedRow);
  write_text_file(path, "img1,640,9\n");
  REQUIRE(thrown_code([&] { parse_widths(path); }) == Errc::MalformedRow);
  write_text_file(path, "img1,wide\n");
  REQUIRE(thrown_code([&] { parse_widths(path); }) == Errc::MalformedRow);
}

TEST_CASE("symmetry map files") {
  TempDir dir;
  const auto path = dir.path / "map.json";
  write_text_file(path, R"({"num_points": 4,
                            "pairs": [[0, 3], [1, 2]],
                            "self": []})");
  const SymmetryMap map = load_symmetry_map(path);
  REQUIRE(map.k() == 4);
  REQUIRE(map[0] == 3);
  REQUIRE(map[1] == 2);

  write_text_file(path, R"({"pairs": [], "self": [0]})");  // missing key
  REQUIRE(thrown_code([&] { load_symmetry_map(path); }) == Errc::BadConfig);

  write_text_file(path, R"({"num_points": 2, "pairs": [[1, 0]], "self": []})");
  REQUIRE(thrown_code([&] { load_symmetry_map(path); }) == Errc::BadConfig);

  write_text_file(path, R"({"num_points": 3, "pairs": [[0, 1]], "self": []})");
  REQUIRE(thrown_code([&] { load_symmetry_map(path); }) ==
          Errc::NotAPermutation);  // index 2 uncovered

  write_text_file(path, "{ not json");
  REQUIRE(thrown_code([&] { load_symmetry_map(path); }) == Errc::BadConfig);

  write_text_file(path, R"({"num_points": 2, "pairs": "oops", "self": []})");
  REQUIRE(thrown_code([&] { load_symmetry_map(path); }) == Errc::BadConfig);
}

TEST_CASE("render_symmetry_map round-trips the presets") {
  TempDir dir;
  for (const std::string& name : symmetry_preset_names()) {
    const SymmetryMap original = *symmetry_preset(name);
    const auto path = dir.path / (name + ".json");
    write_text_file(path, render_symmetry_map(original));
    REQUIRE(load_symmetry_map(path) == original);
  }
}

TEST_CASE("resolve_symmetry accepts presets and files") {
  REQUIRE(resolve_symmetry("face68") == face68_symmetry());
  REQUIRE(resolve_symmetry("synth14") == synth14_symmetry());

  TempDir dir;
  const auto path = dir.path / "custom.json";
  write_text_file(path, render_symmetry_map(body14_symmetry()));
  REQUIRE(resolve_symmetry(path.string()) == body14_symmetry());

  try {
    resolve_symmetry("no-such-thing");
    FAIL("expected a config failure");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::BadConfig);
    REQUIRE(std::string(e.what()).find("face68") != std::string::npos);
  }
}

TEST_CASE("normalization specs parse and print") {
  REQUIRE(parse_norm_spec("bbox").mode == NormalizationMode::BoundingBox);
  const NormalizationSpec io = parse_norm_spec("interocular:36,45");
  REQUIRE(io.mode == NormalizationMode::Interocular);
  REQUIRE(io.index_a == 36);
  REQUIRE(io.index_b == 45);
  const NormalizationSpec fixed = parse_norm_spec("fixed:2.5");
  REQUIRE(fixed.mode == NormalizationMode::FixedValue);
  REQUIRE(fixed.fixed_value == 2.5);

  for (const std::string text : {"bbox", "interocular:0,1", "fixed:2.5"})
    REQUIRE(norm_spec_name(parse_norm_spec(text)) == text);

  REQUIRE(thrown_code([] { parse_norm_spec("interocular:36"); }) ==
          Errc::BadConfig);
  REQUIRE(thrown_code([] { parse_norm_spec("interocular:a,b"); }) ==
          Errc::BadConfig);
  REQUIRE(thrown_code([] { parse_norm_spec("fixed:0"); }) == Errc::BadConfig);
  REQUIRE(thrown_code([] { parse_norm_spec("fixed:-1"); }) == Errc::BadConfig);
  REQUIRE(thrown_code([] { parse_norm_spec("euclidean"); }) ==
          Errc::BadConfig);
}

TEST_CASE("cascade model file round-trips bit-exactly") {
  const CascadeModel& model = testutil::small_model();
  TempDir dir;
  const auto path = dir.path / "model.bin";
  save_cascade_model(path, model);
  const std::string bytes = read_text_file(path);

  const CascadeModel loaded = load_cascade_model(path);
  REQUIRE(loaded.k() == model.k());
  REQUIRE(loaded.n_stages() == model.n_stages());
  REQUIRE(loaded.train_seed == model.train_seed);
  REQUIRE(loaded.ridge_lambda == model.ridge_lambda);
  REQUIRE(loaded.trained_with_mirror_augmentation ==
          model.trained_with_mirror_augmentation);
  REQUIRE(loaded.shape_model.mean_shape == model.shape_model.mean_shape);
  REQUIRE(loaded.shape_model.basis == model.shape_model.basis);
  for (std::size_t t = 0; t < model.n_stages(); ++t) {
    REQUIRE(loaded.stages[t].weights == model.stages[t].weights);
    REQUIRE(loaded.stages[t].intercept == model.stages[t].intercept);
  }

  // Saving the loaded model reproduces the file byte for byte.
  const auto path2 = dir.path / "model2.bin";
  save_cascade_model(path2, loaded);
  REQUIRE(read_text_file(path2) == bytes);

  // Loaded and original models infer identically.
  const Scene scene = testutil::make_test_scenes(1, 0.2, 0.2, "mio", 111)[0];
  InitConfig init;
  init.seed = 112;
  REQUIRE(run_multi_init(loaded, scene, init).shape ==
          run_multi_init(model, scene, init).shape);
}

TEST_CASE("cascade model loading rejects damaged files") {
  const CascadeModel& model = testutil::small_model();
  TempDir dir;
  const auto path = dir.path / "model.bin";
  save_cascade_model(path, model);
  const std::string bytes = read_text_file(path);

  const auto broken = dir.path / "broken.bin";

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  write_text_file(broken, bad_magic);
  REQUIRE(thrown_code([&] { load_cascade_model(broken); }) == Errc::IoError);

  write_text_file(broken, bytes.substr(0, bytes.size() - 1));
  REQUIRE(thrown_code([&] { load_cascade_model(broken); }) == Errc::IoError);

  write_text_file(broken, bytes + 'x');
  REQUIRE(thrown_code([&] { load_cascade_model(broken); }) == Errc::IoError);

  std::string bad_version = bytes;
  bad_version[8] = 9;  // format version is the first u64 after the magic
  write_text_file(broken, bad_version);
  REQUIRE(thrown_code([&] { load_cascade_model(broken); }) == Errc::IoError);

  REQUIRE(thrown_code([&] {
            load_cascade_model(dir.path / "missing.bin");
          }) == Errc::IoError);
}

TEST_CASE("report header and csv quoting") {
  const std::string header = report_header({{"command", "evaluate"},
                                            {"norm", "bbox"}});
  REQUIRE(header ==
          "# mirroreval " + std::string(version_string) +
              "\n# command=evaluate\n# norm=bbox\n");

  REQUIRE(csv_quote("plain") == "plain");
  REQUIRE(csv_quote("a,b") == "\"a,b\"");
  REQUIRE(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  REQUIRE(csv_quote("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("per-sample csv renders and parses back") {
  std::vector<SampleRecord> records(2);
  records[0].sample_id = "a";
  records[0].e_m = 0.25;
  records[0].e_a = 0.125;
  records[0].e_a_mirror = 0.5;
  records[1].sample_id = "b";
  records[1].e_m = 0.0625;  // no ground truth: e_a fields stay empty

  const std::string csv = render_per_sample_csv(records, "# h\n");
  REQUIRE(csv ==
          "# h\n"
          "sample_id,e_m,e_a,e_a_mirror\n"
          "a,0.25,0.125,0.5\n"
          "b,0.0625,,\n");

  TempDir dir;
  const auto path = dir.path / "per_sample.csv";
  write_text_file(path, csv);
  const std::vector<SampleRecord> back = parse_per_sample_csv(path);
  REQUIRE(back.size() == 2);
  REQUIRE(back[0].e_m == 0.25);
  REQUIRE(back[0].e_a == 0.125);
  REQUIRE(back[1].e_m == 0.0625);
  REQUIRE_FALSE(back[1].e_a.has_value());
  REQUIRE_FALSE(back[1].e_a_mirror.has_value());

  write_text_file(path, "sample_id,e_m,e_a,e_a_mirror\na,1,2\n");
  REQUIRE(thrown_code([&] { parse_per_sample_csv(path); }) ==
          Errc::MalformedRow);
  write_text_file(path, "a,1,2,3\na,4,5,6\n");
  REQUIRE(thrown_code([&] { parse_per_sample_csv(path); }) ==
          Errc::DuplicateId);
}

TEST_CASE("skipped, curve, selection and matrix renderers") {
  const std::vector<SkippedSample> skipped = {
      {"img,9", Errc::LengthMismatch, "detail"}};
  REQUIRE(render_skipped_csv(skipped, "") ==
          "sample_id,category,message\n\"img,9\",LengthMismatch,detail\n");
  REQUIRE(render_skipped_csv({}, "") == "sample_id,category,message\n");

  const std::vector<CurveRow> curve = {{1, "a", 0.5, 0.25}};
  REQUIRE(render_curve_csv(curve, "") ==
          "rank,sample_id,e_a,e_m\n1,a,0.5,0.25\n");

  SelectionSet set;
  set.sample_ids = {"b", "a"};
  REQUIRE(render_selection(set, "") == "b\na\n");

  ConsistencyMatrix matrix;
  matrix.method_ids = {"d1", "d2"};
  matrix.values = {1.0, 0.5, 0.25, 1.0};
  REQUIRE(render_matrix_csv(matrix, "") ==
          "method,d1,d2\nd1,1,0.5\nd2,0.25,1\n");

  REQUIRE(render_summary({{"command", "x"}}, {{"n", "3"}, {"r", "0.5"}}) ==
          "# mirroreval " + std::string(version_string) +
              "\n# command=x\nn=3\nr=0.5\n");
}
