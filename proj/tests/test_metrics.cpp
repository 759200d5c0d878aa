// Error metrics: mirror error, alignment error, batch evaluation with
// per-sample failure isolation, per-point statistics, PCK, correlations and
// the sorted error curve. Numeric paths are cross-checked against the
// brute-force oracles.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <mirror/metrics.hpp>
#include <mirror/rng.hpp>
#include <mirror/shape.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace mirror;
using testutil::thrown_code;

namespace {

std::vector<oracle::Pt> to_oracle(const Shape& shape) {
  std::vector<oracle::Pt> pts;
  for (const Vec2& p : shape.points) pts.push_back({p.x, p.y});
  return pts;
}

}  // namespace

TEST_CASE("mirror error on the hand example") {
  // back = (100-86, 5), (100-10, 5) = (14,5), (90,5);
  // distances to the original detection: 4 and 0; mean = 2.
  const SymmetryMap swap(std::vector<std::size_t>{1, 0});
  const ImageMeta meta{"s", 100.0, 100.0};
  const Shape det_original{{{10.0, 5.0}, {90.0, 5.0}}};
  const Shape det_mirror{{{10.0, 5.0}, {86.0, 5.0}}};

  REQUIRE(mirror_error(det_original, det_mirror, meta, swap,
                       NormalizationSpec::fixed(1.0)) == Catch::Approx(2.0));
  REQUIRE(mirror_error(det_original, det_mirror, meta, swap,
                       NormalizationSpec::fixed(80.0)) ==
          Catch::Approx(0.025));
  // The original detection's box normalizes: max side = 80.
  REQUIRE(mirror_error(det_original, det_mirror, meta, swap,
                       NormalizationSpec::bbox()) == Catch::Approx(0.025));

  REQUIRE(thrown_code([&] {
            mirror_error(det_original, Shape{{{1.0, 1.0}}}, meta, swap,
                         NormalizationSpec::bbox());
          }) == Errc::LengthMismatch);
}

TEST_CASE("mirror error vanishes for an equivariant detector") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.next_u64() % 10;
    const double width = rng.uniform(100.0, 1000.0);
    const ImageMeta meta{"t", width, width};
    const SymmetryMap map = testutil::random_symmetry_map(k, rng);
    const Shape det = testutil::random_shape(k, rng, 0.0, width);
    const Shape det_mirror = mirror_shape(det, meta, map);
    REQUIRE(mirror_error(det, det_mirror, meta, map,
                         NormalizationSpec::bbox()) <= 1e-12);
  }
}

TEST_CASE("alignment error hand values") {
  const Shape gt{{{0.0, 0.0}, {4.0, 3.0}}};
  Shape det = gt;
  det.points[0].x += 1.0;
  det.points[1].x += 1.0;
  // distances 1 and 1, gt box max side 4: (1+1)/(2*4) = 0.25.
  REQUIRE(alignment_error(det, gt, NormalizationSpec::bbox()) ==
          Catch::Approx(0.25));
  REQUIRE(alignment_error(det, gt, NormalizationSpec::fixed(2.0)) ==
          Catch::Approx(0.5));
  REQUIRE(thrown_code([&] {
            alignment_error(Shape{{{0.0, 0.0}}}, gt, NormalizationSpec::bbox());
          }) == Errc::LengthMismatch);
}

TEST_CASE("mirror and alignment errors match the oracle") {
  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.next_u64() % 4;  // small instances
    const double width = rng.uniform(100.0, 500.0);
    const ImageMeta meta{"t", width, width};
    const SymmetryMap map = testutil::random_symmetry_map(k, rng);
    const Shape det_o = testutil::random_shape(k, rng, 1.0, width - 1.0);
    const Shape det_m = testutil::random_shape(k, rng, 1.0, width - 1.0);
    const Shape gt = testutil::random_shape(k, rng, 1.0, width - 1.0);

    const double s_fixed = rng.uniform(0.5, 50.0);
    const double got_em = mirror_error(det_o, det_m, meta, map,
                                       NormalizationSpec::fixed(s_fixed));
    const double want_em = oracle::mirror_error(
        to_oracle(det_o), to_oracle(det_m), width, map.mapping(), s_fixed);
    REQUIRE(got_em == Catch::Approx(want_em).epsilon(1e-10));

    const double got_em_box =
        mirror_error(det_o, det_m, meta, map, NormalizationSpec::bbox());
    const double want_em_box =
        oracle::mirror_error(to_oracle(det_o), to_oracle(det_m), width,
                             map.mapping(),
                             oracle::bbox_max_side(to_oracle(det_o)));
    REQUIRE(got_em_box == Catch::Approx(want_em_box).epsilon(1e-10));

    const double got_ea = alignment_error(det_o, gt, NormalizationSpec::bbox());
    const double want_ea = oracle::alignment_error(
        to_oracle(det_o), to_oracle(gt), oracle::bbox_max_side(to_oracle(gt)));
    REQUIRE(got_ea == Catch::Approx(want_ea).epsilon(1e-10));
  }
}

TEST_CASE("evaluate_records isolates failing samples") {
  const SymmetryMap swap(std::vector<std::size_t>{1, 0});
  const ImageMeta meta{"", 100.0, 100.0};

  auto make = [&](const std::string& id) {
    SampleRecord rec;
    rec.sample_id = id;
    rec.det_original = Shape{{{10.0, 5.0}, {90.0, 5.0}}};
    rec.det_mirror = Shape{{{10.0, 5.0}, {86.0, 5.0}}};
    rec.ground_truth = Shape{{{12.0, 5.0}, {90.0, 5.0}}};
    rec.meta = {id, 100.0, 100.0};
    return rec;
  };

  std::vector<SampleRecord> records;
  records.push_back(make("a"));
  records.push_back(make("b"));
  records.back().det_mirror.points.pop_back();  // K mismatch -> must skip
  records.push_back(make("c"));

  const EvaluationResult result =
      evaluate_records(std::move(records), swap, NormalizationSpec::fixed(1.0));
  REQUIRE(result.records.size() == 2);
  REQUIRE(result.records[0].sample_id == "a");
  REQUIRE(result.records[1].sample_id == "c");
  REQUIRE(result.skipped.size() == 1);
  REQUIRE(result.skipped[0].sample_id == "b");
  REQUIRE(result.skipped[0].code == Errc::LengthMismatch);

  const SampleRecord& rec = result.records[0];
  REQUIRE(rec.e_m.has_value());
  REQUIRE(*rec.e_m == Catch::Approx(2.0));
  REQUIRE(rec.e_a.has_value());
  REQUIRE(*rec.e_a == Catch::Approx(1.0));  // distances 2 and 0 over 2 points
  REQUIRE(rec.e_a_mirror.has_value());
  // Mirror-frame ground truth: (100-90,5),(100-12,5) = (10,5),(88,5);
  // mirror detection distances: 0 and 2 -> 1.
  REQUIRE(*rec.e_a_mirror == Catch::Approx(1.0));
}

TEST_CASE("evaluate_records without ground truth fills only e_m") {
  const SymmetryMap swap(std::vector<std::size_t>{1, 0});
  SampleRecord rec;
  rec.sample_id = "x";
  rec.det_original = Shape{{{10.0, 5.0}, {90.0, 5.0}}};
  rec.det_mirror = Shape{{{10.0, 5.0}, {86.0, 5.0}}};
  rec.meta = {"x", 100.0, 100.0};
  const EvaluationResult result = evaluate_records(
      {rec}, swap, NormalizationSpec::bbox());
  REQUIRE(result.records.size() == 1);
  REQUIRE(result.records[0].e_m.has_value());
  REQUIRE_FALSE(result.records[0].e_a.has_value());
  REQUIRE_FALSE(result.records[0].e_a_mirror.has_value());
}

TEST_CASE("per-point statistics use the population convention") {
  // One landmark, two samples with normalized deviations 0 and 2:
  // mean 1, population std 1.
  const SymmetryMap self(std::vector<std::size_t>{0});
  SampleRecord r0;
  r0.sample_id = "0";
  r0.det_original = Shape{{{5.0, 5.0}}};
  r0.det_mirror = Shape{{{95.0, 5.0}}};  // back = (5,5): deviation 0
  r0.meta = {"0", 100.0, 100.0};
  SampleRecord r1 = r0;
  r1.sample_id = "1";
  r1.det_mirror = Shape{{{93.0, 5.0}}};  // back = (7,5): deviation 2

  const PerPointStats stats = per_point_stats(
      {r0, r1}, self, NormalizationSpec::fixed(1.0));
  REQUIRE(stats.n_mirror == 2);
  REQUIRE(stats.n_align == 0);
  REQUIRE(stats.mirror_mean.size() == 1);
  REQUIRE(stats.mirror_mean[0] == Catch::Approx(1.0));
  REQUIRE(stats.mirror_std[0] == Catch::Approx(1.0));
  REQUIRE(stats.align_mean.empty());

  REQUIRE(thrown_code([&] {
            per_point_stats({r0}, self, NormalizationSpec::fixed(1.0));
          }) == Errc::InsufficientData);
}

TEST_CASE("pck hand example and guards") {
  // gt box max side 10, alpha 0.1 -> threshold 1. Landmark 0 off by 0.5
  // (correct), landmark 1 off by 1.5 (incorrect).
  const Shape gt{{{0.0, 0.0}, {10.0, 10.0}}};
  Shape det = gt;
  det.points[0].x += 0.5;
  det.points[1].x += 1.5;
  const PckResult result = pck({det}, {gt}, 0.1);
  REQUIRE(result.n_samples == 1);
  REQUIRE(result.per_point.size() == 2);
  REQUIRE(result.per_point[0] == 1.0);
  REQUIRE(result.per_point[1] == 0.0);
  REQUIRE(result.average == Catch::Approx(0.5));

  // The boundary counts as correct (<=).
  Shape boundary = gt;
  boundary.points[0].x += 1.0;
  REQUIRE(pck({boundary}, {gt}, 0.1).per_point[0] == 1.0);

  REQUIRE(thrown_code([&] { pck({det}, {gt, gt}, 0.1); }) ==
          Errc::LengthMismatch);
  REQUIRE(thrown_code([&] { pck({}, {}, 0.1); }) == Errc::InsufficientData);
  REQUIRE(thrown_code([&] { pck({det}, {gt}, -0.1); }) == Errc::BadConfig);
  const Shape flat{{{1.0, 1.0}, {1.0, 1.0}}};
  REQUIRE(thrown_code([&] { pck({flat}, {flat}, 0.1); }) == Errc::ZeroSize);
}

TEST_CASE("pck matches the oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.next_u64() % 4;
    const std::size_t n = 1 + rng.next_u64() % 20;
    std::vector<Shape> dets, gts;
    std::vector<std::vector<oracle::Pt>> odets, ogts;
    for (std::size_t i = 0; i < n; ++i) {
      const Shape gt = testutil::random_shape(k, rng, 0.0, 50.0);
      Shape det = gt;
      for (Vec2& p : det.points) {
        p.x += rng.uniform(-5.0, 5.0);
        p.y += rng.uniform(-5.0, 5.0);
      }
      gts.push_back(gt);
      dets.push_back(det);
      ogts.push_back(to_oracle(gt));
      odets.push_back(to_oracle(det));
    }
    const double alpha = rng.uniform(0.0, 0.4);
    const PckResult got = pck(dets, gts, alpha);
    const oracle::PckOut want = oracle::pck(odets, ogts, alpha);
    REQUIRE(got.average == Catch::Approx(want.average).margin(1e-12));
    for (std::size_t j = 0; j < k; ++j)
      REQUIRE(got.per_point[j] ==
              Catch::Approx(want.per_point[j]).margin(1e-12));
  }
}

TEST_CASE("pearson correlation") {
  REQUIRE(pearson({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0}) == 0.5);
  REQUIRE(pearson({1.0, 2.0, 3.0}, {3.0, 5.0, 7.0}) == Catch::Approx(1.0));
  REQUIRE(pearson({1.0, 2.0, 3.0}, {-1.0, -2.0, -3.0}) == Catch::Approx(-1.0));

  REQUIRE(thrown_code([] { pearson({1.0, 2.0}, {1.0}); }) ==
          Errc::LengthMismatch);
  REQUIRE(thrown_code([] { pearson({1.0}, {1.0}); }) == Errc::ConstantInput);
  REQUIRE(thrown_code([] { pearson({2.0, 2.0}, {1.0, 3.0}); }) ==
          Errc::ConstantInput);
  REQUIRE(thrown_code([] { pearson({1.0, 3.0}, {2.0, 2.0}); }) ==
          Errc::ConstantInput);
}

TEST_CASE("pearson matches the oracle") {
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 19;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(rng.uniform(-10.0, 10.0));
      ys.push_back(rng.uniform(-10.0, 10.0));
    }
    REQUIRE(pearson(xs, ys) ==
            Catch::Approx(oracle::pearson(xs, ys)).epsilon(1e-10));
  }
}

TEST_CASE("spearman rank correlation") {
  // Any strictly monotone relation has rank correlation exactly 1.
  REQUIRE(spearman({1.0, 2.0, 3.0, 4.0}, {1.0, 8.0, 27.0, 64.0}) == 1.0);
  REQUIRE(spearman({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0}) == 0.5);
  // Ties get averaged ranks: [1, 1, 2] -> [1.5, 1.5, 3].
  REQUIRE(spearman({1.0, 1.0, 2.0}, {1.0, 1.0, 2.0}) == Catch::Approx(1.0));
}

TEST_CASE("sorted error curve orders by alignment error then id") {
  auto rec = [](const std::string& id, double e_a, double e_m) {
    SampleRecord r;
    r.sample_id = id;
    r.e_a = e_a;
    r.e_m = e_m;
    return r;
  };
  const std::vector<CurveRow> rows = sorted_error_curve(
      {rec("sample1", 0.3, 0.5), rec("sample2", 0.1, 0.2),
       rec("sample3", 0.2, 0.9)});
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[0].sample_id == "sample2");
  REQUIRE(rows[1].sample_id == "sample3");
  REQUIRE(rows[2].sample_id == "sample1");
  REQUIRE(rows[0].rank == 1);
  REQUIRE(rows[2].rank == 3);
  REQUIRE(rows[0].e_m == 0.2);

  const std::vector<CurveRow> tied =
      sorted_error_curve({rec("b", 0.2, 0.0), rec("a", 0.2, 0.0)});
  REQUIRE(tied[0].sample_id == "a");
  REQUIRE(tied[1].sample_id == "b");

  SampleRecord missing;
  missing.sample_id = "x";
  missing.e_m = 0.1;
  REQUIRE(thrown_code([&] { sorted_error_curve({missing}); }) ==
          Errc::MissingError);
}
