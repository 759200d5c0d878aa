#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <mirror/error.hpp>

// Core geometry: landmark shapes, left/right symmetry maps, the mirror
// back-transform, bounding boxes and error-normalization sizes.

namespace mirror {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend Vec2 operator*(double s, Vec2 a) { return a * s; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// An ordered list of K landmark positions in image coordinates
/// (x right, y down, origin at the top-left corner).
struct Shape {
  std::vector<Vec2> points;

  friend bool operator==(const Shape&, const Shape&) = default;

  std::size_t k() const { return points.size(); }
  Vec2 centroid() const {
    if (points.empty()) raise(Errc::EmptyShape, "centroid of an empty shape");
    Vec2 c{0.0, 0.0};
    for (const Vec2& p : points) c = c + p;
    return c * (1.0 / static_cast<double>(points.size()));
  }
};

/// Identifies one sample's image: its id and pixel dimensions. The width is
/// what the horizontal flip pivots on.
struct ImageMeta {
  std::string sample_id;
  double width = 0.0;
  double height = 0.0;
};

/// Axis-aligned box; `max_side` is the usual normalization size.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double max_side() const { return std::max(width(), height()); }
  Vec2 center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }
};

inline BoundingBox bounding_box(const Shape& shape) {
  if (shape.points.empty())
    raise(Errc::EmptyShape, "bounding box of an empty shape");
  BoundingBox box{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  for (const Vec2& p : shape.points) {
    box.x_min = std::min(box.x_min, p.x);
    box.y_min = std::min(box.y_min, p.y);
    box.x_max = std::max(box.x_max, p.x);
    box.y_max = std::max(box.y_max, p.y);
  }
  return box;
}

/// Landmark index permutation pairing each left landmark with its right
/// counterpart. Must be involutive: applying it twice is the identity, so
/// symmetric fixed points (nose tip, chin, ...) map to themselves.
class SymmetryMap {
 public:
  SymmetryMap() = default;

  /// Validates that `mapping` is an involutive permutation of 0..K-1.
  explicit SymmetryMap(std::vector<std::size_t> mapping)
      : mapping_(std::move(mapping)) {
    const std::size_t k = mapping_.size();
    std::vector<bool> seen(k, false);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = mapping_[i];
      if (j >= k)
        raise(Errc::NotAPermutation,
              "mapping entry " + std::to_string(j) + " out of range for K=" +
                  std::to_string(k));
      if (seen[j])
        raise(Errc::NotAPermutation,
              "mapping hits index " + std::to_string(j) + " twice");
      seen[j] = true;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (mapping_[mapping_[i]] != i)
        raise(Errc::NotInvolutive,
              "mapping is not its own inverse at index " + std::to_string(i));
    }
  }

  /// Build from explicit (left, right) pairs plus self-symmetric indices.
  /// Every index in 0..K-1 must be covered exactly once.
  static SymmetryMap from_pairs(
      std::size_t num_points,
      const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
      const std::vector<std::size_t>& self_symmetric) {
    std::vector<std::size_t> mapping(num_points,
                                     std::numeric_limits<std::size_t>::max());
    std::vector<int> cover(num_points, 0);
    auto put = [&](std::size_t i, std::size_t j) {
      if (i >= num_points)
        raise(Errc::NotAPermutation,
              "index " + std::to_string(i) + " out of range for K=" +
                  std::to_string(num_points));
      mapping[i] = j;
      ++cover[i];
    };
    for (const auto& [a, b] : pairs) {
      put(a, b);
      put(b, a);
    }
    for (std::size_t s : self_symmetric) put(s, s);
    for (std::size_t i = 0; i < num_points; ++i) {
      if (cover[i] != 1)
        raise(Errc::NotAPermutation,
              "index " + std::to_string(i) + " covered " +
                  std::to_string(cover[i]) + " times (want exactly once)");
    }
    return SymmetryMap(std::move(mapping));
  }

  std::size_t k() const { return mapping_.size(); }
  std::size_t operator[](std::size_t i) const { return mapping_[i]; }
  const std::vector<std::size_t>& mapping() const { return mapping_; }

  friend bool operator==(const SymmetryMap& a, const SymmetryMap& b) {
    return a.mapping_ == b.mapping_;
  }

 private:
  std::vector<std::size_t> mapping_;
};

/// Horizontal flip of one coordinate; applying it twice returns x exactly.
inline double mirror_point(double x, double width) { return width - x; }

/// Map a shape detected on the horizontally flipped image back into the
/// original image frame: out_k = (width - x_{m(k)}, y_{m(k)}).
///
/// The same function also produces the flipped-frame shape from an
/// original-frame one; with an involutive map it is its own inverse.
inline Shape mirror_shape(const Shape& shape, const ImageMeta& meta,
                          const SymmetryMap& map) {
  if (shape.k() != map.k())
    raise(Errc::LengthMismatch,
          "shape has K=" + std::to_string(shape.k()) + " but symmetry map K=" +
              std::to_string(map.k()));
  if (shape.points.empty()) raise(Errc::EmptyShape, "mirror of an empty shape");
  Shape out;
  out.points.resize(shape.k());
  for (std::size_t i = 0; i < shape.k(); ++i) {
    const Vec2& src = shape.points[map[i]];
    out.points[i] = {meta.width - src.x, src.y};
  }
  return out;
}

/// How to turn a raw pixel distance into a normalized error.
enum class NormalizationMode {
  BoundingBox,   ///< max side of the reference shape's tight box
  Interocular,   ///< distance between two chosen landmarks of the reference
  FixedValue,    ///< externally supplied constant (e.g. torso height)
};

struct NormalizationSpec {
  NormalizationMode mode = NormalizationMode::BoundingBox;
  std::size_t index_a = 0;  ///< Interocular only
  std::size_t index_b = 0;  ///< Interocular only
  double fixed_value = 0.0; ///< FixedValue only

  static NormalizationSpec bbox() { return {}; }
  static NormalizationSpec interocular(std::size_t a, std::size_t b) {
    NormalizationSpec s;
    s.mode = NormalizationMode::Interocular;
    s.index_a = a;
    s.index_b = b;
    return s;
  }
  static NormalizationSpec fixed(double v) {
    NormalizationSpec s;
    s.mode = NormalizationMode::FixedValue;
    s.fixed_value = v;
    return s;
  }
};

/// Normalization size s for `reference` (usually the ground truth, or the
/// original-image detection when no ground truth exists).
inline double normalization_size(const Shape& reference,
                                 const NormalizationSpec& spec) {
  double s = 0.0;
  switch (spec.mode) {
    case NormalizationMode::BoundingBox:
      s = bounding_box(reference).max_side();
      break;
    case NormalizationMode::Interocular: {
      if (spec.index_a >= reference.k() || spec.index_b >= reference.k())
        raise(Errc::BadConfig,
              "interocular indices (" + std::to_string(spec.index_a) + "," +
                  std::to_string(spec.index_b) + ") out of range for K=" +
                  std::to_string(reference.k()));
      s = distance(reference.points[spec.index_a],
                   reference.points[spec.index_b]);
      break;
    }
    case NormalizationMode::FixedValue:
      s = spec.fixed_value;
      break;
  }
  if (!(s > 0.0) || !std::isfinite(s))
    raise(Errc::ZeroSize, "normalization size must be positive and finite");
  return s;
}

}  // namespace mirror
