#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <mirror/shape.hpp>

// Built-in symmetry maps for common landmark layouts, plus the 14-point
// template used by the synthetic experiments.

namespace mirror {

/// 68-point face layout (jaw 0-16, brows 17-26, nose 27-35, eyes 36-47,
/// mouth 48-67). Midline points map to themselves.
inline SymmetryMap face68_symmetry() {
  return SymmetryMap::from_pairs(
      68,
      {// jaw
       {0, 16}, {1, 15}, {2, 14}, {3, 13}, {4, 12}, {5, 11}, {6, 10}, {7, 9},
       // brows
       {17, 26}, {18, 25}, {19, 24}, {20, 23}, {21, 22},
       // nostrils
       {31, 35}, {32, 34},
       // eyes
       {36, 45}, {37, 44}, {38, 43}, {39, 42}, {40, 47}, {41, 46},
       // outer mouth
       {48, 54}, {49, 53}, {50, 52}, {55, 59}, {56, 58},
       // inner mouth
       {60, 64}, {61, 63}, {65, 67}},
      {8, 27, 28, 29, 30, 33, 51, 57, 62, 66});
}

/// 14-point body layout (ankles/knees/hips 0-5, wrists/elbows/shoulders
/// 6-11, neck 12, head top 13), right side first.
inline SymmetryMap body14_symmetry() {
  return SymmetryMap::from_pairs(
      14, {{0, 5}, {1, 4}, {2, 3}, {6, 11}, {7, 10}, {8, 9}}, {12, 13});
}

/// Symmetry map of the synthetic 14-point template: six left/right pairs
/// (even = left, odd = right) plus two midline points.
inline SymmetryMap synth14_symmetry() {
  return SymmetryMap::from_pairs(
      14, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {10, 11}}, {12, 13});
}

/// Face-like 14-point template in canonical units (centered, max side ~1).
/// Landmarks 0/1 are the eye pair used for inter-ocular normalization.
inline Shape synth14_template() {
  return Shape{{
      {-0.25, -0.20},  // 0 left eye
      {0.25, -0.20},   // 1 right eye
      {-0.28, -0.38},  // 2 left brow
      {0.28, -0.38},   // 3 right brow
      {-0.22, 0.26},   // 4 left mouth corner
      {0.22, 0.26},    // 5 right mouth corner
      {-0.10, 0.02},   // 6 left nostril
      {0.10, 0.02},    // 7 right nostril
      {-0.42, 0.10},   // 8 left jaw
      {0.42, 0.10},    // 9 right jaw
      {-0.20, 0.45},   // 10 left chin side
      {0.20, 0.45},    // 11 right chin side
      {0.00, 0.08},    // 12 nose tip
      {0.00, 0.50},    // 13 chin
  }};
}

inline std::vector<std::string> symmetry_preset_names() {
  return {"face68", "body14", "synth14"};
}

/// Look up a built-in symmetry map by name.
inline std::optional<SymmetryMap> symmetry_preset(std::string_view name) {
  if (name == "face68") return face68_symmetry();
  if (name == "body14") return body14_symmetry();
  if (name == "synth14") return synth14_symmetry();
  return std::nullopt;
}

}  // namespace mirror
