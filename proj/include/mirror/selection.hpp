#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include <mirror/error.hpp>
#include <mirror/metrics.hpp>

// Difficult-sample selection: pick the top-M samples by an error key and
// measure how consistently different keys/methods pick the same samples.

namespace mirror {

enum class ErrorKey { MirrorError, AlignmentError };

inline const char* error_key_name(ErrorKey key) {
  return key == ErrorKey::MirrorError ? "em" : "ea";
}

inline double record_error(const SampleRecord& rec, ErrorKey key) {
  const std::optional<double>& v =
      key == ErrorKey::MirrorError ? rec.e_m : rec.e_a;
  if (!v)
    raise(Errc::MissingError, "record " + rec.sample_id + " lacks " +
                                  error_key_name(key) + " value");
  return *v;
}

/// The M sample ids with the largest value of one error key.
struct SelectionSet {
  std::string method_id;
  ErrorKey key = ErrorKey::MirrorError;
  std::vector<std::string> sample_ids;  ///< descending value; ties by id
  std::size_t m = 0;
};

/// Ids of the M largest `key` values, sorted by value descending with ties
/// broken by sample_id ascending so the boundary is deterministic.
inline SelectionSet select_top_m(const std::vector<SampleRecord>& records,
                                 ErrorKey key, std::size_t m,
                                 const std::string& method_id = {}) {
  if (m > records.size())
    raise(Errc::MTooLarge, "top-M of " + std::to_string(m) + " from " +
                               std::to_string(records.size()) + " records");
  std::vector<std::pair<double, const std::string*>> ranked;
  ranked.reserve(records.size());
  for (const SampleRecord& rec : records)
    ranked.emplace_back(record_error(rec, key), &rec.sample_id);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return *a.second < *b.second;
            });
  SelectionSet set;
  set.method_id = method_id;
  set.key = key;
  set.m = m;
  set.sample_ids.reserve(m);
  for (std::size_t i = 0; i < m; ++i) set.sample_ids.push_back(*ranked[i].second);
  return set;
}

/// Fraction of common samples between two equal-size selections:
/// rho = |S1 and S2| / M. Chance level for random selections is M/N.
inline double consistency(const SelectionSet& s1, const SelectionSet& s2) {
  if (s1.m == 0 || s1.m != s2.m)
    raise(Errc::MMismatch, "selection sizes " + std::to_string(s1.m) +
                               " vs " + std::to_string(s2.m) +
                               " (need equal and > 0)");
  std::unordered_set<std::string> first(s1.sample_ids.begin(),
                                        s1.sample_ids.end());
  std::size_t common = 0;
  for (const std::string& id : s2.sample_ids) common += first.count(id);
  return static_cast<double>(common) / static_cast<double>(s1.m);
}

enum class ConsistencyMode { EmVsEa, EmVsEm, EaVsEa };

inline const char* consistency_mode_name(ConsistencyMode mode) {
  switch (mode) {
    case ConsistencyMode::EmVsEa: return "em-ea";
    case ConsistencyMode::EmVsEm: return "em-em";
    case ConsistencyMode::EaVsEa: return "ea-ea";
  }
  return "?";
}

struct ConsistencyMatrix {
  std::vector<std::string> method_ids;
  ConsistencyMode mode = ConsistencyMode::EmVsEm;
  std::size_t m = 0;
  std::size_t n = 0;                ///< universe size
  std::vector<double> values;       ///< row-major, method_ids^2
};

/// Pairwise consistency between methods' top-M selections. Entry (i, j)
/// compares method i selected by the row key with method j selected by the
/// column key (row e_m vs column e_a under EmVsEa).
inline ConsistencyMatrix consistency_matrix(
    const std::vector<std::pair<std::string, std::vector<SampleRecord>>>&
        methods,
    ConsistencyMode mode, std::size_t m) {
  if (methods.empty())
    raise(Errc::InsufficientData, "consistency matrix of zero methods");

  // All methods must rank the same sample universe.
  std::vector<std::string> universe;
  for (const SampleRecord& rec : methods.front().second)
    universe.push_back(rec.sample_id);
  std::sort(universe.begin(), universe.end());
  for (const auto& [id, records] : methods) {
    std::vector<std::string> ids;
    ids.reserve(records.size());
    for (const SampleRecord& rec : records) ids.push_back(rec.sample_id);
    std::sort(ids.begin(), ids.end());
    if (ids != universe)
      raise(Errc::UniverseMismatch,
            "method " + id + " ranks a different sample universe");
  }

  const ErrorKey row_key =
      mode == ConsistencyMode::EaVsEa ? ErrorKey::AlignmentError
                                      : ErrorKey::MirrorError;
  const ErrorKey col_key =
      mode == ConsistencyMode::EmVsEm ? ErrorKey::MirrorError
                                      : ErrorKey::AlignmentError;

  std::vector<SelectionSet> row_sets, col_sets;
  for (const auto& [id, records] : methods) {
    row_sets.push_back(select_top_m(records, row_key, m, id));
    col_sets.push_back(select_top_m(records, col_key, m, id));
  }

  ConsistencyMatrix matrix;
  matrix.mode = mode;
  matrix.m = m;
  matrix.n = universe.size();
  for (const auto& [id, records] : methods) matrix.method_ids.push_back(id);
  matrix.values.resize(methods.size() * methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i)
    for (std::size_t j = 0; j < methods.size(); ++j)
      matrix.values[i * methods.size() + j] =
          consistency(row_sets[i], col_sets[j]);
  return matrix;
}

}  // namespace mirror
