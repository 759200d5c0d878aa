#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include <mirror/cascade.hpp>
#include <mirror/error.hpp>
#include <mirror/experiment.hpp>
#include <mirror/metrics.hpp>
#include <mirror/presets.hpp>
#include <mirror/selection.hpp>
#include <mirror/shape.hpp>
#include <mirror/version.hpp>

// File formats and report emission. All numeric output goes through
// std::to_chars (shortest round-trip form, locale-independent) so that
// identical inputs produce byte-identical reports on every run.

namespace mirror {

// ---------------------------------------------------------------------------
// Numbers
// ---------------------------------------------------------------------------

inline std::string format_double(double value) {
  std::array<char, 32> buffer;
  const auto result =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

inline double parse_double(std::string_view text, std::size_t line_number) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last)
    raise(Errc::MalformedRow, "line " + std::to_string(line_number) +
                                  ": not a number: '" + std::string(text) +
                                  "'");
  return value;
}

// ---------------------------------------------------------------------------
// Plain-text files
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    raise(Errc::IoError, "cannot open " + path.string() + " for reading");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) raise(Errc::IoError, "read failed on " + path.string());
  return content;
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    raise(Errc::IoError, "cannot open " + path.string() + " for writing");
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) raise(Errc::IoError, "write failed on " + path.string());
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size())
        lines.emplace_back(text.substr(start));
      break;
    }
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// ---------------------------------------------------------------------------
// Landmark files: sample_id,x0,y0,...,x{K-1},y{K-1} with a header row
// ---------------------------------------------------------------------------

struct LandmarkRow {
  std::string sample_id;
  Shape shape;
};

inline std::vector<LandmarkRow> parse_landmarks(
    const std::filesystem::path& path,
    std::optional<std::size_t> expected_k = std::nullopt) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  std::vector<LandmarkRow> rows;
  std::unordered_set<std::string> seen;
  std::optional<std::size_t> k = expected_k;
  bool saw_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t line_number = i + 1;
    if (line.empty()) continue;
    if (!saw_header && line.rfind("sample_id", 0) == 0) {
      saw_header = true;
      continue;
    }
    saw_header = true;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() < 3 || fields.size() % 2 == 0)
      raise(Errc::MalformedRow,
            "line " + std::to_string(line_number) + ": expected sample_id "
            "plus x,y pairs, got " + std::to_string(fields.size()) +
            " fields");
    const std::size_t row_k = (fields.size() - 1) / 2;
    if (!k) k = row_k;
    if (row_k != *k)
      raise(Errc::InconsistentK,
            "line " + std::to_string(line_number) + ": K=" +
                std::to_string(row_k) + " but earlier rows have K=" +
                std::to_string(*k));
    LandmarkRow row;
    row.sample_id = fields[0];
    if (row.sample_id.empty())
      raise(Errc::MalformedRow,
            "line " + std::to_string(line_number) + ": empty sample_id");
    if (!seen.insert(row.sample_id).second)
      raise(Errc::DuplicateId, "line " + std::to_string(line_number) +
                                   ": duplicate sample_id '" + row.sample_id +
                                   "'");
    row.shape.points.reserve(row_k);
    for (std::size_t p = 0; p < row_k; ++p) {
      const double x = parse_double(fields[1 + 2 * p], line_number);
      const double y = parse_double(fields[2 + 2 * p], line_number);
      if (!std::isfinite(x) || !std::isfinite(y))
        raise(Errc::MalformedRow,
              "line " + std::to_string(line_number) + ": non-finite coordinate");
      row.shape.points.push_back({x, y});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string render_landmarks(const std::vector<LandmarkRow>& rows) {
  std::string out = "sample_id";
  const std::size_t k = rows.empty() ? 0 : rows.front().shape.k();
  for (std::size_t p = 0; p < k; ++p) {
    out += ",x" + std::to_string(p);
    out += ",y" + std::to_string(p);
  }
  out += '\n';
  for (const LandmarkRow& row : rows) {
    out += row.sample_id;
    for (const Vec2& p : row.shape.points) {
      out += ',';
      out += format_double(p.x);
      out += ',';
      out += format_double(p.y);
    }
    out += '\n';
  }
  return out;
}

inline void write_landmarks(const std::filesystem::path& path,
                            const std::vector<LandmarkRow>& rows) {
  write_text_file(path, render_landmarks(rows));
}

/// Two-column file: sample_id,width. Header row optional.
inline std::map<std::string, double> parse_widths(
    const std::filesystem::path& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  std::map<std::string, double> widths;
  bool saw_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t line_number = i + 1;
    if (line.empty()) continue;
    if (!saw_header && line.rfind("sample_id", 0) == 0) {
      saw_header = true;
      continue;
    }
    saw_header = true;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 2)
      raise(Errc::MalformedRow, "line " + std::to_string(line_number) +
                                    ": expected sample_id,width");
    const double width = parse_double(fields[1], line_number);
    if (!(width > 0.0) || !std::isfinite(width))
      raise(Errc::MalformedRow, "line " + std::to_string(line_number) +
                                    ": width must be positive and finite");
    if (!widths.emplace(fields[0], width).second)
      raise(Errc::DuplicateId, "line " + std::to_string(line_number) +
                                   ": duplicate sample_id '" + fields[0] + "'");
  }
  return widths;
}

// ---------------------------------------------------------------------------
// Symmetry map files: {"num_points": K, "pairs": [[i,j],...], "self": [...]}
// ---------------------------------------------------------------------------

inline SymmetryMap load_symmetry_map(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::BadConfig, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("num_points") ||
      !doc.contains("pairs") || !doc.contains("self"))
    raise(Errc::BadConfig,
          path.string() + ": need object with num_points, pairs, self");
  try {
    const auto num_points = doc.at("num_points").get<std::size_t>();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& entry : doc.at("pairs")) {
      if (!entry.is_array() || entry.size() != 2)
        raise(Errc::BadConfig, path.string() + ": each pair must be [i, j]");
      const auto a = entry.at(0).get<std::size_t>();
      const auto b = entry.at(1).get<std::size_t>();
      if (a >= b)
        raise(Errc::BadConfig,
              path.string() + ": pairs must satisfy i < j, got [" +
                  std::to_string(a) + ", " + std::to_string(b) + "]");
      pairs.emplace_back(a, b);
    }
    std::vector<std::size_t> self;
    for (const auto& entry : doc.at("self"))
      self.push_back(entry.get<std::size_t>());
    return SymmetryMap::from_pairs(num_points, pairs, self);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::BadConfig, path.string() + ": " + e.what());
  }
}

inline std::string render_symmetry_map(const SymmetryMap& map) {
  nlohmann::json doc;
  doc["num_points"] = map.k();
  nlohmann::json pairs = nlohmann::json::array();
  nlohmann::json self = nlohmann::json::array();
  for (std::size_t i = 0; i < map.k(); ++i) {
    if (map[i] == i) self.push_back(i);
    else if (i < map[i]) pairs.push_back({i, map[i]});
  }
  doc["pairs"] = std::move(pairs);
  doc["self"] = std::move(self);
  return doc.dump(2) + "\n";
}

/// A symmetry argument is either a built-in preset name or a file path.
inline SymmetryMap resolve_symmetry(const std::string& spec) {
  if (auto preset = symmetry_preset(spec)) return *preset;
  std::error_code ec;
  if (std::filesystem::exists(spec, ec)) return load_symmetry_map(spec);
  std::string names;
  for (const std::string& n : symmetry_preset_names()) {
    if (!names.empty()) names += ", ";
    names += n;
  }
  raise(Errc::BadConfig, "'" + spec + "' is neither a preset (" + names +
                             ") nor an existing file");
}

/// Parse "bbox", "interocular:i,j" or "fixed:v".
inline NormalizationSpec parse_norm_spec(const std::string& text) {
  if (text == "bbox") return NormalizationSpec::bbox();
  if (text.rfind("interocular:", 0) == 0) {
    const std::string rest = text.substr(12);
    const std::size_t comma = rest.find(',');
    if (comma == std::string::npos)
      raise(Errc::BadConfig, "expected interocular:i,j in '" + text + "'");
    std::size_t a = 0, b = 0;
    const auto ra = std::from_chars(rest.data(), rest.data() + comma, a);
    const auto rb = std::from_chars(rest.data() + comma + 1,
                                    rest.data() + rest.size(), b);
    if (ra.ec != std::errc{} || ra.ptr != rest.data() + comma ||
        rb.ec != std::errc{} || rb.ptr != rest.data() + rest.size())
      raise(Errc::BadConfig, "bad landmark indices in '" + text + "'");
    return NormalizationSpec::interocular(a, b);
  }
  if (text.rfind("fixed:", 0) == 0) {
    const std::string rest = text.substr(6);
    const double v = parse_double(rest, 0);
    if (!(v > 0.0))
      raise(Errc::BadConfig, "fixed normalization must be positive");
    return NormalizationSpec::fixed(v);
  }
  raise(Errc::BadConfig,
        "unknown normalization '" + text +
            "' (expected bbox, interocular:i,j or fixed:v)");
}

inline std::string norm_spec_name(const NormalizationSpec& spec) {
  switch (spec.mode) {
    case NormalizationMode::BoundingBox: return "bbox";
    case NormalizationMode::Interocular:
      return "interocular:" + std::to_string(spec.index_a) + "," +
             std::to_string(spec.index_b);
    case NormalizationMode::FixedValue:
      return "fixed:" + format_double(spec.fixed_value);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Cascade model file: versioned little-endian binary, bit-exact round-trip
// ---------------------------------------------------------------------------

namespace detail {

constexpr char kModelMagic[8] = {'M', 'E', 'V', 'C', 'S', 'C', 'D', '\n'};
constexpr std::uint64_t kModelFormatVersion = 1;

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string origin)
      : data_(data), origin_(std::move(origin)) {}

  std::uint64_t u64() {
    if (pos_ + 8 > data_.size())
      raise(Errc::IoError, origin_ + ": truncated model file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  void expect_magic() {
    if (pos_ + sizeof(kModelMagic) > data_.size() ||
        !std::equal(kModelMagic, kModelMagic + sizeof(kModelMagic),
                    data_.begin() + static_cast<std::ptrdiff_t>(pos_)))
      raise(Errc::IoError, origin_ + ": not a cascade model file");
    pos_ += sizeof(kModelMagic);
  }

  void expect_end() {
    if (pos_ != data_.size())
      raise(Errc::IoError, origin_ + ": trailing bytes after model data");
  }

 private:
  std::string_view data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline void save_cascade_model(const std::filesystem::path& path,
                               const CascadeModel& model) {
  std::string out;
  out.append(detail::kModelMagic, sizeof(detail::kModelMagic));
  detail::put_u64(out, detail::kModelFormatVersion);
  detail::put_u64(out, model.train_seed);
  detail::put_u64(out, model.trained_with_mirror_augmentation ? 1 : 0);
  detail::put_f64(out, model.ridge_lambda);

  const std::size_t k = model.k();
  const std::size_t comps = model.shape_model.n_components();
  detail::put_u64(out, k);
  detail::put_u64(out, comps);
  for (const Vec2& p : model.shape_model.mean_shape.points) {
    detail::put_f64(out, p.x);
    detail::put_f64(out, p.y);
  }
  for (std::size_t c = 0; c < comps; ++c)
    for (std::size_t i = 0; i < 2 * k; ++i)
      detail::put_f64(out, model.shape_model.basis(
                               static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(c)));
  for (std::size_t c = 0; c < comps; ++c)
    detail::put_f64(out,
                    model.shape_model.basis_scales(static_cast<Eigen::Index>(c)));

  detail::put_u64(out, model.probe_layout.offsets.size());
  for (const Vec2& o : model.probe_layout.offsets) {
    detail::put_f64(out, o.x);
    detail::put_f64(out, o.y);
  }

  detail::put_u64(out, model.stages.size());
  for (const CascadeStage& stage : model.stages) {
    const auto rows = static_cast<std::size_t>(stage.weights.rows());
    const auto cols = static_cast<std::size_t>(stage.weights.cols());
    detail::put_u64(out, rows);
    detail::put_u64(out, cols);
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t r = 0; r < rows; ++r)
        detail::put_f64(out, stage.weights(static_cast<Eigen::Index>(r),
                                           static_cast<Eigen::Index>(c)));
    for (std::size_t i = 0; i < cols; ++i)
      detail::put_f64(out, stage.intercept(static_cast<Eigen::Index>(i)));
  }
  write_text_file(path, out);
}

inline CascadeModel load_cascade_model(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  detail::ByteReader in(data, path.string());
  in.expect_magic();
  const std::uint64_t version = in.u64();
  if (version != detail::kModelFormatVersion)
    raise(Errc::IoError, path.string() + ": unsupported model format version " +
                             std::to_string(version));
  CascadeModel model;
  model.train_seed = in.u64();
  model.trained_with_mirror_augmentation = in.u64() != 0;
  model.ridge_lambda = in.f64();

  const std::uint64_t k = in.u64();
  const std::uint64_t comps = in.u64();
  model.shape_model.mean_shape.points.resize(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    model.shape_model.mean_shape.points[i].x = in.f64();
    model.shape_model.mean_shape.points[i].y = in.f64();
  }
  model.shape_model.basis.resize(static_cast<Eigen::Index>(2 * k),
                                 static_cast<Eigen::Index>(comps));
  for (std::uint64_t c = 0; c < comps; ++c)
    for (std::uint64_t i = 0; i < 2 * k; ++i)
      model.shape_model.basis(static_cast<Eigen::Index>(i),
                              static_cast<Eigen::Index>(c)) = in.f64();
  model.shape_model.basis_scales.resize(static_cast<Eigen::Index>(comps));
  for (std::uint64_t c = 0; c < comps; ++c)
    model.shape_model.basis_scales(static_cast<Eigen::Index>(c)) = in.f64();

  const std::uint64_t n_offsets = in.u64();
  model.probe_layout.offsets.resize(n_offsets);
  for (std::uint64_t i = 0; i < n_offsets; ++i) {
    model.probe_layout.offsets[i].x = in.f64();
    model.probe_layout.offsets[i].y = in.f64();
  }

  const std::uint64_t n_stages = in.u64();
  model.stages.resize(n_stages);
  for (std::uint64_t t = 0; t < n_stages; ++t) {
    const std::uint64_t rows = in.u64();
    const std::uint64_t cols = in.u64();
    CascadeStage& stage = model.stages[t];
    stage.weights.resize(static_cast<Eigen::Index>(rows),
                         static_cast<Eigen::Index>(cols));
    for (std::uint64_t c = 0; c < cols; ++c)
      for (std::uint64_t r = 0; r < rows; ++r)
        stage.weights(static_cast<Eigen::Index>(r),
                      static_cast<Eigen::Index>(c)) = in.f64();
    stage.intercept.resize(static_cast<Eigen::Index>(cols));
    for (std::uint64_t i = 0; i < cols; ++i)
      stage.intercept(static_cast<Eigen::Index>(i)) = in.f64();
  }
  in.expect_end();
  return model;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Standard report preamble: tool version plus key=value comment lines
/// (seed, normalization mode, anything experiment-specific).
inline std::string report_header(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out = "# mirroreval ";
  out += version_string;
  out += '\n';
  for (const auto& [key, value] : entries) {
    out += "# ";
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

inline std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string render_per_sample_csv(
    const std::vector<SampleRecord>& records, const std::string& header) {
  std::string out = header;
  out += "sample_id,e_m,e_a,e_a_mirror\n";
  for (const SampleRecord& rec : records) {
    out += rec.sample_id;
    out += ',';
    if (rec.e_m) out += format_double(*rec.e_m);
    out += ',';
    if (rec.e_a) out += format_double(*rec.e_a);
    out += ',';
    if (rec.e_a_mirror) out += format_double(*rec.e_a_mirror);
    out += '\n';
  }
  return out;
}

/// Parse a per-sample errors file back into skeleton records (ids + errors).
inline std::vector<SampleRecord> parse_per_sample_csv(
    const std::filesystem::path& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  std::vector<SampleRecord> records;
  std::unordered_set<std::string> seen;
  bool saw_column_row = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t line_number = i + 1;
    if (line.empty() || line.front() == '#') continue;
    if (!saw_column_row && line.rfind("sample_id", 0) == 0) {
      saw_column_row = true;
      continue;
    }
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 4)
      raise(Errc::MalformedRow,
            "line " + std::to_string(line_number) +
                ": expected sample_id,e_m,e_a,e_a_mirror");
    SampleRecord rec;
    rec.sample_id = fields[0];
    if (!seen.insert(rec.sample_id).second)
      raise(Errc::DuplicateId, "line " + std::to_string(line_number) +
                                   ": duplicate sample_id '" + rec.sample_id +
                                   "'");
    if (!fields[1].empty()) rec.e_m = parse_double(fields[1], line_number);
    if (!fields[2].empty()) rec.e_a = parse_double(fields[2], line_number);
    if (!fields[3].empty())
      rec.e_a_mirror = parse_double(fields[3], line_number);
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::string render_skipped_csv(const std::vector<SkippedSample>& skipped,
                                      const std::string& header) {
  std::string out = header;
  out += "sample_id,category,message\n";
  for (const SkippedSample& s : skipped) {
    out += csv_quote(s.sample_id);
    out += ',';
    out += errc_name(s.code);
    out += ',';
    out += csv_quote(s.message);
    out += '\n';
  }
  return out;
}

inline std::string render_curve_csv(const std::vector<CurveRow>& rows,
                                    const std::string& header) {
  std::string out = header;
  out += "rank,sample_id,e_a,e_m\n";
  for (const CurveRow& row : rows) {
    out += std::to_string(row.rank);
    out += ',';
    out += row.sample_id;
    out += ',';
    out += format_double(row.e_a);
    out += ',';
    out += format_double(row.e_m);
    out += '\n';
  }
  return out;
}

inline std::string render_per_point_csv(const PerPointStats& stats,
                                        const std::string& header) {
  std::string out = header;
  out += "landmark,mirror_mean,mirror_std,align_mean\n";
  for (std::size_t k = 0; k < stats.mirror_mean.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_double(stats.mirror_mean[k]);
    out += ',';
    out += format_double(stats.mirror_std[k]);
    out += ',';
    if (!stats.align_mean.empty()) out += format_double(stats.align_mean[k]);
    out += '\n';
  }
  return out;
}

inline std::string render_selection(const SelectionSet& set,
                                    const std::string& header) {
  std::string out = header;
  for (const std::string& id : set.sample_ids) {
    out += id;
    out += '\n';
  }
  return out;
}

inline std::string render_matrix_csv(const ConsistencyMatrix& matrix,
                                     const std::string& header) {
  std::string out = header;
  out += "method";
  for (const std::string& id : matrix.method_ids) {
    out += ',';
    out += csv_quote(id);
  }
  out += '\n';
  const std::size_t n = matrix.method_ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += csv_quote(matrix.method_ids[i]);
    for (std::size_t j = 0; j < n; ++j) {
      out += ',';
      out += format_double(matrix.values[i * n + j]);
    }
    out += '\n';
  }
  return out;
}

inline std::string render_methods_csv(const ComparisonReport& report,
                                      const std::string& header) {
  std::string out = header;
  out += "method,mean_e_a,precision,recall,threshold,n_triggered\n";
  for (const MethodSummary& m : report.methods) {
    out += m.name;
    out += ',';
    out += format_double(m.mean_e_a);
    out += ',';
    if (m.precision) out += format_double(*m.precision);
    out += ',';
    if (m.recall) out += format_double(*m.recall);
    out += ',';
    if (m.threshold) out += format_double(*m.threshold);
    out += ',';
    out += std::to_string(m.n_triggered);
    out += '\n';
  }
  return out;
}

inline std::string render_comparison_per_sample_csv(
    const ComparisonReport& report, const std::string& header) {
  std::string out = header;
  out +=
      "sample_id,difficulty,bad,e_a_none,e_a_variance,e_a_f1,e_a_f2,"
      "e_m_round0,spread_round0,trig_variance,trig_f1,trig_f2,rounds_f1,"
      "rounds_f2\n";
  for (const SampleComparison& row : report.samples) {
    out += row.sample_id;
    out += ',';
    out += format_double(row.difficulty);
    out += ',';
    out += row.bad ? '1' : '0';
    out += ',';
    out += format_double(row.e_a_none);
    out += ',';
    out += format_double(row.e_a_variance);
    out += ',';
    out += format_double(row.e_a_f1);
    out += ',';
    out += format_double(row.e_a_f2);
    out += ',';
    out += format_double(row.e_m_round0);
    out += ',';
    out += format_double(row.spread_round0);
    out += ',';
    out += row.trig_variance ? '1' : '0';
    out += ',';
    out += row.trig_f1 ? '1' : '0';
    out += ',';
    out += row.trig_f2 ? '1' : '0';
    out += ',';
    out += std::to_string(row.rounds_f1);
    out += ',';
    out += std::to_string(row.rounds_f2);
    out += '\n';
  }
  return out;
}

inline std::string render_sim_per_sample_csv(const SimulationReport& report,
                                             const std::string& header) {
  std::string out = header;
  out += "sample_id,difficulty,e_m,e_a,e_a_mirror\n";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const SampleRecord& rec = report.records[i];
    out += rec.sample_id;
    out += ',';
    out += format_double(report.difficulties[i]);
    out += ',';
    out += format_double(*rec.e_m);
    out += ',';
    out += format_double(*rec.e_a);
    out += ',';
    if (rec.e_a_mirror) out += format_double(*rec.e_a_mirror);
    out += '\n';
  }
  return out;
}

/// key=value summary file with the standard preamble.
inline std::string render_summary(
    const std::vector<std::pair<std::string, std::string>>& header_entries,
    const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out = report_header(header_entries);
  for (const auto& [key, value] : values) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace mirror
