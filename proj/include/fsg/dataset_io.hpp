/*
 * include/fsg/dataset_io.hpp
 *
 * Copyright 2026 The fsg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Delimited-text datasets.
//
//   * Comma separated. Lines starting with '#' and blank lines are skipped.
//   * Feature files (multi-feature mode): first column is the sample id, the
//     rest are numeric. The first row is a header iff one of its non-id
//     cells is not a number.
//   * Label files: "id,label" rows; a first row whose id cell is "id" is a
//     header. Labels may be any string; class indices follow the order in
//     which labels first appear in sample order.
//   * Attribute files (multi-attribute mode): header row required when the
//     label column is named. An optional "id" column names samples; every
//     other column is one attribute, i.e. one 1-D feature space.

#ifndef FSG_DATASET_IO_HPP
#define FSG_DATASET_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "fsg/core.hpp"

namespace fsg {

struct CsvTable {
  std::filesystem::path path;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string where(const CsvTable& t, std::size_t row) {
  return t.path.string() + ":" + std::to_string(t.lines[row]);
}

}  // namespace detail

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  CsvTable t{path, {}, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = view.find(',', start);
      cells.emplace_back(detail::trim(view.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(line_no);
  }
  return t;
}

namespace detail {

/// Numeric block of a feature file: ids plus an N x D matrix.
struct FeatureFile {
  std::vector<std::string> ids;
  FeatureMatrix values;
};

inline FeatureFile parse_feature_file(const CsvTable& t) {
  if (t.rows.empty()) throw Error(ErrorKind::DataFormat, t.path.string() + ": no rows");
  std::size_t first = 0;
  double scratch;
  for (std::size_t c = 1; c < t.rows[0].size(); ++c) {
    if (!parse_double(t.rows[0][c], scratch)) {
      first = 1;
      break;
    }
  }
  if (first >= t.rows.size()) throw Error(ErrorKind::DataFormat, t.path.string() + ": header only");
  const std::size_t width = t.rows[first].size();
  if (width < 2) {
    throw Error(ErrorKind::DataFormat, where(t, first) + ": expected an id and at least one value");
  }
  FeatureFile f{{}, FeatureMatrix(0, width - 1)};
  std::vector<double> row(width - 1);
  for (std::size_t r = first; r < t.rows.size(); ++r) {
    const auto& cells = t.rows[r];
    if (cells.size() != width) {
      throw Error(ErrorKind::DataFormat, where(t, r) + ": expected " + std::to_string(width) +
                                             " cells, found " + std::to_string(cells.size()));
    }
    if (cells[0].empty()) throw Error(ErrorKind::DataFormat, where(t, r) + ": missing id");
    for (std::size_t c = 1; c < width; ++c) {
      if (!parse_double(cells[c], row[c - 1])) {
        throw Error(ErrorKind::DataFormat, where(t, r) + ": non-numeric cell '" + cells[c] +
                                               "' in column " + std::to_string(c + 1));
      }
    }
    f.ids.push_back(cells[0]);
    f.values.append_row(row);
  }
  return f;
}

inline std::unordered_map<std::string, std::size_t> index_ids(const std::vector<std::string>& ids,
                                                              const std::filesystem::path& path) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw Error(ErrorKind::DataFormat, path.string() + ": duplicate id '" + ids[i] + "'");
    }
  }
  return index;
}

/// Assigns class indices by first appearance (or by `known` names when
/// given; unknown labels are then an error).
inline std::vector<ClassIndex> map_labels(const std::vector<std::string>& raw,
                                          std::vector<std::string>& names,
                                          bool extend, const std::string& source) {
  std::map<std::string, ClassIndex> lookup;
  for (std::size_t c = 0; c < names.size(); ++c) lookup.emplace(names[c], c);
  std::vector<ClassIndex> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    auto it = lookup.find(r);
    if (it == lookup.end()) {
      if (!extend) throw Error(ErrorKind::DataFormat, source + ": unknown class label '" + r + "'");
      it = lookup.emplace(r, names.size()).first;
      names.push_back(r);
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace detail

/// Reads "id,label" rows into an id -> label string map, preserving order.
inline std::vector<std::pair<std::string, std::string>> read_label_file(
    const std::filesystem::path& path) {
  const auto t = read_csv(path);
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& cells = t.rows[r];
    if (r == 0 && !cells.empty() && cells[0] == "id") continue;
    if (cells.size() != 2) {
      throw Error(ErrorKind::DataFormat,
                  detail::where(t, r) + ": expected 'id,label', found " +
                      std::to_string(cells.size()) + " cells");
    }
    if (cells[0].empty()) throw Error(ErrorKind::DataFormat, detail::where(t, r) + ": missing id");
    out.emplace_back(cells[0], cells[1]);
  }
  if (out.empty()) throw Error(ErrorKind::DataFormat, path.string() + ": no labels");
  return out;
}

/// Feature files aligned by id; sample order follows the first file.
inline FeatureSet load_feature_set(std::span<const std::filesystem::path> feature_files) {
  if (feature_files.empty()) throw Error(ErrorKind::InvalidArgument, "no feature files given");
  std::vector<detail::FeatureFile> files;
  for (const auto& p : feature_files) files.push_back(detail::parse_feature_file(read_csv(p)));
  FeatureSet fs;
  fs.ids = files.front().ids;
  detail::index_ids(fs.ids, feature_files[0]);
  for (std::size_t f = 0; f < files.size(); ++f) {
    if (files[f].ids.size() != fs.ids.size()) {
      throw Error(ErrorKind::DataFormat,
                  "row count mismatch: " + feature_files[0].string() + " has " +
                      std::to_string(fs.ids.size()) + " rows, " + feature_files[f].string() +
                      " has " + std::to_string(files[f].ids.size()));
    }
    const auto index = detail::index_ids(files[f].ids, feature_files[f]);
    std::vector<std::size_t> order;
    for (const auto& id : fs.ids) {
      const auto it = index.find(id);
      if (it == index.end()) {
        throw Error(ErrorKind::DataFormat,
                    feature_files[f].string() + ": missing id '" + id + "' (present in " +
                        feature_files[0].string() + ")");
      }
      order.push_back(it->second);
    }
    fs.spaces.push_back(files[f].values.select_rows(order));
  }
  return fs;
}

/// Attaches labels from a label file to a feature set, by id. With
/// `class_names` non-empty, labels must be among them.
inline LabeledDataset attach_labels(FeatureSet fs, const std::filesystem::path& label_file,
                                    std::vector<std::string> class_names = {}) {
  const auto pairs = read_label_file(label_file);
  if (pairs.size() != fs.size()) {
    throw Error(ErrorKind::DataFormat, "row count mismatch: " + label_file.string() + " has " +
                                           std::to_string(pairs.size()) +
                                           " labels for " + std::to_string(fs.size()) + " samples");
  }
  std::unordered_map<std::string, std::string> by_id;
  for (const auto& [id, label] : pairs) {
    if (!by_id.emplace(id, label).second) {
      throw Error(ErrorKind::DataFormat, label_file.string() + ": duplicate id '" + id + "'");
    }
  }
  std::vector<std::string> raw;
  for (const auto& id : fs.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::DataFormat, label_file.string() + ": missing id '" + id + "'");
    }
    raw.push_back(it->second);
  }
  const bool extend = class_names.empty();
  const auto labels = detail::map_labels(raw, class_names, extend, label_file.string());
  std::vector<std::size_t> dims = fs.space_dims();
  LabeledDataset d(class_names.size(), dims);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    LabeledSample s{fs.ids[i], labels[i], {}};
    for (const auto& m : fs.spaces) {
      auto r = m.row(i);
      s.features.emplace_back(r.begin(), r.end());
    }
    d.add(s);
  }
  d.set_class_names(std::move(class_names));
  return d;
}

/// One feature file per space plus a label file.
inline LabeledDataset load_multi_feature(std::span<const std::filesystem::path> feature_files,
                                         const std::filesystem::path& label_file) {
  return attach_labels(load_feature_set(feature_files), label_file);
}

/// A single table where every attribute column becomes its own 1-D space.
/// `label_column` is a header name, or a 0-based column index when the file
/// has no header. Empty selects the column named "label", else the last one.
inline LabeledDataset load_multi_attribute(const std::filesystem::path& path,
                                           const std::string& label_column = "") {
  const auto t = read_csv(path);
  if (t.rows.empty()) throw Error(ErrorKind::DataFormat, path.string() + ": no rows");
  const auto& first = t.rows[0];
  const std::size_t width = first.size();

  // Header iff some first-row cell other than a label-looking one is non-numeric;
  // a label column may hold strings, so a header is only assumed when the
  // label column name appears or two or more cells are non-numeric.
  double scratch;
  std::size_t non_numeric = 0;
  for (const auto& cell : first) non_numeric += !detail::parse_double(cell, scratch);
  const bool named = !label_column.empty() &&
                     std::ranges::find(first, label_column) != first.end();
  const bool has_header = named || non_numeric >= 2 ||
                          std::ranges::find(first, std::string("label")) != first.end();

  std::size_t label_col = width - 1;
  std::size_t id_col = width;  // none
  if (has_header) {
    if (!label_column.empty()) {
      auto it = std::ranges::find(first, label_column);
      if (it == first.end()) {
        std::size_t idx;
        const auto [p, ec] = std::from_chars(label_column.data(),
                                             label_column.data() + label_column.size(), idx);
        if (ec != std::errc() || p != label_column.data() + label_column.size() || idx >= width) {
          throw Error(ErrorKind::DataFormat,
                      path.string() + ": no label column '" + label_column + "'");
        }
        label_col = idx;
      } else {
        label_col = static_cast<std::size_t>(it - first.begin());
      }
    } else if (auto it = std::ranges::find(first, std::string("label")); it != first.end()) {
      label_col = static_cast<std::size_t>(it - first.begin());
    }
    if (auto it = std::ranges::find(first, std::string("id")); it != first.end()) {
      id_col = static_cast<std::size_t>(it - first.begin());
    }
  } else if (!label_column.empty()) {
    std::size_t idx;
    const auto [p, ec] =
        std::from_chars(label_column.data(), label_column.data() + label_column.size(), idx);
    if (ec != std::errc() || p != label_column.data() + label_column.size() || idx >= width) {
      throw Error(ErrorKind::DataFormat, path.string() +
                                             ": label column must be a 0-based index when the "
                                             "file has no header");
    }
    label_col = idx;
  }

  std::vector<std::size_t> attr_cols;
  for (std::size_t c = 0; c < width; ++c)
    if (c != label_col && c != id_col) attr_cols.push_back(c);
  if (attr_cols.size() < 2) {
    throw Error(ErrorKind::DataFormat, path.string() + ": multi-attribute mode needs at least 2 "
                                                       "attribute columns, found " +
                                           std::to_string(attr_cols.size()));
  }

  std::vector<std::string> ids, raw_labels;
  std::vector<std::vector<double>> values;
  for (std::size_t r = has_header ? 1 : 0; r < t.rows.size(); ++r) {
    const auto& cells = t.rows[r];
    if (cells.size() != width) {
      throw Error(ErrorKind::DataFormat, detail::where(t, r) + ": expected " +
                                             std::to_string(width) + " cells, found " +
                                             std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (auto c : attr_cols) {
      double v;
      if (!detail::parse_double(cells[c], v)) {
        throw Error(ErrorKind::DataFormat, detail::where(t, r) + ": non-numeric cell '" +
                                               cells[c] + "' in column " + std::to_string(c + 1));
      }
      row.push_back(v);
    }
    if (cells[label_col].empty()) {
      throw Error(ErrorKind::DataFormat, detail::where(t, r) + ": missing label");
    }
    ids.push_back(id_col < width ? cells[id_col] : std::to_string(ids.size()));
    raw_labels.push_back(cells[label_col]);
    values.push_back(std::move(row));
  }
  if (ids.empty()) throw Error(ErrorKind::DataFormat, path.string() + ": header only");
  detail::index_ids(ids, path);

  std::vector<std::string> names;
  const auto labels = detail::map_labels(raw_labels, names, true, path.string());
  LabeledDataset d(names.size(), std::vector<std::size_t>(attr_cols.size(), 1));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    LabeledSample s{ids[i], labels[i], {}};
    for (double v : values[i]) s.features.push_back({v});
    d.add(s);
  }
  d.set_class_names(std::move(names));
  return d;
}

/// Newline-separated ids (comments and blank lines skipped).
inline std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  std::vector<std::string> out;
  for (const auto& row : t.rows) out.push_back(row.front());
  return out;
}

struct DatasetFiles {
  std::vector<std::filesystem::path> features;
  std::filesystem::path labels;
};

/// Writes space_<j>.csv (1-based) and labels.csv into `dir`, values in
/// shortest round-trip form.
inline DatasetFiles write_multi_feature(const LabeledDataset& d, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  DatasetFiles files;
  for (std::size_t j = 0; j < d.num_spaces(); ++j) {
    const auto p = dir / ("space_" + std::to_string(j + 1) + ".csv");
    std::ofstream out(p);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    out << "id";
    for (std::size_t a = 0; a < d.space(j).cols(); ++a) out << ",f" << (a + 1);
    out << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
      out << d.id(i);
      for (double v : d.space(j).row(i)) out << ',' << detail::format_double(v);
      out << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "failed writing " + p.string());
    files.features.push_back(p);
  }
  files.labels = dir / "labels.csv";
  std::ofstream out(files.labels);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + files.labels.string());
  out << "id,label\n";
  for (std::size_t i = 0; i < d.size(); ++i) out << d.id(i) << ',' << d.class_name(d.label(i)) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing " + files.labels.string());
  return files;
}

}  // namespace fsg

#endif  // FSG_DATASET_IO_HPP
