/*
 * include/fsg/entropy.hpp
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

// Histogram estimates of differential entropy, H ~ -sum_b p_b log(p_b / w_b),
// for feature, decision and fusion spaces. Empty bins contribute nothing.
// The estimate is negative for mass concentrated in bins narrower than 1.

#ifndef FSG_ENTROPY_HPP
#define FSG_ENTROPY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fsg/core.hpp"

namespace fsg {

enum class EntropyUnit { Nats, Bits };

inline const char* unit_name(EntropyUnit u) { return u == EntropyUnit::Nats ? "nats" : "bits"; }

inline constexpr std::size_t kDefaultBins = 32;

/// Uniform-width bins over [lo, hi] with counts per group (class); a single
/// group when no labels are given.
struct Histogram {
  std::vector<double> edges;  // B + 1, strictly increasing
  std::size_t groups = 1;
  std::vector<std::size_t> counts;  // counts[b * groups + g]
  std::size_t total = 0;

  std::size_t bins() const noexcept { return edges.size() - 1; }
  double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
  std::size_t count(std::size_t b, std::size_t g) const { return counts[b * groups + g]; }
  std::size_t count(std::size_t b) const {
    std::size_t s = 0;
    for (std::size_t g = 0; g < groups; ++g) s += count(b, g);
    return s;
  }
  std::size_t group_total(std::size_t g) const {
    std::size_t s = 0;
    for (std::size_t b = 0; b < bins(); ++b) s += count(b, g);
    return s;
  }
};

namespace detail {

inline std::vector<double> uniform_edges(std::size_t bins, double lo, double hi) {
  std::vector<double> e(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    e[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  e.back() = hi;
  return e;
}

/// A value on an interior edge belongs to the bin on its right; `hi` closes
/// the last bin.
inline std::size_t bin_index(std::span<const double> edges, double v) {
  const std::size_t bins = edges.size() - 1;
  if (!(v >= edges.front() && v <= edges.back())) {
    throw Error(ErrorKind::InvalidArgument,
                "value " + std::to_string(v) + " outside histogram range");
  }
  const double lo = edges.front();
  const double hi = edges.back();
  auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
  b = std::min(b, bins - 1);
  while (b + 1 < bins && v >= edges[b + 1]) ++b;
  while (b > 0 && v < edges[b]) --b;
  return b;
}

inline double plogp_over_w(double p, double w) { return p > 0.0 ? p * std::log(p / w) : 0.0; }

inline double to_unit(double nats, EntropyUnit u) {
  return u == EntropyUnit::Nats ? nats : nats / std::log(2.0);
}

}  // namespace detail

inline Histogram build_histogram(std::span<const double> values, std::size_t bins,
                                 std::span<const ClassIndex> labels = {},
                                 std::size_t num_classes = 0, double lo = 0.0, double hi = 1.0) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "histogram of an empty sample");
  if (bins < 1) throw Error(ErrorKind::InvalidArgument, "histogram needs at least one bin");
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, "histogram range is empty");
  if (!labels.empty() && labels.size() != values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "label count != value count");
  }
  Histogram h;
  h.edges = detail::uniform_edges(bins, lo, hi);
  if (!labels.empty()) {
    h.groups = num_classes;
    for (auto l : labels) h.groups = std::max(h.groups, l + 1);
  }
  h.counts.assign(bins * h.groups, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t g = labels.empty() ? 0 : labels[i];
    ++h.counts[detail::bin_index(h.edges, values[i]) * h.groups + g];
  }
  h.total = values.size();
  return h;
}

/// Entropy of the whole histogram (all groups pooled).
inline double entropy(const Histogram& h, EntropyUnit unit = EntropyUnit::Nats) {
  double s = 0.0;
  const auto n = static_cast<double>(h.total);
  for (std::size_t b = 0; b < h.bins(); ++b) {
    s += detail::plogp_over_w(static_cast<double>(h.count(b)) / n, h.width(b));
  }
  return detail::to_unit(-s, unit);
}

/// Entropy of one group with bin probabilities renormalized within it.
inline double group_entropy(const Histogram& h, std::size_t g,
                            EntropyUnit unit = EntropyUnit::Nats) {
  const std::size_t n = h.group_total(g);
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "group " + std::to_string(g) + " is empty");
  double s = 0.0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    s += detail::plogp_over_w(static_cast<double>(h.count(b, g)) / static_cast<double>(n),
                              h.width(b));
  }
  return detail::to_unit(-s, unit);
}

/// Per-class entropy of scalar values in [0, 1], all classes binned on the
/// same edges.
inline std::vector<double> class_conditional_entropy_table(std::span<const double> values,
                                                           std::span<const ClassIndex> labels,
                                                           std::size_t num_classes,
                                                           std::size_t bins = kDefaultBins,
                                                           EntropyUnit unit = EntropyUnit::Nats) {
  const auto h = build_histogram(values, bins, labels, num_classes);
  std::vector<double> out;
  for (ClassIndex c = 0; c < num_classes; ++c) {
    if (h.group_total(c) == 0) {
      throw Error(ErrorKind::InvalidArgument, "class " + std::to_string(c) + " has no samples");
    }
    out.push_back(group_entropy(h, c, unit));
  }
  return out;
}

/// Experimental joint estimate over the columns of `values` (each in
/// [0, 1]) using product bins: -sum_cells p log(p / volume). Its bias grows
/// quickly with the number of columns; compare only at equal bins and N.
inline double joint_entropy(const FeatureMatrix& values, std::size_t bins,
                            EntropyUnit unit = EntropyUnit::Nats) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "joint entropy of an empty sample");
  if (bins < 1) throw Error(ErrorKind::InvalidArgument, "histogram needs at least one bin");
  const auto edges = detail::uniform_edges(bins, 0.0, 1.0);
  std::map<std::vector<std::uint32_t>, std::size_t> cells;
  std::vector<std::uint32_t> key(values.cols());
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t d = 0; d < values.cols(); ++d) {
      key[d] = static_cast<std::uint32_t>(detail::bin_index(edges, values(i, d)));
    }
    ++cells[key];
  }
  const double n = static_cast<double>(values.rows());
  double s = 0.0;
  for (const auto& [cell, count] : cells) {
    double volume = 1.0;
    for (auto b : cell) volume *= edges[b + 1] - edges[b];
    s += detail::plogp_over_w(static_cast<double>(count) / n, volume);
  }
  return detail::to_unit(-s, unit);
}

/// Rescales to [0, 1]; a constant input maps to all zeros.
inline std::vector<double> min_max_normalize(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const auto [lo, hi] = std::ranges::minmax(out);
  const double range = hi - lo;
  for (auto& v : out) v = range > 0.0 ? std::clamp((v - lo) / range, 0.0, 1.0) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Fusion versus sum of decision-space entropies.

struct FusionEntropyComparison {
  double sum_of_spaces = 0.0;
  double fusion = 0.0;
  double difference = 0.0;  // fusion - sum_of_spaces
  bool dependent = false;   // fusion below the sum by more than the noise floor
};

inline FusionEntropyComparison fusion_entropy_comparison(std::span<const double> per_space,
                                                         double fusion_entropy,
                                                         double noise_floor = 0.0) {
  if (per_space.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "fusion comparison needs at least two spaces");
  }
  FusionEntropyComparison r;
  for (double e : per_space) r.sum_of_spaces += e;
  r.fusion = fusion_entropy;
  r.difference = r.fusion - r.sum_of_spaces;
  r.dependent = r.difference < -noise_floor;
  return r;
}

// ---------------------------------------------------------------------------
// Table builders. Rows are spaces, columns are classes.

struct EntropyTable {
  std::vector<std::string> rows;
  std::vector<std::vector<double>> values;  // values[row][class]
  std::size_t bins = kDefaultBins;
  EntropyUnit unit = EntropyUnit::Nats;
};

/// Feature-space table: every dimension of a space is min-max normalized
/// over all samples; the per-class entropy of a space is the mean of its
/// per-dimension entropies.
inline EntropyTable feature_entropy_table(const LabeledDataset& d, std::size_t bins = kDefaultBins,
                                          EntropyUnit unit = EntropyUnit::Nats) {
  EntropyTable t{{}, {}, bins, unit};
  for (std::size_t j = 0; j < d.num_spaces(); ++j) {
    const auto& x = d.space(j);
    std::vector<double> row(d.num_classes(), 0.0);
    for (std::size_t a = 0; a < x.cols(); ++a) {
      std::vector<double> column(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) column[i] = x(i, a);
      const auto e = class_conditional_entropy_table(min_max_normalize(column), d.labels(),
                                                     d.num_classes(), bins, unit);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] += e[c] / static_cast<double>(x.cols());
    }
    t.rows.push_back("F" + std::to_string(j + 1));
    t.values.push_back(std::move(row));
  }
  return t;
}

/// mu_{y_i}(x_i) for every row of a membership block.
inline std::vector<double> own_class_membership(const MembershipMatrix& m,
                                                std::span<const ClassIndex> labels) {
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, labels[i]);
  return out;
}

struct DecisionEntropyAnalysis {
  /// One row per decision space, then "fusion" (own-class membership of the
  /// classifier operating in the fusion space) and "fusion-joint" (product-bin
  /// estimate over the J own-class memberships).
  EntropyTable table;
  std::vector<FusionEntropyComparison> per_class;  // joint fusion vs sum, per class
  FusionEntropyComparison pooled;                  // same, over all samples
};

/// Decision/fusion analysis of J membership blocks (each N x C) and the
/// fusion-space memberships (N x C) with the samples' true labels. Every
/// class must be present.
inline DecisionEntropyAnalysis decision_entropy_analysis(std::span<const MembershipMatrix> blocks,
                                                         const MembershipMatrix& fusion,
                                                         std::span<const ClassIndex> labels,
                                                         std::size_t num_classes,
                                                         std::size_t bins = kDefaultBins,
                                                         EntropyUnit unit = EntropyUnit::Nats) {
  if (blocks.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "decision analysis needs at least two spaces");
  }
  const std::size_t n = labels.size();
  const std::size_t spaces = blocks.size();
  DecisionEntropyAnalysis out;
  out.table.bins = bins;
  out.table.unit = unit;

  std::vector<std::vector<double>> own(spaces);
  for (std::size_t j = 0; j < spaces; ++j) {
    if (blocks[j].rows() != n) throw Error(ErrorKind::DimensionMismatch, "block rows != labels");
    own[j] = own_class_membership(blocks[j], labels);
    out.table.rows.push_back("F" + std::to_string(j + 1));
    out.table.values.push_back(
        class_conditional_entropy_table(own[j], labels, num_classes, bins, unit));
  }

  if (fusion.rows() != n || fusion.cols() != num_classes) {
    throw Error(ErrorKind::DimensionMismatch, "fusion memberships must be N x C");
  }
  out.table.rows.push_back("fusion");
  out.table.values.push_back(class_conditional_entropy_table(own_class_membership(fusion, labels),
                                                             labels, num_classes, bins, unit));

  auto joint_of = [&](std::span<const std::size_t> rows) {
    FeatureMatrix m(rows.size(), spaces);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < spaces; ++j) m(r, j) = own[j][rows[r]];
    return joint_entropy(m, bins, unit);
  };
  std::vector<double> joint_row;
  for (ClassIndex c = 0; c < num_classes; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (labels[i] == c) rows.push_back(i);
    joint_row.push_back(joint_of(rows));
    std::vector<double> per_space;
    for (std::size_t j = 0; j < spaces; ++j) per_space.push_back(out.table.values[j][c]);
    out.per_class.push_back(fusion_entropy_comparison(per_space, joint_row.back()));
  }
  out.table.rows.push_back("fusion-joint");
  out.table.values.push_back(std::move(joint_row));

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<double> pooled_spaces;
  for (std::size_t j = 0; j < spaces; ++j) {
    pooled_spaces.push_back(entropy(build_histogram(own[j], bins), unit));
  }
  out.pooled = fusion_entropy_comparison(pooled_spaces, joint_of(all));
  return out;
}

}  // namespace fsg

#endif  // FSG_ENTROPY_HPP
