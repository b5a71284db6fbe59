/*
 * include/fsg/fuzzy_knn.hpp
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

#ifndef FSG_FUZZY_KNN_HPP
#define FSG_FUZZY_KNN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsg/core.hpp"

namespace fsg {

struct Neighbor {
  std::size_t index;
  double distance;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ascending by distance; equal distances ordered by training index.
using NeighborList = std::vector<Neighbor>;

/// Distances below this are treated as exact matches by fuzzy_membership.
inline constexpr double kZeroDistance = 1e-12;

struct FuzzyKnnConfig {
  std::size_t k = 1;
  double fuzzifier = 2.0;
  std::size_t num_classes = 0;

  void validate() const {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (!(fuzzifier > 1.0) || !std::isfinite(fuzzifier)) {
      throw Error(ErrorKind::InvalidArgument, "fuzzifier must be > 1");
    }
    if (num_classes < 1) throw Error(ErrorKind::InvalidArgument, "num_classes must be >= 1");
  }
};

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "distance between vectors of length " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace detail {

inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

}  // namespace detail

/// Exhaustive k-nearest search. `exclude` removes one training row from the
/// pool (leave-one-out).
inline NeighborList find_k_nearest(std::span<const double> query, const FeatureMatrix& training,
                                   std::size_t k,
                                   std::optional<std::size_t> exclude = std::nullopt) {
  if (query.size() != training.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "query dimension " + std::to_string(query.size()) + " != training dimension " +
                    std::to_string(training.cols()));
  }
  const std::size_t pool = training.rows() - (exclude && *exclude < training.rows() ? 1 : 0);
  if (k > pool) {
    throw Error(ErrorKind::InsufficientData,
                "k=" + std::to_string(k) + " exceeds the " + std::to_string(pool) +
                    " available training rows");
  }
  NeighborList all;
  all.reserve(training.rows());
  for (std::size_t i = 0; i < training.rows(); ++i) {
    if (exclude && i == *exclude) continue;
    all.push_back({i, euclidean_distance(query, training.row(i))});
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    detail::neighbor_less);
  all.resize(k);
  return all;
}

/// Writes the inverse-distance-weighted class vote of `neighbors` into `out`.
/// Weights are d^(-2/(phi-1)), evaluated as (d_min/d)^(2/(phi-1)) to stay in
/// [0, 1]. If any distance is below kZeroDistance, only those neighbors vote,
/// with equal weight (the pointwise limit of the weighting).
inline void fuzzy_membership_into(std::span<double> out, std::span<const Neighbor> neighbors,
                                  std::span<const ClassIndex> neighbor_labels, double fuzzifier) {
  if (neighbors.empty()) throw Error(ErrorKind::InvalidArgument, "empty neighbor list");
  if (neighbor_labels.size() != neighbors.size()) {
    throw Error(ErrorKind::DimensionMismatch, "neighbor label count != neighbor count");
  }
  std::ranges::fill(out, 0.0);
  double d_min = neighbors.front().distance;
  for (const auto& n : neighbors) d_min = std::min(d_min, n.distance);

  double total = 0.0;
  if (d_min < kZeroDistance) {
    for (std::size_t n = 0; n < neighbors.size(); ++n) {
      if (neighbors[n].distance < kZeroDistance) {
        if (neighbor_labels[n] >= out.size()) {
          throw Error(ErrorKind::InvalidArgument, "neighbor label out of range");
        }
        out[neighbor_labels[n]] += 1.0;
        total += 1.0;
      }
    }
  } else {
    const double exponent = 2.0 / (fuzzifier - 1.0);
    for (std::size_t n = 0; n < neighbors.size(); ++n) {
      if (neighbor_labels[n] >= out.size()) {
        throw Error(ErrorKind::InvalidArgument, "neighbor label out of range");
      }
      const double w = std::pow(d_min / neighbors[n].distance, exponent);
      out[neighbor_labels[n]] += w;
      total += w;
    }
  }
  for (auto& v : out) v /= total;
}

inline MembershipVector fuzzy_membership(std::span<const Neighbor> neighbors,
                                         std::span<const ClassIndex> neighbor_labels,
                                         const FuzzyKnnConfig& cfg) {
  cfg.validate();
  std::vector<double> out(cfg.num_classes);
  fuzzy_membership_into(out, neighbors, neighbor_labels, cfg.fuzzifier);
  return MembershipVector::from_values(std::move(out));
}

/// Membership of `query` against a labeled training matrix.
inline void membership_against_into(std::span<double> out, std::span<const double> query,
                                    const FeatureMatrix& training,
                                    std::span<const ClassIndex> labels, std::size_t k,
                                    double fuzzifier,
                                    std::optional<std::size_t> exclude = std::nullopt) {
  const auto neighbors = find_k_nearest(query, training, k, exclude);
  std::vector<ClassIndex> nl(neighbors.size());
  for (std::size_t n = 0; n < neighbors.size(); ++n) nl[n] = labels[neighbors[n].index];
  fuzzy_membership_into(out, neighbors, nl, fuzzifier);
}

/// Leave-one-out memberships: row i is computed against all rows but i.
inline MembershipMatrix loo_memberships(const FeatureMatrix& training,
                                        std::span<const ClassIndex> labels,
                                        const FuzzyKnnConfig& cfg, std::size_t workers = 1) {
  cfg.validate();
  if (labels.size() != training.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "label count != training rows");
  }
  if (training.rows() <= cfg.k) {
    throw Error(ErrorKind::InsufficientData,
                "leave-one-out with k=" + std::to_string(cfg.k) + " needs more than " +
                    std::to_string(cfg.k) + " samples, got " + std::to_string(training.rows()));
  }
  MembershipMatrix out(training.rows(), cfg.num_classes);
  parallel_for(training.rows(), workers, [&](std::size_t i) {
    membership_against_into(out.row(i), training.row(i), training, labels, cfg.k, cfg.fuzzifier,
                            i);
  });
  return out;
}

/// Index of the largest component; ties go to the lowest index.
inline ClassIndex predict_crisp(std::span<const double> membership) {
  ClassIndex best = 0;
  for (ClassIndex c = 1; c < membership.size(); ++c) {
    if (membership[c] > membership[best]) best = c;
  }
  return best;
}

inline ClassIndex predict_crisp(const MembershipVector& m) { return predict_crisp(m.values()); }

// ---------------------------------------------------------------------------
// k selection.

inline constexpr std::size_t kDefaultFolds = 5;

/// Fold index per sample. Each class is shuffled independently and dealt
/// round-robin, continuing the deal across classes so fold sizes differ by at
/// most one.
inline std::vector<std::size_t> stratified_folds(std::span<const ClassIndex> labels,
                                                 std::size_t num_classes, std::size_t num_folds,
                                                 RngSeed seed) {
  Rng rng(seed);
  std::vector<std::size_t> fold_of(labels.size(), 0);
  std::size_t deal = 0;
  for (ClassIndex c = 0; c < num_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(i);
    rng.shuffle(members);
    for (auto i : members) fold_of[i] = deal++ % num_folds;
  }
  return fold_of;
}

inline std::size_t isqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Mean stratified-CV accuracy for every k in 1..K where K = floor(sqrt(N)),
/// capped by the smallest training fold. Entry k-1 holds the score for k.
inline std::vector<double> cross_validate_k(const FeatureMatrix& features,
                                            std::span<const ClassIndex> labels,
                                            std::size_t num_classes, double fuzzifier,
                                            RngSeed seed, std::size_t workers = 1,
                                            std::size_t num_folds = kDefaultFolds) {
  const std::size_t n = features.rows();
  if (labels.size() != n) throw Error(ErrorKind::DimensionMismatch, "label count != rows");
  if (n < 4) {
    throw Error(ErrorKind::InsufficientData,
                "k selection needs at least 4 samples, got " + std::to_string(n));
  }
  num_folds = std::min(num_folds, n);
  const auto fold_of = stratified_folds(labels, num_classes, num_folds, seed);

  std::vector<std::vector<std::size_t>> held(num_folds), kept(num_folds);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < num_folds; ++f) (fold_of[i] == f ? held[f] : kept[f]).push_back(i);
  }
  std::size_t k_max = std::max<std::size_t>(1, isqrt(n));
  for (std::size_t f = 0; f < num_folds; ++f) k_max = std::min(k_max, kept[f].size());

  std::vector<double> accuracy_sum(k_max, 0.0);
  std::size_t scored_folds = 0;
  for (std::size_t f = 0; f < num_folds; ++f) {
    if (held[f].empty()) continue;
    ++scored_folds;
    const FeatureMatrix train = features.select_rows(kept[f]);
    std::vector<ClassIndex> train_labels;
    for (auto i : kept[f]) train_labels.push_back(labels[i]);

    // correct[q * k_max + (k-1)] = prediction with k neighbors was right
    std::vector<unsigned char> correct(held[f].size() * k_max, 0);
    parallel_for(held[f].size(), workers, [&](std::size_t q) {
      const std::size_t i = held[f][q];
      const auto neighbors = find_k_nearest(features.row(i), train, k_max);
      std::vector<ClassIndex> nl(k_max);
      for (std::size_t m = 0; m < k_max; ++m) nl[m] = train_labels[neighbors[m].index];
      std::vector<double> mu(num_classes);
      for (std::size_t k = 1; k <= k_max; ++k) {
        fuzzy_membership_into(mu, std::span(neighbors).first(k), std::span(nl).first(k),
                              fuzzifier);
        correct[q * k_max + (k - 1)] = predict_crisp(mu) == labels[i];
      }
    });
    for (std::size_t k = 0; k < k_max; ++k) {
      std::size_t hits = 0;
      for (std::size_t q = 0; q < held[f].size(); ++q) hits += correct[q * k_max + k];
      accuracy_sum[k] += static_cast<double>(hits) / static_cast<double>(held[f].size());
    }
  }
  for (auto& a : accuracy_sum) a /= static_cast<double>(scored_folds);
  return accuracy_sum;
}

/// k in 1..floor(sqrt(N)) with the best mean CV accuracy; ties to smaller k.
inline std::size_t select_k(const FeatureMatrix& features, std::span<const ClassIndex> labels,
                            std::size_t num_classes, double fuzzifier, RngSeed seed,
                            std::size_t workers = 1) {
  const auto scores = cross_validate_k(features, labels, num_classes, fuzzifier, seed, workers);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = k;
  return best + 1;
}

}  // namespace fsg

#endif  // FSG_FUZZY_KNN_HPP
