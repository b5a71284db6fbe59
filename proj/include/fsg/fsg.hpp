/*
 * include/fsg/fsg.hpp
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

// Fuzzy stacked generalization: one fuzzy k-NN per feature space produces
// leave-one-out membership vectors for the training set; those are
// concatenated into a fusion space where a second fuzzy k-NN makes the final
// decision.

#ifndef FSG_FSG_HPP
#define FSG_FSG_HPP

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsg/core.hpp"
#include "fsg/fuzzy_knn.hpp"

namespace fsg {

/// Fixed k, or k chosen by stratified cross-validation (see select_k).
class KPolicy {
 public:
  static KPolicy automatic() { return KPolicy(std::nullopt); }
  static KPolicy fixed(std::size_t k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "fixed k must be >= 1");
    return KPolicy(k);
  }
  bool is_auto() const noexcept { return !k_.has_value(); }
  std::size_t k() const { return *k_; }

 private:
  explicit KPolicy(std::optional<std::size_t> k) : k_(k) {}
  std::optional<std::size_t> k_;
};

struct TrainOptions {
  double fuzzifier = 2.0;
  KPolicy base_k = KPolicy::automatic();
  KPolicy meta_k = KPolicy::automatic();
  RngSeed seed{};
  std::size_t workers = 1;
};

struct TrainTimings {
  double base_seconds = 0.0;
  double meta_seconds = 0.0;
};

struct ClassifyTimings {
  double base_seconds = 0.0;
  double meta_seconds = 0.0;
};

/// A trained ensemble. Instance-based: stores the training features per
/// space, the training labels and the fused leave-one-out memberships.
class FsgModel {
 public:
  FsgModel(std::size_t num_classes, double fuzzifier, std::vector<std::size_t> base_k,
           std::size_t meta_k, std::vector<std::string> class_names,
           std::vector<std::string> ids, std::vector<ClassIndex> labels,
           std::vector<FeatureMatrix> spaces, FeatureMatrix fused)
      : num_classes_(num_classes),
        fuzzifier_(fuzzifier),
        base_k_(std::move(base_k)),
        meta_k_(meta_k),
        class_names_(std::move(class_names)),
        ids_(std::move(ids)),
        labels_(std::move(labels)),
        spaces_(std::move(spaces)),
        fused_(std::move(fused)) {
    check_invariants();
  }

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t num_spaces() const noexcept { return spaces_.size(); }
  std::size_t num_training() const noexcept { return labels_.size(); }
  double fuzzifier() const noexcept { return fuzzifier_; }
  const std::vector<std::size_t>& base_k() const noexcept { return base_k_; }
  std::size_t meta_k() const noexcept { return meta_k_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<ClassIndex>& labels() const noexcept { return labels_; }
  const std::vector<FeatureMatrix>& spaces() const noexcept { return spaces_; }
  const FeatureMatrix& fused() const noexcept { return fused_; }

  std::vector<std::size_t> space_dims() const {
    std::vector<std::size_t> d;
    for (const auto& s : spaces_) d.push_back(s.cols());
    return d;
  }

  /// The N x C leave-one-out membership matrix of space j (a view into the
  /// fused matrix, copied out).
  MembershipMatrix loo_block(std::size_t j) const {
    MembershipMatrix out(num_training(), num_classes_);
    for (std::size_t i = 0; i < num_training(); ++i) {
      auto src = fused_.row(i).subspan(j * num_classes_, num_classes_);
      std::ranges::copy(src, out.row(i).begin());
    }
    return out;
  }

  /// Training accuracy of base classifier j from its LOO memberships.
  double training_accuracy(std::size_t j) const {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < num_training(); ++i) {
      hits += predict_crisp(fused_.row(i).subspan(j * num_classes_, num_classes_)) == labels_[i];
    }
    return static_cast<double>(hits) / static_cast<double>(num_training());
  }

 private:
  void check_invariants() const {
    const std::size_t n = labels_.size();
    const std::size_t j = spaces_.size();
    if (j == 0) throw Error(ErrorKind::InvalidArgument, "model has no feature spaces");
    if (base_k_.size() != j) throw Error(ErrorKind::DimensionMismatch, "one k per space expected");
    if (ids_.size() != n) throw Error(ErrorKind::DimensionMismatch, "id count != label count");
    for (const auto& s : spaces_) {
      if (s.rows() != n) throw Error(ErrorKind::DimensionMismatch, "space rows != label count");
    }
    if (fused_.rows() != n || fused_.cols() != num_classes_ * j) {
      throw Error(ErrorKind::DimensionMismatch, "fused matrix must be N x CJ");
    }
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (double v : fused_.row(i)) sum += v;
      if (std::abs(sum - static_cast<double>(j)) > kFusionTolerance) {
        throw Error(ErrorKind::InvalidArgument,
                    "fused row " + std::to_string(i) + " does not sum to J");
      }
    }
    for (auto l : labels_)
      if (l >= num_classes_) throw Error(ErrorKind::InvalidArgument, "label out of range");
    if (!(fuzzifier_ > 1.0)) throw Error(ErrorKind::InvalidArgument, "fuzzifier must be > 1");
  }

  std::size_t num_classes_;
  double fuzzifier_;
  std::vector<std::size_t> base_k_;
  std::size_t meta_k_;
  std::vector<std::string> class_names_;
  std::vector<std::string> ids_;
  std::vector<ClassIndex> labels_;
  std::vector<FeatureMatrix> spaces_;
  FeatureMatrix fused_;
};

struct Prediction {
  std::string id;
  ClassIndex predicted = 0;
  MembershipVector meta;
  std::vector<MembershipVector> base;
  std::vector<ClassIndex> base_predicted;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::size_t resolve_k(const KPolicy& policy, const FeatureMatrix& x,
                             std::span<const ClassIndex> labels, std::size_t num_classes,
                             double fuzzifier, RngSeed seed, std::size_t workers) {
  if (!policy.is_auto()) return policy.k();
  return select_k(x, labels, num_classes, fuzzifier, seed, workers);
}

}  // namespace detail

inline FsgModel train(const LabeledDataset& training, const TrainOptions& opts,
                      TrainTimings* timings = nullptr) {
  if (const auto v = validate_dataset(training); !v.empty()) {
    throw Error(ErrorKind::DataFormat, "invalid training set: " + v.front().message);
  }
  if (!(opts.fuzzifier > 1.0)) throw Error(ErrorKind::InvalidArgument, "fuzzifier must be > 1");
  const std::size_t n = training.size();
  const std::size_t c = training.num_classes();
  const std::size_t spaces = training.num_spaces();
  const auto& labels = training.labels();

  auto t0 = detail::Clock::now();
  std::vector<std::size_t> base_k(spaces, 0);
  std::vector<MembershipMatrix> loo(spaces);
  // Base classifiers are independent; spread spaces over workers and keep
  // each space single-threaded unless there are spare workers.
  const std::size_t outer = std::min<std::size_t>(std::max<std::size_t>(opts.workers, 1), spaces);
  const std::size_t inner = std::max<std::size_t>(1, opts.workers / std::max<std::size_t>(outer, 1));
  parallel_for(spaces, outer, [&](std::size_t j) {
    const auto& x = training.space(j);
    base_k[j] = detail::resolve_k(opts.base_k, x, labels, c, opts.fuzzifier,
                                  derive_seed(opts.seed, 1, j), inner);
    loo[j] = loo_memberships(x, labels, FuzzyKnnConfig{base_k[j], opts.fuzzifier, c}, inner);
  });

  FeatureMatrix fused(n, c * spaces);
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = fused.row(i);
    for (std::size_t j = 0; j < spaces; ++j) {
      std::ranges::copy(loo[j].row(i), dst.begin() + static_cast<std::ptrdiff_t>(j * c));
    }
  }
  if (timings) timings->base_seconds = detail::seconds_since(t0);

  t0 = detail::Clock::now();
  const std::size_t meta_k = detail::resolve_k(opts.meta_k, fused, labels, c, opts.fuzzifier,
                                               derive_seed(opts.seed, 2, 0), opts.workers);
  if (meta_k > n) {
    throw Error(ErrorKind::InsufficientData, "meta k exceeds training size");
  }
  if (timings) timings->meta_seconds = detail::seconds_since(t0);

  return FsgModel(c, opts.fuzzifier, std::move(base_k), meta_k, training.class_names(),
                  training.features().ids, labels,
                  std::vector<FeatureMatrix>(training.features().spaces), std::move(fused));
}

/// Leave-one-out memberships of the meta layer over the stored fused
/// training rows: the fusion-space decision for each training sample.
inline MembershipMatrix fusion_loo_memberships(const FsgModel& model, std::size_t workers = 1) {
  return loo_memberships(model.fused(), model.labels(),
                         {model.meta_k(), model.fuzzifier(), model.num_classes()}, workers);
}

/// Base memberships use the full training set (no exclusion); the meta
/// decision is a fuzzy k-NN over the stored fused training rows.
inline std::vector<Prediction> classify(const FsgModel& model, const FeatureSet& test,
                                        std::size_t workers = 1,
                                        ClassifyTimings* timings = nullptr) {
  if (test.space_dims() != model.space_dims()) {
    throw Error(ErrorKind::DimensionMismatch, "test feature dimensions do not match the model");
  }
  for (const auto& s : test.spaces) {
    if (s.rows() != test.size()) {
      throw Error(ErrorKind::DimensionMismatch, "test space row count != id count");
    }
  }
  const std::size_t n = test.size();
  const std::size_t c = model.num_classes();
  const std::size_t spaces = model.num_spaces();

  auto t0 = detail::Clock::now();
  FeatureMatrix fused(n, c * spaces);
  parallel_for(n, workers, [&](std::size_t i) {
    auto dst = fused.row(i);
    for (std::size_t j = 0; j < spaces; ++j) {
      membership_against_into(dst.subspan(j * c, c), test.spaces[j].row(i), model.spaces()[j],
                              model.labels(), model.base_k()[j], model.fuzzifier());
    }
  });
  if (timings) timings->base_seconds = detail::seconds_since(t0);

  t0 = detail::Clock::now();
  std::vector<std::optional<Prediction>> slots(n);
  parallel_for(n, workers, [&](std::size_t i) {
    std::vector<double> meta(c);
    membership_against_into(meta, fused.row(i), model.fused(), model.labels(), model.meta_k(),
                            model.fuzzifier());
    Prediction p{test.ids[i], predict_crisp(meta), MembershipVector::from_values(meta), {}, {}};
    for (std::size_t j = 0; j < spaces; ++j) {
      auto block = fused.row(i).subspan(j * c, c);
      p.base.push_back(MembershipVector::from_values({block.begin(), block.end()}));
      p.base_predicted.push_back(predict_crisp(block));
    }
    slots[i] = std::move(p);
  });
  if (timings) timings->meta_seconds = detail::seconds_since(t0);

  std::vector<Prediction> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Metrics.

inline double performance(std::span<const ClassIndex> predicted, std::span<const ClassIndex> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorKind::DimensionMismatch, "prediction count != truth count");
  }
  if (truth.empty()) throw Error(ErrorKind::InvalidArgument, "accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

/// Component c is the accuracy over samples whose true class is c, or
/// nullopt when class c does not occur in `truth`.
inline std::vector<std::optional<double>> per_class_performance(
    std::span<const ClassIndex> predicted, std::span<const ClassIndex> truth,
    std::size_t num_classes) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorKind::DimensionMismatch, "prediction count != truth count");
  }
  std::vector<std::size_t> hits(num_classes, 0), totals(num_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes) throw Error(ErrorKind::InvalidArgument, "label out of range");
    ++totals[truth[i]];
    hits[truth[i]] += predicted[i] == truth[i];
  }
  std::vector<std::optional<double>> out(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (totals[c] > 0) out[c] = static_cast<double>(hits[c]) / static_cast<double>(totals[c]);
  }
  return out;
}

inline std::vector<ClassIndex> predicted_labels(std::span<const Prediction> predictions) {
  std::vector<ClassIndex> out;
  for (const auto& p : predictions) out.push_back(p.predicted);
  return out;
}

/// Crisp base-layer decisions, indexed [space][sample].
inline std::vector<std::vector<ClassIndex>> base_predicted_labels(
    std::span<const Prediction> predictions) {
  std::vector<std::vector<ClassIndex>> out;
  if (predictions.empty()) return out;
  out.resize(predictions.front().base_predicted.size());
  for (const auto& p : predictions) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j].push_back(p.base_predicted[j]);
  }
  return out;
}

/// Crisp LOO decisions of the training set, indexed [space][sample].
inline std::vector<std::vector<ClassIndex>> training_base_predictions(const FsgModel& model) {
  std::vector<std::vector<ClassIndex>> out(model.num_spaces());
  const std::size_t c = model.num_classes();
  for (std::size_t j = 0; j < model.num_spaces(); ++j) {
    for (std::size_t i = 0; i < model.num_training(); ++i) {
      out[j].push_back(predict_crisp(model.fused().row(i).subspan(j * c, c)));
    }
  }
  return out;
}

inline double performance(std::span<const Prediction> predictions,
                          std::span<const ClassIndex> truth) {
  const auto p = predicted_labels(predictions);
  return performance(p, truth);
}

}  // namespace fsg

#endif  // FSG_FSG_HPP
