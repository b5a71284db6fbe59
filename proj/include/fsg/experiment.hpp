/*
 * include/fsg/experiment.hpp
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

// Repeated train/test experiments: data sourcing, per-repetition metrics and
// aggregation. Repetition r runs with seed derive_seed(master, r); inside a
// repetition, stream 0 generates data, stream 1 splits it and stream 2
// drives k selection.

#ifndef FSG_EXPERIMENT_HPP
#define FSG_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fsg/core.hpp"
#include "fsg/datagen.hpp"
#include "fsg/dataset_io.hpp"
#include "fsg/entropy.hpp"
#include "fsg/error_analysis.hpp"
#include "fsg/fsg.hpp"

namespace fsg {

enum class DataMode { MultiFeature, MultiAttribute };

inline constexpr std::size_t kDefaultRepetitions = 10;

struct ExperimentConfig {
  // Source: a fixture name, or files.
  std::string fixture;
  std::size_t per_class = 250;
  DataMode mode = DataMode::MultiFeature;
  std::vector<std::filesystem::path> feature_files;  // multi-feature
  std::filesystem::path label_file;                  // multi-feature
  std::filesystem::path attribute_file;              // multi-attribute
  std::string label_column;                          // multi-attribute

  double fuzzifier = 2.0;
  KPolicy base_k = KPolicy::automatic();
  KPolicy meta_k = KPolicy::automatic();
  double train_fraction = 0.5;
  std::optional<std::filesystem::path> train_ids;  // explicit split: listed ids train
  RngSeed seed{};
  std::size_t repetitions = kDefaultRepetitions;
  std::size_t workers = 1;
  std::size_t bins = kDefaultBins;
  EntropyUnit unit = EntropyUnit::Nats;
  bool entropy = true;
  std::optional<std::size_t> class_limit;  // keep only classes 0 .. limit-1

  bool uses_fixture() const noexcept { return !fixture.empty(); }

  void validate() const {
    if (repetitions < 1) throw Error(ErrorKind::InvalidArgument, "repetitions must be >= 1");
    if (!train_ids && !(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "train fraction must lie in (0, 1)");
    }
    if (!(fuzzifier > 1.0)) throw Error(ErrorKind::InvalidArgument, "fuzzifier must be > 1");
    if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bin count must be >= 1");
    if (uses_fixture()) {
      if (per_class < 2) throw Error(ErrorKind::InvalidArgument, "per-class count must be >= 2");
      return;
    }
    if (mode == DataMode::MultiFeature) {
      if (feature_files.empty() || label_file.empty()) {
        throw Error(ErrorKind::InvalidArgument,
                    "multi-feature mode needs feature files and a label file (or a fixture)");
      }
    } else if (attribute_file.empty()) {
      throw Error(ErrorKind::InvalidArgument, "multi-attribute mode needs a dataset file");
    }
  }
};

struct PhaseTimings {
  double base_train = 0.0;
  double meta_train = 0.0;
  double base_classify = 0.0;
  double meta_classify = 0.0;
};

struct RepetitionResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> error;  // set when the repetition aborted

  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double fsg_accuracy = 0.0;
  std::vector<double> base_accuracy;        // test, per space
  std::vector<double> base_train_accuracy;  // leave-one-out, per space
  std::vector<std::optional<double>> fsg_per_class;
  std::vector<std::vector<std::optional<double>>> base_per_class;  // [space][class]
  double ave_corr = 0.0;
  SharingMatrix sharing;
  std::vector<std::size_t> base_k;
  std::size_t meta_k = 0;
  std::optional<EntropyTable> feature_entropy;
  std::optional<DecisionEntropyAnalysis> decision_entropy;
  std::optional<std::string> entropy_note;
  PhaseTimings timings;

  bool ok() const noexcept { return !error; }
};

/// Means over the successful repetitions.
struct ExperimentAverages {
  std::size_t repetitions = 0;
  double fsg_accuracy = 0.0;
  std::vector<double> base_accuracy;
  std::vector<double> base_train_accuracy;
  std::vector<std::optional<double>> fsg_per_class;
  std::vector<std::vector<std::optional<double>>> base_per_class;
  double ave_corr = 0.0;
  std::vector<double> sharing;  // size x size, row-major
  std::vector<double> sharing_totals;
  std::optional<EntropyTable> feature_entropy;
  std::optional<EntropyTable> decision_entropy;
  PhaseTimings timings;
};

struct ClassCountPoint {
  std::size_t classes = 0;
  double fsg_accuracy = 0.0;
  double mean_base_accuracy = 0.0;
  double best_base_accuracy = 0.0;
};

struct ExperimentReport {
  std::string source;
  std::vector<std::string> class_names;
  std::vector<std::size_t> space_dims;
  std::uint64_t master_seed = 0;
  double fuzzifier = 2.0;
  std::size_t bins = kDefaultBins;
  EntropyUnit unit = EntropyUnit::Nats;
  std::vector<RepetitionResult> repetitions;
  ExperimentAverages averages;
  std::vector<ClassCountPoint> curve;
  std::vector<std::string> diagnostics;

  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::size_t num_spaces() const noexcept { return space_dims.size(); }
  bool complete() const {
    if (repetitions.empty()) return false;
    for (const auto& r : repetitions)
      if (!r.ok()) return false;
    return true;
  }
  std::size_t successful() const {
    std::size_t n = 0;
    for (const auto& r : repetitions) n += r.ok();
    return n;
  }
};

// ---------------------------------------------------------------------------

/// Keeps samples of classes 0 .. limit-1.
inline LabeledDataset restrict_classes(const LabeledDataset& d, std::size_t limit) {
  if (limit < 2 || limit > d.num_classes()) {
    throw Error(ErrorKind::InvalidArgument, "class limit must lie in [2, " +
                                                std::to_string(d.num_classes()) + "]");
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.label(i) < limit) keep.push_back(i);
  const auto sub = d.subset(keep);
  LabeledDataset out(limit, sub.space_dims());
  for (std::size_t i = 0; i < sub.size(); ++i) out.add(sub.sample(i));
  std::vector<std::string> names;
  for (std::size_t c = 0; c < limit; ++c) names.push_back(d.class_name(c));
  out.set_class_names(std::move(names));
  return out;
}

/// Loads a file-backed dataset (fixtures are generated per repetition).
inline LabeledDataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.mode == DataMode::MultiAttribute) {
    return load_multi_attribute(cfg.attribute_file, cfg.label_column);
  }
  return load_multi_feature(cfg.feature_files, cfg.label_file);
}

/// Training side = listed ids, test side = the rest.
inline TrainTestSplit split_by_ids(const LabeledDataset& d, std::span<const std::string> train_ids,
                                   const std::string& source = "split file") {
  std::set<std::string> wanted(train_ids.begin(), train_ids.end());
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (wanted.erase(d.id(i))) {
      train_idx.push_back(i);
    } else {
      test_idx.push_back(i);
    }
  }
  if (!wanted.empty()) {
    throw Error(ErrorKind::DataFormat, source + ": unknown id '" + *wanted.begin() + "'");
  }
  if (train_idx.empty() || test_idx.empty()) {
    throw Error(ErrorKind::DataFormat, source + ": split leaves an empty side");
  }
  return {d.subset(train_idx), d.subset(test_idx)};
}

namespace detail {

struct ExperimentSource {
  std::optional<LabeledDataset> dataset;             // file-backed
  std::optional<std::vector<std::string>> train_ids;  // explicit split
};

inline ExperimentSource prepare_source(const ExperimentConfig& cfg) {
  ExperimentSource src;
  if (!cfg.uses_fixture()) {
    auto d = load_dataset(cfg);
    src.dataset = cfg.class_limit ? restrict_classes(d, *cfg.class_limit) : std::move(d);
  }
  if (cfg.train_ids) src.train_ids = read_id_list(*cfg.train_ids);
  return src;
}

inline TrainTestSplit repetition_split(const ExperimentConfig& cfg, const ExperimentSource& src,
                                       RngSeed rep_seed) {
  LabeledDataset full = [&] {
    if (src.dataset) return *src.dataset;
    const auto spec = GaussianSpec::from_fixture(omega_fixture(cfg.fixture), cfg.per_class);
    auto d = generate_dataset(spec, derive_seed(rep_seed, 0));
    return cfg.class_limit ? restrict_classes(d, *cfg.class_limit) : d;
  }();
  if (src.train_ids) return split_by_ids(full, *src.train_ids, cfg.train_ids->string());
  return split_stratified(full, cfg.train_fraction, derive_seed(rep_seed, 1));
}

inline void add_entropy(const ExperimentConfig& cfg, const FsgModel& model,
                        const LabeledDataset& train, RepetitionResult& r) {
  try {
    r.feature_entropy = feature_entropy_table(train, cfg.bins, cfg.unit);
    if (model.num_spaces() >= 2) {
      std::vector<MembershipMatrix> blocks;
      for (std::size_t j = 0; j < model.num_spaces(); ++j) blocks.push_back(model.loo_block(j));
      r.decision_entropy =
          decision_entropy_analysis(blocks, fusion_loo_memberships(model), train.labels(),
                                    train.num_classes(), cfg.bins, cfg.unit);
    }
  } catch (const Error& e) {
    r.feature_entropy.reset();
    r.decision_entropy.reset();
    r.entropy_note = std::string("entropy skipped: ") + e.what();
  }
}

}  // namespace detail

/// One repetition on a prepared split.
inline RepetitionResult run_repetition(const ExperimentConfig& cfg, const TrainTestSplit& split,
                                       std::size_t index, RngSeed rep_seed, std::size_t workers) {
  RepetitionResult r;
  r.index = index;
  r.seed = rep_seed.value;
  r.train_size = split.train.size();
  r.test_size = split.test.size();

  TrainOptions opts;
  opts.fuzzifier = cfg.fuzzifier;
  opts.base_k = cfg.base_k;
  opts.meta_k = cfg.meta_k;
  opts.seed = derive_seed(rep_seed, 2);
  opts.workers = workers;
  TrainTimings tt;
  const auto model = train(split.train, opts, &tt);
  ClassifyTimings ct;
  const auto preds = classify(model, split.test.features(), workers, &ct);

  const auto& truth = split.test.labels();
  const std::size_t c = split.train.num_classes();
  const auto fsg_pred = predicted_labels(preds);
  const auto base_pred = base_predicted_labels(preds);
  r.fsg_accuracy = performance(fsg_pred, truth);
  r.fsg_per_class = per_class_performance(fsg_pred, truth, c);
  for (std::size_t j = 0; j < model.num_spaces(); ++j) {
    r.base_accuracy.push_back(performance(base_pred[j], truth));
    r.base_per_class.push_back(per_class_performance(base_pred[j], truth, c));
    r.base_train_accuracy.push_back(model.training_accuracy(j));
  }
  r.ave_corr = ave_corr(base_pred, truth);
  r.sharing = sharing_matrix(base_pred, truth);
  r.base_k = model.base_k();
  r.meta_k = model.meta_k();
  r.timings = {tt.base_seconds, tt.meta_seconds, ct.base_seconds, ct.meta_seconds};
  if (cfg.entropy) detail::add_entropy(cfg, model, split.train, r);
  return r;
}

namespace detail {

inline std::optional<double> mean_optional(const std::vector<std::optional<double>>& xs) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs) {
    if (x) {
      s += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

inline std::optional<EntropyTable> mean_tables(const std::vector<const EntropyTable*>& tables) {
  if (tables.empty()) return std::nullopt;
  EntropyTable out = *tables.front();
  for (std::size_t t = 1; t < tables.size(); ++t) {
    for (std::size_t r = 0; r < out.values.size(); ++r)
      for (std::size_t c = 0; c < out.values[r].size(); ++c)
        out.values[r][c] += tables[t]->values[r][c];
  }
  for (auto& row : out.values)
    for (auto& v : row) v /= static_cast<double>(tables.size());
  return out;
}

}  // namespace detail

/// Averages over the successful repetitions.
inline ExperimentAverages average_repetitions(std::span<const RepetitionResult> reps,
                                              std::size_t num_classes, std::size_t num_spaces) {
  ExperimentAverages a;
  std::vector<const RepetitionResult*> ok;
  for (const auto& r : reps)
    if (r.ok()) ok.push_back(&r);
  a.repetitions = ok.size();
  if (ok.empty()) return a;
  const double n = static_cast<double>(ok.size());
  a.base_accuracy.assign(num_spaces, 0.0);
  a.base_train_accuracy.assign(num_spaces, 0.0);
  a.sharing.assign(num_spaces * num_spaces, 0.0);
  a.sharing_totals.assign(num_spaces, 0.0);
  for (const auto* r : ok) {
    a.fsg_accuracy += r->fsg_accuracy;
    a.ave_corr += r->ave_corr;
    for (std::size_t j = 0; j < num_spaces; ++j) {
      a.base_accuracy[j] += r->base_accuracy[j];
      a.base_train_accuracy[j] += r->base_train_accuracy[j];
      a.sharing_totals[j] += static_cast<double>(r->sharing.totals[j]);
    }
    for (std::size_t e = 0; e < a.sharing.size(); ++e) {
      a.sharing[e] += static_cast<double>(r->sharing.counts[e]);
    }
    a.timings.base_train += r->timings.base_train;
    a.timings.meta_train += r->timings.meta_train;
    a.timings.base_classify += r->timings.base_classify;
    a.timings.meta_classify += r->timings.meta_classify;
  }
  a.fsg_accuracy /= n;
  a.ave_corr /= n;
  for (auto* v : {&a.base_accuracy, &a.base_train_accuracy, &a.sharing, &a.sharing_totals})
    for (auto& x : *v) x /= n;
  a.timings.base_train /= n;
  a.timings.meta_train /= n;
  a.timings.base_classify /= n;
  a.timings.meta_classify /= n;

  for (std::size_t c = 0; c < num_classes; ++c) {
    std::vector<std::optional<double>> xs;
    for (const auto* r : ok) xs.push_back(r->fsg_per_class[c]);
    a.fsg_per_class.push_back(detail::mean_optional(xs));
  }
  a.base_per_class.resize(num_spaces);
  for (std::size_t j = 0; j < num_spaces; ++j) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      std::vector<std::optional<double>> xs;
      for (const auto* r : ok) xs.push_back(r->base_per_class[j][c]);
      a.base_per_class[j].push_back(detail::mean_optional(xs));
    }
  }

  std::vector<const EntropyTable*> feature, decision;
  for (const auto* r : ok) {
    if (r->feature_entropy) feature.push_back(&*r->feature_entropy);
    if (r->decision_entropy) decision.push_back(&r->decision_entropy->table);
  }
  if (feature.size() == ok.size()) a.feature_entropy = detail::mean_tables(feature);
  if (decision.size() == ok.size()) a.decision_entropy = detail::mean_tables(decision);
  return a;
}

/// Runs cfg.repetitions repetitions. A failing repetition is recorded with
/// its diagnostic and the report is flagged incomplete; source errors
/// (unreadable or malformed files, bad config) propagate.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto src = detail::prepare_source(cfg);

  ExperimentReport report;
  report.master_seed = cfg.seed.value;
  report.fuzzifier = cfg.fuzzifier;
  report.bins = cfg.bins;
  report.unit = cfg.unit;
  if (src.dataset) {
    report.source = cfg.mode == DataMode::MultiAttribute ? cfg.attribute_file.string()
                                                         : cfg.label_file.string();
    report.class_names = src.dataset->class_names();
    report.space_dims = src.dataset->space_dims();
  } else {
    const auto f = omega_fixture(cfg.fixture);
    report.source = cfg.fixture;
    report.space_dims = f.space_dims;
    const std::size_t c = cfg.class_limit.value_or(f.num_classes());
    if (c < 2 || c > f.num_classes()) {
      throw Error(ErrorKind::InvalidArgument, "class limit must lie in [2, " +
                                                  std::to_string(f.num_classes()) + "]");
    }
    for (std::size_t k = 0; k < c; ++k) report.class_names.push_back("class-" + std::to_string(k + 1));
  }

  const std::size_t reps = cfg.repetitions;
  const std::size_t hw = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : cfg.workers;
  const std::size_t outer = std::min(hw, reps);
  const std::size_t inner = outer > 1 ? 1 : hw;
  report.repetitions.resize(reps);
  parallel_for(reps, outer, [&](std::size_t r) {
    const RngSeed rep_seed = derive_seed(cfg.seed, r);
    try {
      const auto split = detail::repetition_split(cfg, src, rep_seed);
      report.repetitions[r] = run_repetition(cfg, split, r, rep_seed, inner);
    } catch (const std::exception& e) {
      RepetitionResult failed;
      failed.index = r;
      failed.seed = rep_seed.value;
      failed.error = e.what();
      report.repetitions[r] = std::move(failed);
    }
  });
  for (const auto& r : report.repetitions) {
    if (r.error) {
      report.diagnostics.push_back("repetition " + std::to_string(r.index) + ": " + *r.error);
    }
  }
  report.averages =
      average_repetitions(report.repetitions, report.num_classes(), report.num_spaces());
  return report;
}

/// Average accuracies as the number of classes grows: classes 0 .. m-1 for
/// every m in `counts`.
inline std::vector<ClassCountPoint> class_count_curve(ExperimentConfig cfg,
                                                      std::span<const std::size_t> counts) {
  std::vector<ClassCountPoint> out;
  for (auto m : counts) {
    cfg.class_limit = m;
    cfg.entropy = false;
    const auto rep = run_experiment(cfg);
    if (rep.averages.repetitions == 0) {
      throw Error(ErrorKind::InsufficientData,
                  "no successful repetition with " + std::to_string(m) + " classes");
    }
    ClassCountPoint p{m, rep.averages.fsg_accuracy, 0.0, 0.0};
    for (double b : rep.averages.base_accuracy) {
      p.mean_base_accuracy += b / static_cast<double>(rep.averages.base_accuracy.size());
      p.best_base_accuracy = std::max(p.best_base_accuracy, b);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace fsg

#endif  // FSG_EXPERIMENT_HPP
