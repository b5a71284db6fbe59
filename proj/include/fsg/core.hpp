/*
 * include/fsg/core.hpp
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

#ifndef FSG_CORE_HPP
#define FSG_CORE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace fsg {

using ClassIndex = std::size_t;

/// Tolerance on the sum of a single membership vector.
inline constexpr double kMembershipTolerance = 1e-9;
/// Tolerance on the sum of a fusion vector (J accumulated blocks).
inline constexpr double kFusionTolerance = 1e-8;

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  InsufficientData,
  DataFormat,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Seeded randomness. Everything random in the library is driven from here so
// that a (seed, config) pair reproduces bit-identical data on one platform.

struct RngSeed {
  std::uint64_t value = 0;
  friend bool operator==(RngSeed, RngSeed) = default;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent child seed for a named stream; a pure function of its inputs.
inline RngSeed derive_seed(RngSeed base, std::uint64_t stream) {
  return RngSeed{splitmix64(splitmix64(base.value) ^ splitmix64(~stream))};
}

inline RngSeed derive_seed(RngSeed base, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

/// mt19937_64 plus fully specified transforms (no implementation-defined
/// std:: distributions), so streams are identical across standard libraries.
/// Normals use the Box-Muller transform on 53-bit uniforms in (0, 1].
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), by rejection.
  std::size_t uniform_index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Dense row-major matrix used for feature spaces and membership tables.

class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "matrix data size " + std::to_string(data_.size()) +
                      " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const noexcept { return data_; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "row of length " + std::to_string(values.size()) +
                      " appended to matrix with " + std::to_string(cols_) + " columns");
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out(indices.size(), cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
      std::ranges::copy(row(indices[r]), out.row(r).begin());
    }
    return out;
  }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using MembershipMatrix = FeatureMatrix;

// ---------------------------------------------------------------------------
// Samples and datasets.

struct LabeledSample {
  std::string id;
  ClassIndex label = 0;
  std::vector<std::vector<double>> features;  // one vector per feature space
};

/// Sample ids plus one feature matrix per space; rows are aligned.
struct FeatureSet {
  std::vector<std::string> ids;
  std::vector<FeatureMatrix> spaces;

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t num_spaces() const noexcept { return spaces.size(); }
  std::vector<std::size_t> space_dims() const {
    std::vector<std::size_t> dims;
    for (const auto& s : spaces) dims.push_back(s.cols());
    return dims;
  }
  FeatureSet select(std::span<const std::size_t> indices) const {
    FeatureSet out;
    for (auto i : indices) out.ids.push_back(ids[i]);
    for (const auto& s : spaces) out.spaces.push_back(s.select_rows(indices));
    return out;
  }
};

/// Column-major-by-space storage of labeled samples. Shapes are enforced on
/// insertion; content checks (finite values, class coverage) live in
/// validate_dataset.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::size_t num_classes, std::vector<std::size_t> space_dims)
      : num_classes_(num_classes) {
    for (auto d : space_dims) features_.spaces.emplace_back(0, d);
  }

  static LabeledDataset from_samples(std::span<const LabeledSample> samples,
                                     std::size_t num_classes,
                                     std::vector<std::size_t> space_dims) {
    LabeledDataset d(num_classes, std::move(space_dims));
    for (const auto& s : samples) d.add(s);
    return d;
  }

  void add(const LabeledSample& s) {
    if (s.features.size() != num_spaces()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sample '" + s.id + "' has " + std::to_string(s.features.size()) +
                      " feature spaces, expected " + std::to_string(num_spaces()));
    }
    for (std::size_t j = 0; j < num_spaces(); ++j) {
      if (s.features[j].size() != features_.spaces[j].cols()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "sample '" + s.id + "' space " + std::to_string(j) + " has dimension " +
                        std::to_string(s.features[j].size()) + ", expected " +
                        std::to_string(features_.spaces[j].cols()));
      }
    }
    for (std::size_t j = 0; j < num_spaces(); ++j) features_.spaces[j].append_row(s.features[j]);
    features_.ids.push_back(s.id);
    labels_.push_back(s.label);
  }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t num_spaces() const noexcept { return features_.spaces.size(); }
  std::vector<std::size_t> space_dims() const { return features_.space_dims(); }

  const FeatureSet& features() const noexcept { return features_; }
  const FeatureMatrix& space(std::size_t j) const { return features_.spaces.at(j); }
  const std::vector<ClassIndex>& labels() const noexcept { return labels_; }
  ClassIndex label(std::size_t i) const { return labels_.at(i); }
  const std::string& id(std::size_t i) const { return features_.ids.at(i); }

  LabeledSample sample(std::size_t i) const {
    LabeledSample s{id(i), label(i), {}};
    for (const auto& m : features_.spaces) {
      auto r = m.row(i);
      s.features.emplace_back(r.begin(), r.end());
    }
    return s;
  }

  /// Display names for class indices; defaults to "0".."C-1".
  const std::vector<std::string>& class_names() const { return class_names_; }
  void set_class_names(std::vector<std::string> names) {
    if (!names.empty() && names.size() != num_classes_) {
      throw Error(ErrorKind::InvalidArgument, "class name count does not match C");
    }
    class_names_ = std::move(names);
  }
  std::string class_name(ClassIndex c) const {
    return c < class_names_.size() ? class_names_[c] : std::to_string(c);
  }

  LabeledDataset subset(std::span<const std::size_t> indices) const {
    LabeledDataset out;
    out.num_classes_ = num_classes_;
    out.class_names_ = class_names_;
    out.features_ = features_.select(indices);
    for (auto i : indices) out.labels_.push_back(labels_.at(i));
    return out;
  }

  /// Dataset restricted to the given feature spaces, in the given order.
  LabeledDataset select_spaces(std::span<const std::size_t> spaces) const {
    LabeledDataset out;
    out.num_classes_ = num_classes_;
    out.class_names_ = class_names_;
    out.labels_ = labels_;
    out.features_.ids = features_.ids;
    for (auto j : spaces) out.features_.spaces.push_back(features_.spaces.at(j));
    return out;
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(num_classes_, 0);
    for (auto l : labels_)
      if (l < num_classes_) ++counts[l];
    return counts;
  }

 private:
  std::size_t num_classes_ = 0;
  FeatureSet features_;
  std::vector<ClassIndex> labels_;
  std::vector<std::string> class_names_;
};

// ---------------------------------------------------------------------------
// Membership and fusion vectors.

/// A point on the probability simplex: one classifier's decision.
class MembershipVector {
 public:
  static MembershipVector from_values(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::InvalidArgument, "empty membership vector");
    double sum = 0.0;
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "membership component outside [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kMembershipTolerance) {
      throw Error(ErrorKind::InvalidArgument,
                  "membership components sum to " + std::to_string(sum));
    }
    return MembershipVector(std::move(values));
  }

  static MembershipVector one_hot(std::size_t num_classes, ClassIndex c) {
    if (c >= num_classes) throw Error(ErrorKind::InvalidArgument, "class index out of range");
    std::vector<double> v(num_classes, 0.0);
    v[c] = 1.0;
    return MembershipVector(std::move(v));
  }

  static MembershipVector uniform(std::size_t num_classes) {
    if (num_classes == 0) throw Error(ErrorKind::InvalidArgument, "empty membership vector");
    return MembershipVector(std::vector<double>(num_classes, 1.0 / static_cast<double>(num_classes)));
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t c) const { return values_[c]; }

  friend bool operator==(const MembershipVector&, const MembershipVector&) = default;

 private:
  explicit MembershipVector(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

/// Concatenation of J membership vectors, block j at [j*C, (j+1)*C).
class FusionVector {
 public:
  static FusionVector concatenate(std::span<const MembershipVector> blocks) {
    if (blocks.empty()) throw Error(ErrorKind::InvalidArgument, "fusion of zero blocks");
    const std::size_t c = blocks.front().size();
    std::vector<double> values;
    values.reserve(c * blocks.size());
    for (const auto& b : blocks) {
      if (b.size() != c) {
        throw Error(ErrorKind::DimensionMismatch, "fusion blocks differ in class count");
      }
      values.insert(values.end(), b.values().begin(), b.values().end());
    }
    return FusionVector(std::move(values), c);
  }

  static FusionVector from_values(std::vector<double> values, std::size_t num_classes) {
    if (num_classes == 0 || values.empty() || values.size() % num_classes != 0) {
      throw Error(ErrorKind::DimensionMismatch, "fusion length is not a multiple of C");
    }
    const std::size_t blocks = values.size() / num_classes;
    double total = 0.0;
    for (std::size_t j = 0; j < blocks; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < num_classes; ++c) {
        const double v = values[j * num_classes + c];
        if (!std::isfinite(v) || v < 0.0) {
          throw Error(ErrorKind::InvalidArgument, "fusion component outside [0, 1]");
        }
        s += v;
      }
      if (std::abs(s - 1.0) > kMembershipTolerance) {
        throw Error(ErrorKind::InvalidArgument, "fusion block does not sum to 1");
      }
      total += s;
    }
    if (std::abs(total - static_cast<double>(blocks)) > kFusionTolerance) {
      throw Error(ErrorKind::InvalidArgument, "fusion vector does not sum to J");
    }
    return FusionVector(std::move(values), num_classes);
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t num_blocks() const noexcept { return values_.size() / num_classes_; }
  std::span<const double> block(std::size_t j) const {
    return std::span<const double>(values_).subspan(j * num_classes_, num_classes_);
  }

 private:
  FusionVector(std::vector<double> v, std::size_t c) : values_(std::move(v)), num_classes_(c) {}
  std::vector<double> values_;
  std::size_t num_classes_;
};

// ---------------------------------------------------------------------------
// Validation.

struct Violation {
  enum class Kind { EmptyDataset, DimensionMismatch, NonFinite, LabelOutOfRange, EmptyClass };
  Kind kind;
  std::size_t sample = 0;  // meaningful for per-sample kinds
  std::size_t space = 0;   // meaningful for DimensionMismatch / NonFinite
  std::string message;
};

struct ValidationOptions {
  bool require_all_classes = true;  // training sets only
};

inline std::vector<Violation> validate_samples(std::span<const LabeledSample> samples,
                                               std::size_t num_classes,
                                               std::span<const std::size_t> space_dims,
                                               ValidationOptions opts = {}) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  if (samples.empty()) {
    out.push_back({K::EmptyDataset, 0, 0, "empty dataset"});
    return out;
  }
  std::vector<std::size_t> seen(num_classes, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.label >= num_classes) {
      out.push_back({K::LabelOutOfRange, i, 0,
                     "sample " + std::to_string(i) + ": label " + std::to_string(s.label) +
                         " >= C=" + std::to_string(num_classes)});
    } else {
      ++seen[s.label];
    }
    if (s.features.size() != space_dims.size()) {
      out.push_back({K::DimensionMismatch, i, 0,
                     "sample " + std::to_string(i) + ": " + std::to_string(s.features.size()) +
                         " feature spaces, expected " + std::to_string(space_dims.size())});
      continue;
    }
    for (std::size_t j = 0; j < space_dims.size(); ++j) {
      if (s.features[j].size() != space_dims[j]) {
        out.push_back({K::DimensionMismatch, i, j,
                       "sample " + std::to_string(i) + ", space " + std::to_string(j) +
                           ": dimension " + std::to_string(s.features[j].size()) +
                           ", expected " + std::to_string(space_dims[j])});
        continue;
      }
      if (!std::ranges::all_of(s.features[j], [](double v) { return std::isfinite(v); })) {
        out.push_back({K::NonFinite, i, j,
                       "sample " + std::to_string(i) + ", space " + std::to_string(j) +
                           ": non-finite value"});
      }
    }
  }
  if (opts.require_all_classes) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (seen[c] == 0) {
        out.push_back({K::EmptyClass, 0, 0, "class " + std::to_string(c) + " has no samples"});
      }
    }
  }
  return out;
}

inline std::vector<Violation> validate_dataset(const LabeledDataset& d,
                                               ValidationOptions opts = {}) {
  std::vector<LabeledSample> samples;
  samples.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) samples.push_back(d.sample(i));
  const auto dims = d.space_dims();
  return validate_samples(samples, d.num_classes(), dims, opts);
}

// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware).
/// Each index is visited exactly once; fn must only write to its own slot.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fsg

#endif  // FSG_CORE_HPP
