/*
 * include/fsg/datagen.hpp
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

// Synthetic Gaussian benchmarks: class-conditional normals per feature
// space, mean-contraction schedules that gradually increase class overlap,
// and the built-in mean-matrix fixtures (mirrored in data/omega/*.csv).

#ifndef FSG_DATAGEN_HPP
#define FSG_DATAGEN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fsg/core.hpp"

namespace fsg {

namespace fixtures {

// avecorr_1.0
inline constexpr double kOmega10[] = {
      -10.0, -10.0, -10.0, -10.0, -10.0, -10.0, -10.0, -10.0, -10.0, -10.0, 10.0, -15.0, -25.0, -25.0,
      -10.0, 10.0, -10.0, 10.0, -10.0, 10.0, -10.0, 10.0, -25.0, -25.0, 0.0, 0.0, -15.0, 10.0,
      10.0, -10.0, 10.0, -10.0, 10.0, -10.0, 20.0, -10.0, 15.0, -15.0, -10.0, -10.0, -25.0, -25.0,
      15.0, 15.0, 15.0, 15.0, 25.0, 25.0, 15.0, 15.0, 15.0, 15.0, 10.0, 10.0, -15.0, 10.0,
      15.0, 5.0, -25.0, 0.0, -15.0, 5.0, -15.0, 5.0, -15.0, 5.0, 15.0, 15.0, 5.0, -10.0,
      -25.0, 0.0, 15.0, 5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 5.0, 0.0, 0.0,
      5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 10.0, 15.0, -25.0, 25.0,
      5.0, -20.0, 5.0, -20.0, 5.0, -20.0, 5.0, -15.0, 5.0, -15.0, -15.0, -10.0, 25.0, -25.0,
      -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, 15.0, 10.0, 25.0, 25.0,
      5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 0.0, 0.0, 25.0, 0.0,
      -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -15.0, 10.0, -10.0, 10.0,
      5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 25.0, -25.0, 10.0, -10.0};

// avecorr_0.9
inline constexpr double kOmega09[] = {
      -20.0, -20.0, -10.0, -10.0, -10.0, -10.0, -10.0, -10.0, 10.0, -10.0, 10.0, -15.0, 15.0, 5.0,
      -20.0, 20.0, -10.0, 10.0, -10.0, 10.0, -10.0, 10.0, -5.0, -10.0, 0.0, 0.0, -5.0, 10.0,
      10.0, -10.0, 20.0, -20.0, 10.0, -10.0, 10.0, -10.0, 15.0, -15.0, -10.0, -10.0, -10.0, -5.0,
      15.0, 15.0, 25.0, 25.0, 5.0, 5.0, -5.0, 10.0, 15.0, 15.0, 10.0, 10.0, -15.0, 10.0,
      15.0, 5.0, -5.0, 0.0, -25.0, 25.0, -10.0, 5.0, -5.0, 5.0, 15.0, 15.0, 5.0, -10.0,
      -5.0, 0.0, 15.0, 5.0, 25.0, 25.0, 15.0, 5.0, 15.0, 5.0, 15.0, 5.0, 0.0, 0.0,
      5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 25.0, 25.0, 5.0, 10.0, 10.0, 15.0, -5.0, 5.0,
      5.0, -20.0, 5.0, -10.0, 5.0, -5.0, 25.0, 25.0, 5.0, -15.0, -15.0, -10.0, 5.0, -5.0,
      -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -25.0, -25.0, 15.0, 10.0, 5.0, 5.0,
      5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 25.0, 25.0, 0.0, 0.0, 5.0, 0.0,
      -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -25.0, 25.0, -10.0, 10.0,
      5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 15.0, -15.0, 25.0, -25.0};

// avecorr_0.8
inline constexpr double kOmega08[] = {
      -12.0, -12.0, -7.5, -7.5, -10.0, -10.0, -7.5, -7.5, 10.0, -10.0, 10.0, -15.0, 10.0, 5.0,
      -10.0, 10.0, -8.0, 8.0, -10.0, 10.0, -10.0, 10.0, -5.0, -10.0, 0.0, 0.0, -5.0, 10.0,
      10.0, -10.0, 10.0, -15.0, 10.0, -10.0, 10.0, -10.0, 10.0, -15.0, -10.0, -10.0, -5.0, -5.0,
      15.0, 15.0, 15.0, 17.5, 5.0, 5.0, -5.0, 10.0, 15.0, 15.0, 10.0, 10.0, -15.0, 10.0,
      15.0, 5.0, -5.0, 0.0, -15.0, 15.0, -10.0, 5.0, -5.0, 5.0, 15.0, 15.0, 5.0, -10.0,
      -5.0, 0.0, 15.0, 5.0, 15.0, 15.0, 10.0, 5.0, 10.0, 5.0, 10.0, 5.0, 0.0, 0.0,
      5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 10.0, 15.0, 5.0, 10.0, 10.0, 15.0, -5.0, 5.0,
      5.0, -15.0, 5.0, -10.0, 5.0, -5.0, 15.0, -15.0, 5.0, -15.0, -15.0, -10.0, 5.0, -5.0,
      -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -10.0, -15.0, 15.0, 10.0, 5.0, 5.0,
      5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 20.0, 20.0, 0.0, 0.0, 5.0, 0.0,
      -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 10.0, -10.0, 10.0,
      5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 15.0, -15.0, 10.0, -15.0};

// avecorr_0.7
inline constexpr double kOmega07[] = {
      -12.5, -12.5, -10.0, -10.0, -10.0, -10.0, -10.0, -10.0, 10.0, -10.0, 10.0, -15.0, 15.0, 5.0,
      -10.0, 15.0, -10.0, 10.0, -10.0, 10.0, -10.0, 10.0, -5.0, -10.0, 0.0, 0.0, -5.0, 10.0,
      10.0, -10.0, 15.0, -15.0, 10.0, -10.0, 10.0, -10.0, 15.0, -15.0, -10.0, -10.0, 10.0, -5.0,
      15.0, 15.0, 19.0, 19.0, 5.0, 5.0, -5.0, 10.0, 15.0, 15.0, 10.0, 10.0, -15.0, 10.0,
      15.0, 5.0, -5.0, 0.0, -17.5, 17.5, -10.0, 5.0, -5.0, 5.0, 15.0, 15.0, 5.0, -10.0,
      -5.0, 0.0, 15.0, 5.0, 17.5, 17.5, 15.0, 5.0, 15.0, 5.0, 15.0, 5.0, 0.0, 0.0,
      5.0, 15.0, 5.0, 15.0, 5.0, 15.0, 17.5, 17.5, 5.0, 10.0, 10.0, 15.0, -5.0, 5.0,
      5.0, -20.0, 5.0, -10.0, 5.0, -5.0, 17.5, -17.5, 5.0, -15.0, -15.0, -10.0, 5.0, -5.0,
      -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -5.0, -15.0, -15.0, 15.0, 10.0, 5.0, 5.0,
      5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 22.5, 22.5, 0.0, 0.0, 5.0, 0.0,
      -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -10.0, 10.0, -10.0, 10.0,
      5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 5.0, -5.0, 15.0, -15.0, 15.0, -15.0};

// twoclass_geom
inline constexpr double kTwoClassGeom[] = {
      2.0, 0.0, -2.0, 0.0,
      0.0, -2.0, 2.0, 2.0};

}  // namespace fixtures

/// A named mean matrix: row c holds the class-c means of every space,
/// concatenated (space 1 x, space 1 y, space 2 x, ...).
struct OmegaFixture {
  std::string name;
  FeatureMatrix omega;
  std::vector<std::size_t> space_dims;
  double variance = 25.0;  // isotropic within-class covariance variance * I

  std::size_t num_classes() const noexcept { return omega.rows(); }
  std::size_t num_spaces() const noexcept { return space_dims.size(); }
};

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"avecorr_1.0", "avecorr_0.9", "avecorr_0.8",
                                              "avecorr_0.7", "twoclass_geom"};
  return names;
}

inline OmegaFixture omega_fixture(std::string_view name) {
  auto make = [&](std::span<const double> values, std::size_t rows, std::size_t spaces,
                  double variance) {
    return OmegaFixture{std::string(name),
                        FeatureMatrix(rows, 2 * spaces, {values.begin(), values.end()}),
                        std::vector<std::size_t>(spaces, 2), variance};
  };
  if (name == "avecorr_1.0") return make(fixtures::kOmega10, 12, 7, 25.0);
  if (name == "avecorr_0.9") return make(fixtures::kOmega09, 12, 7, 25.0);
  if (name == "avecorr_0.8") return make(fixtures::kOmega08, 12, 7, 25.0);
  if (name == "avecorr_0.7") return make(fixtures::kOmega07, 12, 7, 25.0);
  if (name == "twoclass_geom") return make(fixtures::kTwoClassGeom, 2, 2, 1.0);
  throw Error(ErrorKind::InvalidArgument, "unknown fixture '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

/// Class-conditional Gaussians: means[c][j] and covariances[c][j] (D_j x D_j).
struct GaussianSpec {
  std::vector<std::size_t> space_dims;
  std::vector<std::vector<std::vector<double>>> means;
  std::vector<std::vector<FeatureMatrix>> covariances;
  std::size_t per_class = 250;

  std::size_t num_classes() const noexcept { return means.size(); }
  std::size_t num_spaces() const noexcept { return space_dims.size(); }

  /// Means from an omega matrix; every class and space gets variance * I.
  static GaussianSpec from_omega(const FeatureMatrix& omega, std::vector<std::size_t> dims,
                                 double variance, std::size_t per_class) {
    std::size_t total = 0;
    for (auto d : dims) total += d;
    if (omega.cols() != total) {
      throw Error(ErrorKind::DimensionMismatch, "omega columns != sum of space dimensions");
    }
    GaussianSpec spec{std::move(dims), {}, {}, per_class};
    for (std::size_t c = 0; c < omega.rows(); ++c) {
      std::vector<std::vector<double>> row_means;
      std::vector<FeatureMatrix> row_cov;
      std::size_t offset = 0;
      for (auto d : spec.space_dims) {
        auto r = omega.row(c).subspan(offset, d);
        row_means.emplace_back(r.begin(), r.end());
        FeatureMatrix cov(d, d);
        for (std::size_t i = 0; i < d; ++i) cov(i, i) = variance;
        row_cov.push_back(std::move(cov));
        offset += d;
      }
      spec.means.push_back(std::move(row_means));
      spec.covariances.push_back(std::move(row_cov));
    }
    return spec;
  }

  static GaussianSpec from_fixture(const OmegaFixture& f, std::size_t per_class) {
    return from_omega(f.omega, f.space_dims, f.variance, per_class);
  }
};

namespace detail {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Lower Cholesky factor; throws on a covariance that is not symmetric
/// positive definite.
inline DenseMatrix cholesky_factor(const FeatureMatrix& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "covariance must be square");
  }
  Eigen::Map<const DenseMatrix> m(cov.data().data(), static_cast<Eigen::Index>(cov.rows()),
                                  static_cast<Eigen::Index>(cov.cols()));
  if (!m.isApprox(m.transpose(), 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "covariance is not symmetric");
  }
  Eigen::LLT<DenseMatrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "covariance is not positive definite");
  }
  return llt.matrixL();
}

}  // namespace detail

/// n i.i.d. draws from N(means[c][j], covariances[c][j]), as rows. Uses
/// x = mean + L z with L the Cholesky factor and z from Rng::normal().
inline FeatureMatrix sample_class(const GaussianSpec& spec, ClassIndex c, std::size_t j,
                                  std::size_t n, RngSeed seed) {
  if (c >= spec.num_classes() || j >= spec.num_spaces()) {
    throw Error(ErrorKind::InvalidArgument, "class or space index out of range");
  }
  const auto& mean = spec.means[c][j];
  const std::size_t d = spec.space_dims[j];
  if (mean.size() != d) throw Error(ErrorKind::DimensionMismatch, "mean has wrong dimension");
  const auto l = detail::cholesky_factor(spec.covariances[c][j]);
  if (static_cast<std::size_t>(l.rows()) != d) {
    throw Error(ErrorKind::DimensionMismatch, "covariance has wrong dimension");
  }
  Rng rng(seed);
  FeatureMatrix out(n, d);
  Eigen::VectorXd z(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) z(static_cast<Eigen::Index>(a)) = rng.normal();
    const Eigen::VectorXd x = l * z;
    auto row = out.row(i);
    for (std::size_t a = 0; a < d; ++a) row[a] = mean[a] + x(static_cast<Eigen::Index>(a));
  }
  return out;
}

/// All classes and spaces of a spec, class-major sample order. Each
/// (space, class) block draws from its own derived stream.
inline LabeledDataset generate_dataset(const GaussianSpec& spec, RngSeed seed) {
  const std::size_t classes = spec.num_classes();
  std::vector<std::vector<FeatureMatrix>> blocks(spec.num_spaces());
  for (std::size_t j = 0; j < spec.num_spaces(); ++j) {
    for (ClassIndex c = 0; c < classes; ++c) {
      blocks[j].push_back(sample_class(spec, c, j, spec.per_class, derive_seed(seed, j, c)));
    }
  }
  LabeledDataset d(classes, spec.space_dims);
  std::vector<std::string> names;
  for (ClassIndex c = 0; c < classes; ++c) names.push_back("class-" + std::to_string(c + 1));
  d.set_class_names(std::move(names));
  char id[32];
  for (ClassIndex c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      std::snprintf(id, sizeof id, "c%zu-%04zu", c + 1, i);
      LabeledSample s{id, c, {}};
      for (std::size_t j = 0; j < spec.num_spaces(); ++j) {
        auto r = blocks[j][c].row(i);
        s.features.emplace_back(r.begin(), r.end());
      }
      d.add(s);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Overlap schedule.

struct EpochStep {
  std::size_t space = 0;
  ClassIndex target = 0;  // class whose mean stays fixed
  ClassIndex mover = 0;   // class whose mean moves toward the target
  double distance_before = 0.0;
};

struct EpochSchedule {
  std::vector<FeatureMatrix> means;  // means[0] is the initial omega
  std::vector<EpochStep> steps;      // steps[e] turns means[e] into means[e + 1]
  bool converged = false;            // every pairwise distance fell below tolerance
};

inline constexpr std::size_t kDefaultEpochCap = 200;
inline constexpr double kEpochTolerance = 1e-9;

namespace detail {

inline double mean_distance(const FeatureMatrix& omega, std::size_t offset, std::size_t d,
                            ClassIndex a, ClassIndex b) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = omega(a, offset + i) - omega(b, offset + i);
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Each epoch moves exactly one class mean a tenth of the way toward another
/// class mean in one space. The pair is the currently most separated one
/// (ties: lowest space, then lowest class indices); the higher-indexed class
/// of the pair moves. Stops when every pairwise distance is below
/// `tolerance` or after `max_epochs` moves.
inline EpochSchedule generate_epochs(const FeatureMatrix& omega,
                                     std::span<const std::size_t> space_dims,
                                     std::size_t max_epochs = kDefaultEpochCap,
                                     double tolerance = kEpochTolerance) {
  std::size_t total = 0;
  for (auto d : space_dims) total += d;
  if (omega.cols() != total) {
    throw Error(ErrorKind::DimensionMismatch, "omega columns != sum of space dimensions");
  }
  EpochSchedule out;
  out.means.push_back(omega);
  const std::size_t classes = omega.rows();
  for (;;) {
    const FeatureMatrix& cur = out.means.back();
    EpochStep best{};
    double best_distance = -1.0;
    std::size_t offset = 0;
    for (std::size_t j = 0; j < space_dims.size(); ++j) {
      for (ClassIndex a = 0; a < classes; ++a) {
        for (ClassIndex b = a + 1; b < classes; ++b) {
          const double dist = detail::mean_distance(cur, offset, space_dims[j], a, b);
          if (dist > best_distance) {
            best_distance = dist;
            best = {j, a, b, dist};
          }
        }
      }
      offset += space_dims[j];
    }
    if (best_distance < tolerance) {
      out.converged = true;
      break;
    }
    if (out.steps.size() >= max_epochs) break;
    FeatureMatrix next = cur;
    std::size_t off = 0;
    for (std::size_t j = 0; j < best.space; ++j) off += space_dims[j];
    for (std::size_t i = 0; i < space_dims[best.space]; ++i) {
      const double target = cur(best.target, off + i);
      const double mover = cur(best.mover, off + i);
      next(best.mover, off + i) = mover + (target - mover) / 10.0;
    }
    out.steps.push_back(best);
    out.means.push_back(std::move(next));
  }
  return out;
}

/// One generated dataset per epoch of the schedule; epoch e uses seed
/// derive_seed(seed, e).
inline std::vector<LabeledDataset> generate_epoch_datasets(const EpochSchedule& schedule,
                                                           std::span<const std::size_t> dims,
                                                           double variance, std::size_t per_class,
                                                           RngSeed seed) {
  std::vector<LabeledDataset> out;
  for (std::size_t e = 0; e < schedule.means.size(); ++e) {
    const auto spec = GaussianSpec::from_omega(schedule.means[e], {dims.begin(), dims.end()},
                                               variance, per_class);
    out.push_back(generate_dataset(spec, derive_seed(seed, e)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting.

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Per-class random split; each class contributes round(fraction * n_c)
/// samples to the training side (at least one to each side when n_c >= 2).
/// Original sample order is kept within each side.
inline TrainTestSplit split_stratified(const LabeledDataset& d, double train_fraction,
                                       RngSeed seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<char> in_train(d.size(), 0);
  for (ClassIndex c = 0; c < d.num_classes(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.label(i) == c) members.push_back(i);
    rng.shuffle(members);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    for (std::size_t m = 0; m < n_train && m < members.size(); ++m) in_train[members[m]] = 1;
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < d.size(); ++i) (in_train[i] ? train_idx : test_idx).push_back(i);
  return {d.subset(train_idx), d.subset(test_idx)};
}

/// Generates a fixture (per_class samples per class) and splits it.
inline TrainTestSplit build_fixture_dataset(std::string_view name, std::size_t per_class = 250,
                                            double train_fraction = 0.5, RngSeed seed = {}) {
  const auto fixture = omega_fixture(name);
  const auto spec = GaussianSpec::from_fixture(fixture, per_class);
  const auto full = generate_dataset(spec, derive_seed(seed, 0));
  return split_stratified(full, train_fraction, derive_seed(seed, 1));
}

}  // namespace fsg

#endif  // FSG_DATAGEN_HPP
