/*
 * include/fsg/error_analysis.hpp
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

// Nearest-neighbor error diagnostics over estimated memberships, decision
// space distances, and base-layer agreement statistics.

#ifndef FSG_ERROR_ANALYSIS_HPP
#define FSG_ERROR_ANALYSIS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fsg/core.hpp"

namespace fsg {

namespace detail {

inline void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "vectors of length " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
}

inline void require_shape(const std::vector<std::vector<ClassIndex>>& base,
                          std::span<const ClassIndex> truth) {
  for (const auto& col : base) {
    if (col.size() != truth.size()) {
      throw Error(ErrorKind::DimensionMismatch, "base prediction column length != truth length");
    }
  }
}

}  // namespace detail

/// Finite-sample nearest-neighbor error 1 - sum_c mu_c(x_i) mu_c(x').
inline double n_sample_error(const MembershipVector& train, const MembershipVector& test) {
  detail::require_same_length(train.values(), test.values());
  double dot = 0.0;
  for (std::size_t c = 0; c < train.size(); ++c) dot += train[c] * test[c];
  return 1.0 - dot;
}

/// Asymptotic nearest-neighbor error 1 - sum_c mu_c(x')^2.
inline double large_sample_error(const MembershipVector& mu) {
  double sq = 0.0;
  for (double v : mu.values()) sq += v * v;
  return 1.0 - sq;
}

/// n_sample_error(train, test) - large_sample_error(test), evaluated
/// directly as sum_c mu_c(x') (mu_c(x') - mu_c(x_i)).
inline double error_difference(const MembershipVector& train, const MembershipVector& test) {
  detail::require_same_length(train.values(), test.values());
  double s = 0.0;
  for (std::size_t c = 0; c < train.size(); ++c) s += test[c] * (test[c] - train[c]);
  return s;
}

/// Squared l2 distance between two decision (or fusion) vectors.
inline double decision_distance(std::span<const double> a, std::span<const double> b) {
  detail::require_same_length(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double decision_distance(const MembershipVector& a, const MembershipVector& b) {
  return decision_distance(a.values(), b.values());
}

inline double decision_distance(const FusionVector& a, const FusionVector& b) {
  if (a.num_classes() != b.num_classes()) {
    throw Error(ErrorKind::DimensionMismatch, "fusion vectors differ in class count");
  }
  return decision_distance(a.values(), b.values());
}

/// Fraction of samples that at least one base classifier gets right.
/// `base` is indexed [classifier][sample].
inline double ave_corr(const std::vector<std::vector<ClassIndex>>& base,
                       std::span<const ClassIndex> truth) {
  detail::require_shape(base, truth);
  if (truth.empty()) throw Error(ErrorKind::InvalidArgument, "ave_corr of an empty set");
  std::size_t covered = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (const auto& col : base) {
      if (col[i] == truth[i]) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(truth.size());
}

/// counts(r, c): samples misclassified by classifier r and correctly
/// classified by classifier c. totals[r]: samples misclassified by r.
struct SharingMatrix {
  std::size_t size = 0;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> totals;

  std::size_t operator()(std::size_t r, std::size_t c) const { return counts[r * size + c]; }
};

inline SharingMatrix sharing_matrix(const std::vector<std::vector<ClassIndex>>& base,
                                    std::span<const ClassIndex> truth) {
  detail::require_shape(base, truth);
  const std::size_t j = base.size();
  SharingMatrix m{j, std::vector<std::size_t>(j * j, 0), std::vector<std::size_t>(j, 0)};
  std::vector<char> right(j);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t r = 0; r < j; ++r) right[r] = base[r][i] == truth[i];
    for (std::size_t r = 0; r < j; ++r) {
      if (right[r]) continue;
      ++m.totals[r];
      for (std::size_t c = 0; c < j; ++c) m.counts[r * j + c] += right[c];
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Cover-Hart band e* <= eps_1NN <= 2 e*.

struct CoverHartResult {
  bool pass = false;
  double lower_margin = 0.0;  // empirical - (bayes - slack); negative = below band
  double upper_margin = 0.0;  // (2 bayes + slack) - empirical; negative = above band
};

inline CoverHartResult cover_hart_check(double empirical_1nn_error, double bayes_error,
                                        double slack) {
  CoverHartResult r;
  r.lower_margin = empirical_1nn_error - (bayes_error - slack);
  r.upper_margin = (2.0 * bayes_error + slack) - empirical_1nn_error;
  r.pass = r.lower_margin >= 0.0 && r.upper_margin >= 0.0;
  return r;
}

/// Default slack: `z` binomial standard errors of an error rate estimated
/// from `n` test samples.
inline double binomial_slack(double error_rate, std::size_t n, double z = 3.0) {
  return z * std::sqrt(error_rate * (1.0 - error_rate) / static_cast<double>(n));
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Bayes error of two equiprobable Gaussians with common isotropic
/// covariance sigma^2 I and means `separation` apart: Phi(-separation / 2 sigma).
inline double two_gaussian_bayes_error(double separation, double sigma) {
  return normal_cdf(-separation / (2.0 * sigma));
}

}  // namespace fsg

#endif  // FSG_ERROR_ANALYSIS_HPP
