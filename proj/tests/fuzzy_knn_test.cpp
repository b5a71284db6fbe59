/*
 * tests/fuzzy_knn_test.cpp
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

#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "fsg/fuzzy_knn.hpp"
#include "test_support.hpp"

namespace fsg {
namespace {

using testing::naive_membership;
using testing::naive_neighbors;

std::vector<double> row_vec(const FeatureMatrix& m, std::size_t i) {
  auto r = m.row(i);
  return {r.begin(), r.end()};
}

TEST(EuclideanDistance, Examples) {
  const std::vector<double> o{0, 0}, p{3, 4}, a{1, 1}, b{2, 3};
  EXPECT_DOUBLE_EQ(euclidean_distance(o, p), 5.0);
  EXPECT_DOUBLE_EQ(euclidean_distance(p, p), 0.0);
  EXPECT_NEAR(euclidean_distance(a, b), 2.23607, 1e-5);
  EXPECT_DOUBLE_EQ(euclidean_distance(a, b), euclidean_distance(b, a));
  const std::vector<double> c{1, 2, 3};
  EXPECT_THROW(euclidean_distance(a, c), Error);
}

TEST(FindKNearest, QueryEqualToTrainingRow) {
  Rng rng(RngSeed{1});
  const auto x = testing::random_matrix(rng, 10, 3);
  const auto nb = find_k_nearest(x.row(5), x, 1);
  ASSERT_EQ(nb.size(), 1u);
  EXPECT_EQ(nb[0].index, 5u);
  EXPECT_EQ(nb[0].distance, 0.0);
}

TEST(FindKNearest, CollinearOrdering) {
  const FeatureMatrix x(3, 1, {3.0, 1.0, 2.0});
  const std::vector<double> q{0.0};
  const auto nb = find_k_nearest(q, x, 2);
  ASSERT_EQ(nb.size(), 2u);
  EXPECT_EQ(nb[0].index, 1u);
  EXPECT_EQ(nb[1].index, 2u);
  EXPECT_DOUBLE_EQ(nb[0].distance, 1.0);
  EXPECT_DOUBLE_EQ(nb[1].distance, 2.0);
}

TEST(FindKNearest, MatchesFullSortOracle) {
  Rng rng(RngSeed{2});
  const auto x = testing::random_matrix(rng, 50, 4);
  std::vector<double> q(4);
  for (auto& v : q) v = rng.uniform();
  const auto nb = find_k_nearest(q, x, 7);
  const auto oracle = naive_neighbors(q, x, 7);
  ASSERT_EQ(nb.size(), oracle.size());
  for (std::size_t n = 0; n < nb.size(); ++n) {
    EXPECT_EQ(nb[n].index, oracle[n].second);
    EXPECT_EQ(nb[n].distance, oracle[n].first);
  }
}

TEST(FindKNearest, TiesResolvedByLowerIndex) {
  // Four points at distance 1 from the origin; k = 2 keeps indices 0 and 1.
  const FeatureMatrix x(4, 2, {0, 1, 1, 0, 0, -1, -1, 0});
  const std::vector<double> q{0.0, 0.0};
  const auto nb = find_k_nearest(q, x, 2);
  EXPECT_EQ(nb[0].index, 0u);
  EXPECT_EQ(nb[1].index, 1u);
}

TEST(FindKNearest, KEqualsNReturnsAllSorted) {
  Rng rng(RngSeed{3});
  const auto x = testing::random_matrix(rng, 20, 2);
  const std::vector<double> q{0.5, 0.5};
  const auto nb = find_k_nearest(q, x, 20);
  std::set<std::size_t> idx;
  for (std::size_t n = 0; n < nb.size(); ++n) {
    idx.insert(nb[n].index);
    if (n > 0) {
      EXPECT_LE(nb[n - 1].distance, nb[n].distance);
    }
  }
  EXPECT_EQ(idx.size(), 20u);
}

TEST(FindKNearest, KLargerThanPoolIsInsufficientData) {
  const FeatureMatrix x(3, 1, {1.0, 2.0, 3.0});
  const std::vector<double> q{0.0};
  try {
    find_k_nearest(q, x, 4);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
  }
  EXPECT_THROW(find_k_nearest(q, x, 3, 0), Error);
}

TEST(FuzzyMembership, SingleNeighborIsOneHot) {
  const NeighborList nb{{0, 0.7}};
  const std::vector<ClassIndex> labels{2};
  const auto mu = fuzzy_membership(nb, labels, {1, 2.0, 3});
  EXPECT_EQ(mu[2], 1.0);
  EXPECT_EQ(mu[0], 0.0);
}

TEST(FuzzyMembership, HandEvaluatedWeights) {
  // phi = 2: weights d^-2 = (1, 0.25, 0.25), classes (A, B, A).
  const NeighborList nb{{0, 1.0}, {1, 2.0}, {2, 2.0}};
  const std::vector<ClassIndex> labels{0, 1, 0};
  const auto mu = fuzzy_membership(nb, labels, {3, 2.0, 2});
  EXPECT_NEAR(mu[0], 1.25 / 1.5, 1e-12);
  EXPECT_NEAR(mu[1], 0.25 / 1.5, 1e-12);
  EXPECT_NEAR(mu[0], 0.83333, 1e-5);
}

TEST(FuzzyMembership, ZeroDistanceIsLimitOfWeighting) {
  const NeighborList exact{{0, 0.0}, {1, 0.0}, {2, 0.5}, {3, 1.0}};
  const std::vector<ClassIndex> labels{0, 1, 1, 2};
  const auto mu = fuzzy_membership(exact, labels, {4, 2.0, 3});
  EXPECT_DOUBLE_EQ(mu[0], 0.5);
  EXPECT_DOUBLE_EQ(mu[1], 0.5);
  EXPECT_EQ(mu[2], 0.0);
  // Direct weighting at 1e-12 in place of 0 agrees to within rounding.
  const double w0 = std::pow(1e-12, -2.0), w2 = std::pow(0.5, -2.0), w3 = 1.0;
  const double total = 2 * w0 + w2 + w3;
  EXPECT_NEAR(mu[0], w0 / total, 1e-12);
  EXPECT_NEAR(mu[1], (w0 + w2) / total, 1e-12);
}

TEST(FuzzyMembership, InvariantUnderDistanceRescaling) {
  Rng rng(RngSeed{4});
  for (int t = 0; t < 100; ++t) {
    NeighborList nb;
    std::vector<ClassIndex> labels;
    for (std::size_t n = 0; n < 6; ++n) {
      nb.push_back({n, 0.1 + rng.uniform()});
      labels.push_back(rng.uniform_index(3));
    }
    const double phi = 1.2 + 3.0 * rng.uniform();
    const auto a = fuzzy_membership(nb, labels, {6, phi, 3});
    const double lambda = 0.01 + 100.0 * rng.uniform();
    for (auto& n : nb) n.distance *= lambda;
    const auto b = fuzzy_membership(nb, labels, {6, phi, 3});
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(a[c], b[c], 1e-12);
  }
}

TEST(FuzzyMembership, UnanimousNeighborsGiveExactOneHot) {
  const NeighborList nb{{0, 0.3}, {1, 1.7}, {2, 2.2}};
  const std::vector<ClassIndex> labels{1, 1, 1};
  const auto mu = fuzzy_membership(nb, labels, {3, 2.5, 3});
  EXPECT_EQ(mu[1], 1.0);
  EXPECT_EQ(mu[0], 0.0);
}

TEST(FuzzyMembership, MatchesDirectFormula) {
  Rng rng(RngSeed{5});
  for (int t = 0; t < 200; ++t) {
    const auto x = testing::random_matrix(rng, 30, 3);
    std::vector<ClassIndex> labels(30);
    for (auto& l : labels) l = rng.uniform_index(4);
    std::vector<double> q(3);
    for (auto& v : q) v = rng.uniform();
    const double phi = 1.5 + rng.uniform() * 2.0;
    const std::size_t k = 1 + rng.uniform_index(10);
    const auto nb = find_k_nearest(q, x, k);
    std::vector<ClassIndex> nl;
    for (const auto& n : nb) nl.push_back(labels[n.index]);
    const auto mu = fuzzy_membership(nb, nl, {k, phi, 4});
    const auto oracle = naive_membership(naive_neighbors(q, x, k), labels, 4, phi);
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(mu[c], oracle[c], 1e-12);
  }
}

TEST(FuzzyKnnConfig, RejectsInvalidParameters) {
  EXPECT_THROW((FuzzyKnnConfig{0, 2.0, 2}.validate()), Error);
  EXPECT_THROW((FuzzyKnnConfig{1, 1.0, 2}.validate()), Error);
  EXPECT_THROW((FuzzyKnnConfig{1, 0.5, 2}.validate()), Error);
  EXPECT_NO_THROW((FuzzyKnnConfig{1, 1.0001, 2}.validate()));
}

TEST(LooMemberships, TwoSamplesSeeEachOther) {
  const FeatureMatrix x(2, 1, {0.0, 1.0});
  const std::vector<ClassIndex> labels{0, 1};
  const auto m = loo_memberships(x, labels, {1, 2.0, 2});
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(1, 0), 1.0);
}

TEST(LooMemberships, DuplicatedVectorSameClass) {
  const FeatureMatrix x(3, 2, {1, 1, 1, 1, 5, 5});
  const std::vector<ClassIndex> labels{1, 1, 0};
  const auto m = loo_memberships(x, labels, {1, 2.0, 2});
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(1, 1), 1.0);
}

TEST(LooMemberships, MatchesPerRowRecomputationOnBlobs) {
  const auto d = testing::blobs(10, 3, {2}, 2.0, 9);
  const auto m = loo_memberships(d.space(0), d.labels(), {3, 2.0, 3});
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto nb = naive_neighbors(row_vec(d.space(0), i), d.space(0), 3, static_cast<long>(i));
    for (const auto& [dist, idx] : nb) EXPECT_NE(idx, i);
    const auto oracle = naive_membership(nb, d.labels(), 3, 2.0);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(m(i, c), oracle[c], 1e-12) << "row " << i;
  }
}

TEST(LooMemberships, RowIndependentOfOwnLabel) {
  const auto d = testing::blobs(8, 2, {2}, 1.0, 10);
  auto labels = d.labels();
  const auto before = loo_memberships(d.space(0), labels, {3, 2.0, 2});
  labels[4] = 1 - labels[4];
  const auto after = loo_memberships(d.space(0), labels, {3, 2.0, 2});
  for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(before(4, c), after(4, c));
}

TEST(LooMemberships, InsufficientData) {
  const FeatureMatrix x(3, 1, {1.0, 2.0, 3.0});
  const std::vector<ClassIndex> labels{0, 1, 0};
  EXPECT_THROW(loo_memberships(x, labels, {3, 2.0, 2}), Error);
}

TEST(LooMemberships, WorkerCountDoesNotChangeResult) {
  const auto d = testing::blobs(40, 3, {3}, 1.0, 12);
  const auto a = loo_memberships(d.space(0), d.labels(), {5, 2.0, 3}, 1);
  const auto b = loo_memberships(d.space(0), d.labels(), {5, 2.0, 3}, 4);
  EXPECT_EQ(a, b);
}

TEST(PredictCrisp, Examples) {
  EXPECT_EQ(predict_crisp(MembershipVector::from_values({0.1, 0.7, 0.2})), 1u);
  EXPECT_EQ(predict_crisp(MembershipVector::from_values({0.5, 0.5})), 0u);
  EXPECT_EQ(predict_crisp(MembershipVector::one_hot(5, 3)), 3u);
}

TEST(StratifiedFolds, BalancedPerClass) {
  std::vector<ClassIndex> labels;
  for (int i = 0; i < 23; ++i) labels.push_back(0);
  for (int i = 0; i < 17; ++i) labels.push_back(1);
  const auto folds = stratified_folds(labels, 2, 5, RngSeed{1});
  for (ClassIndex c = 0; c < 2; ++c) {
    std::vector<int> per(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) ++per[folds[i]];
    const auto [lo, hi] = std::minmax_element(per.begin(), per.end());
    EXPECT_LE(*hi - *lo, 1);
  }
}

TEST(SelectK, SearchRangeIsUpToSqrtN) {
  const auto d = testing::blobs(50, 2, {2}, 1.0, 13);
  const auto scores = cross_validate_k(d.space(0), d.labels(), 2, 2.0, RngSeed{1});
  EXPECT_EQ(scores.size(), 10u);
}

TEST(SelectK, SeparatedBlobsPickOne) {
  const auto d = testing::blobs(30, 2, {2}, 50.0, 14);
  EXPECT_EQ(select_k(d.space(0), d.labels(), 2, 2.0, RngSeed{2}), 1u);
}

TEST(SelectK, XorLayoutMatchesExhaustiveOracle) {
  // Four clusters at the corners of a square, opposite corners share a class.
  Rng rng(RngSeed{15});
  FeatureMatrix x(0, 2);
  std::vector<ClassIndex> labels;
  const double corners[4][2] = {{0, 0}, {3, 3}, {0, 3}, {3, 0}};
  for (int i = 0; i < 80; ++i) {
    const int q = i % 4;
    const std::vector<double> p{corners[q][0] + 1.2 * rng.normal(), corners[q][1] + 1.2 * rng.normal()};
    x.append_row(p);
    labels.push_back(q < 2 ? 0 : 1);
  }
  const RngSeed seed{77};
  const auto scores = cross_validate_k(x, labels, 2, 2.0, seed);
  const auto folds = stratified_folds(labels, 2, 5, seed);

  std::vector<double> oracle(8, 0.0);
  for (std::size_t k = 1; k <= 8; ++k) {
    for (std::size_t f = 0; f < 5; ++f) {
      FeatureMatrix train(0, 2);
      std::vector<ClassIndex> tl;
      std::vector<std::size_t> held;
      for (std::size_t i = 0; i < 80; ++i) {
        if (folds[i] == f) {
          held.push_back(i);
        } else {
          train.append_row(x.row(i));
          tl.push_back(labels[i]);
        }
      }
      int hits = 0;
      for (auto i : held) {
        const auto mu = naive_membership(naive_neighbors(row_vec(x, i), train, k), tl, 2, 2.0);
        const ClassIndex pred = mu[1] > mu[0] ? 1 : 0;
        hits += pred == labels[i];
      }
      oracle[k - 1] += static_cast<double>(hits) / static_cast<double>(held.size()) / 5.0;
    }
  }
  ASSERT_EQ(scores.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(scores[k], oracle[k], 1e-12) << "k=" << k + 1;
  const auto best = static_cast<std::size_t>(std::max_element(oracle.begin(), oracle.end()) - oracle.begin()) + 1;
  EXPECT_EQ(select_k(x, labels, 2, 2.0, seed), best);
}

TEST(SelectK, TooFewSamples) {
  const FeatureMatrix x(3, 1, {1.0, 2.0, 3.0});
  const std::vector<ClassIndex> labels{0, 1, 0};
  EXPECT_THROW(select_k(x, labels, 2, 2.0, RngSeed{1}), Error);
}

}  // namespace
}  // namespace fsg
