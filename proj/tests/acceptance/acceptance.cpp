/*
 * tests/acceptance/acceptance.cpp
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


// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fsg/datagen.hpp"
#include "fsg/entropy.hpp"
#include "fsg/error_analysis.hpp"
#include "fsg/experiment.hpp"
#include "fsg/fsg.hpp"
#include "fsg/fuzzy_knn.hpp"
#include "fsg/report.hpp"

namespace {

using namespace fsg;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FeatureMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double grid) {
  FeatureMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t a = 0; a < cols; ++a) {
      const double v = rng.uniform() * 4.0;
      m(i, a) = grid > 0 ? std::round(v / grid) * grid : v;
    }
  return m;
}

std::vector<double> random_simplex(Rng& rng, std::size_t c) {
  std::vector<double> v(c);
  double s = 0.0;
  for (auto& x : v) {
    x = -std::log(1.0 - rng.uniform());
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

// ---------------------------------------------------------------------------
// Naive references.

/// Every (distance, index) pair, fully sorted; the documented tie-break is
/// the lower training index.
std::vector<std::pair<double, std::size_t>> naive_knn(std::span<const double> q,
                                                      const FeatureMatrix& x, std::size_t k,
                                                      long exclude) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (static_cast<long>(i) == exclude) continue;
    double s = 0.0;
    for (std::size_t a = 0; a < x.cols(); ++a) s += (q[a] - x(i, a)) * (q[a] - x(i, a));
    all.emplace_back(std::sqrt(s), i);
  }
  std::sort(all.begin(), all.end());
  all.resize(k);
  return all;
}

/// Inverse-distance vote, weights (d_min / d)^(2 / (phi - 1)); exact
/// matches (d < 1e-12) vote alone with equal weight.
std::vector<double> naive_vote(const std::vector<std::pair<double, std::size_t>>& nb,
                               const std::vector<ClassIndex>& labels, std::size_t classes,
                               double phi) {
  double d_min = nb.front().first;
  for (const auto& p : nb) d_min = std::min(d_min, p.first);
  std::vector<double> mu(classes, 0.0);
  double total = 0.0;
  for (const auto& [d, i] : nb) {
    double w = 0.0;
    if (d_min < 1e-12) {
      w = d < 1e-12 ? 1.0 : 0.0;
    } else {
      w = std::pow(d_min / d, 2.0 / (phi - 1.0));
    }
    mu[labels[i]] += w;
    total += w;
  }
  for (auto& m : mu) m /= total;
  return mu;
}

/// Composite Simpson rule.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// ---------------------------------------------------------------------------

Outcome simplex_invariants() {
  const auto t0 = Clock::now();
  Rng rng(RngSeed{101});
  std::size_t calls = 0, membership_bad = 0, fusion_bad = 0;
  double worst_membership = 0.0, worst_fusion = 0.0;
  while (calls < 100000) {
    const std::size_t n = 20 + rng.uniform_index(60);
    const std::size_t d = 1 + rng.uniform_index(6);
    const std::size_t c = 2 + rng.uniform_index(6);
    const std::size_t j = 1 + rng.uniform_index(4);
    const double phi = 1.1 + 3.0 * rng.uniform();
    const double grid = rng.uniform() < 0.3 ? 0.5 : 0.0;
    std::vector<FeatureMatrix> spaces;
    for (std::size_t s = 0; s < j; ++s) spaces.push_back(random_matrix(rng, n, d, grid));
    std::vector<ClassIndex> labels(n);
    for (auto& l : labels) l = rng.uniform_index(c);
    for (int q = 0; q < 50 && calls < 100000; ++q) {
      const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(n, 15));
      std::vector<MembershipVector> blocks;
      for (std::size_t s = 0; s < j; ++s) {
        std::vector<double> query(d);
        for (auto& v : query) v = rng.uniform() * 4.0;
        if (rng.uniform() < 0.1) {
          auto r = spaces[s].row(rng.uniform_index(n));
          query.assign(r.begin(), r.end());
        }
        const auto nb = find_k_nearest(query, spaces[s], k);
        std::vector<ClassIndex> nl;
        for (const auto& x : nb) nl.push_back(labels[x.index]);
        const auto mu = fuzzy_membership(nb, nl, {k, phi, c});
        ++calls;
        double sum = 0.0;
        bool negative = false;
        for (double v : mu.values()) {
          sum += v;
          negative = negative || v < 0.0;
        }
        worst_membership = std::max(worst_membership, std::abs(sum - 1.0));
        membership_bad += negative || std::abs(sum - 1.0) > 1e-9;
        blocks.push_back(mu);
      }
      const auto f = FusionVector::concatenate(blocks);
      double sum = 0.0;
      for (double v : f.values()) sum += v;
      worst_fusion = std::max(worst_fusion, std::abs(sum - static_cast<double>(j)));
      fusion_bad += std::abs(sum - static_cast<double>(j)) > 1e-8;
    }
  }
  const double secs = seconds_since(t0);
  return {membership_bad == 0 && fusion_bad == 0 && secs < 30.0,
          std::to_string(calls) + " calls, worst |sum-1| " + fmt(worst_membership, 17) +
              ", worst |fusion-J| " + fmt(worst_fusion, 17) + ", " + fmt(secs, 1) + " s"};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(RngSeed{202});
  std::size_t mismatches = 0, ties = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 12 + rng.uniform_index(89);  // <= 100
    const std::size_t d = 1 + rng.uniform_index(8);    // <= 8
    const std::size_t k = 1 + rng.uniform_index(10);   // <= 10
    const std::size_t c = 2 + rng.uniform_index(4);
    const double phi = inst % 2 ? 2.0 : 1.2 + 2.0 * rng.uniform();
    const double grid = inst % 3 == 0 ? 1.0 : 0.0;  // coarse grid: many equal distances
    const auto x = random_matrix(rng, n, d, grid);
    std::vector<ClassIndex> labels(n);
    for (auto& l : labels) l = rng.uniform_index(c);

    for (std::size_t q = 0; q < 5; ++q) {
      std::vector<double> query(d);
      for (auto& v : query) v = grid > 0 ? std::round(rng.uniform() * 4.0) : rng.uniform() * 4.0;
      const auto got = find_k_nearest(query, x, k);
      const auto want = naive_knn(query, x, k, -1);
      for (std::size_t m = 0; m < k; ++m) {
        mismatches += got[m].index != want[m].second || got[m].distance != want[m].first;
        if (m + 1 < k) ties += want[m].first == want[m + 1].first;
      }
    }

    const auto loo = loo_memberships(x, labels, {k, phi, c});
    for (std::size_t i = 0; i < n; ++i) {
      const auto want = naive_vote(naive_knn(x.row(i), x, k, static_cast<long>(i)), labels, c, phi);
      for (std::size_t cc = 0; cc < c; ++cc) mismatches += loo(i, cc) != want[cc];
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && ties > 0 && secs < 30.0,
          std::to_string(mismatches) + " mismatches over 200 instances (" + std::to_string(ties) +
              " tied neighbor pairs), " + fmt(secs, 1) + " s"};
}

Outcome algebraic_identity() {
  Rng rng(RngSeed{303});
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t c = 2 + rng.uniform_index(12);
    const auto a = MembershipVector::from_values(random_simplex(rng, c));
    const auto b = MembershipVector::from_values(random_simplex(rng, c));
    worst = std::max(worst, std::abs(error_difference(a, b) -
                                     (n_sample_error(a, b) - large_sample_error(b))));
  }
  return {worst <= 1e-12, "max deviation " + fmt(worst, 17) + " over 10^4 pairs"};
}

Outcome block_decomposition() {
  Rng rng(RngSeed{404});
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t c = 2 + rng.uniform_index(10);
    const std::size_t j = 1 + rng.uniform_index(8);
    std::vector<MembershipVector> xa, xb;
    double blocks = 0.0;
    for (std::size_t s = 0; s < j; ++s) {
      xa.push_back(MembershipVector::from_values(random_simplex(rng, c)));
      xb.push_back(MembershipVector::from_values(random_simplex(rng, c)));
      blocks += decision_distance(xa.back(), xb.back());
    }
    const double whole =
        decision_distance(FusionVector::concatenate(xa), FusionVector::concatenate(xb));
    worst = std::max(worst, std::abs(whole - blocks));
  }
  return {worst <= 1e-12, "max deviation " + fmt(worst, 17) + " over 10^4 pairs"};
}

ExperimentConfig table_one_config() {
  ExperimentConfig cfg;
  cfg.fixture = "avecorr_1.0";
  cfg.per_class = 250;
  cfg.train_fraction = 0.5;
  cfg.repetitions = 5;
  cfg.seed = RngSeed{2026};
  cfg.bins = 32;
  cfg.workers = 0;
  return cfg;
}

Outcome table_one_band(const ExperimentReport& report, double secs) {
  const auto& a = report.averages;
  bool bases_ok = true;
  std::string bases;
  for (double b : a.base_accuracy) {
    bases_ok = bases_ok && b >= 0.45 && b <= 0.75;
    bases += (bases.empty() ? "" : " ") + fmt(100.0 * b, 1);
  }
  const bool pass = report.complete() && a.ave_corr >= 0.97 && a.fsg_accuracy >= 0.98 &&
                    bases_ok && secs < 180.0;
  return {pass, "ave_corr " + fmt(a.ave_corr) + ", FSG " + fmt(100.0 * a.fsg_accuracy, 2) +
                    "%, base [" + bases + "]%, " + fmt(secs, 1) + " s"};
}

Outcome degradation_trend() {
  const auto t0 = Clock::now();
  std::vector<double> acc;
  for (const char* name : {"avecorr_1.0", "avecorr_0.9", "avecorr_0.8", "avecorr_0.7"}) {
    auto cfg = table_one_config();
    cfg.fixture = name;
    cfg.entropy = false;
    acc.push_back(run_experiment(cfg).averages.fsg_accuracy);
  }
  bool pass = true;
  std::string series;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    pass = pass && acc[i] >= 0.93;
    if (i > 0) pass = pass && acc[i] <= acc[i - 1] + 0.015;
    series += (series.empty() ? "" : " -> ") + fmt(100.0 * acc[i], 2);
  }
  const double secs = seconds_since(t0);
  return {pass && secs < 600.0, "FSG % " + series + ", " + fmt(secs, 1) + " s"};
}

Outcome two_class_geometry() {
  ExperimentConfig cfg;
  cfg.fixture = "twoclass_geom";
  cfg.repetitions = 10;
  cfg.seed = RngSeed{2026};
  cfg.entropy = false;
  cfg.workers = 0;
  const auto report = run_experiment(cfg);
  const auto& a = report.averages;
  std::size_t wins = 0;
  for (const auto& r : report.repetitions) {
    if (!r.ok()) continue;
    wins += r.fsg_accuracy > r.base_accuracy[0] && r.fsg_accuracy > r.base_accuracy[1];
  }
  const bool pass = report.complete() && std::abs(a.base_accuracy[0] - 0.91) <= 0.04 &&
                    std::abs(a.base_accuracy[1] - 0.92) <= 0.04 && a.fsg_accuracy >= 0.93 &&
                    wins >= 8;
  return {pass, "base " + fmt(100.0 * a.base_accuracy[0], 2) + "% / " +
                    fmt(100.0 * a.base_accuracy[1], 2) + "%, FSG " +
                    fmt(100.0 * a.fsg_accuracy, 2) + "%, FSG beats both in " +
                    std::to_string(wins) + "/10"};
}

Outcome cover_hart() {
  const auto t0 = Clock::now();
  // Bayes error of two equiprobable unit-variance Gaussians 4 sigma apart,
  // by integrating min(p0, p1) / 2 along the line joining the means.
  const double pi = 3.14159265358979323846;
  auto pdf = [&](double x, double m) { return std::exp(-0.5 * (x - m) * (x - m)) / std::sqrt(2.0 * pi); };
  const double bayes =
      simpson([&](double x) { return 0.5 * std::min(pdf(x, 0.0), pdf(x, 4.0)); }, -12.0, 16.0, 200000);
  const double lo = bayes - 0.01, hi = 2.0 * bayes + 0.015;

  std::size_t inside = 0;
  std::string errors;
  for (std::uint64_t run = 0; run < 10; ++run) {
    Rng rng(derive_seed(RngSeed{808}, run));
    auto draw = [&](std::size_t n, FeatureMatrix& x, std::vector<ClassIndex>& y) {
      x = FeatureMatrix(n, 2);
      y.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<ClassIndex>(i % 2);
        x(i, 0) = rng.normal() + 4.0 * static_cast<double>(y[i]);
        x(i, 1) = rng.normal();
      }
    };
    FeatureMatrix train, test;
    std::vector<ClassIndex> ytrain, ytest;
    draw(5000, train, ytrain);
    draw(5000, test, ytest);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.rows(); ++i) {
      const auto nb = find_k_nearest(test.row(i), train, 1);
      wrong += ytrain[nb.front().index] != ytest[i];
    }
    const double e = static_cast<double>(wrong) / static_cast<double>(test.rows());
    inside += e >= lo && e <= hi;
    errors += (errors.empty() ? "" : " ") + fmt(e, 4);
  }
  const double secs = seconds_since(t0);
  return {inside >= 9 && secs < 120.0,
          "e* " + fmt(bayes, 5) + " (closed form " + fmt(two_gaussian_bayes_error(4.0, 1.0), 5) +
              "), band [" + fmt(lo, 5) + ", " + fmt(hi, 5) + "], 1-NN errors " + errors + ", " +
              std::to_string(inside) + "/10 inside, " + fmt(secs, 1) + " s"};
}

Outcome entropy_dependence(const ExperimentReport& report) {
  bool fixture_ok = report.complete();
  double worst_gap = -1e300;
  for (const auto& r : report.repetitions) {
    if (!r.ok() || !r.decision_entropy) {
      fixture_ok = false;
      continue;
    }
    worst_gap = std::max(worst_gap, r.decision_entropy->pooled.difference);
    for (const auto& c : r.decision_entropy->per_class) worst_gap = std::max(worst_gap, c.difference);
  }
  fixture_ok = fixture_ok && worst_gap <= 0.0;

  Rng rng(RngSeed{909});
  const std::size_t n = 100000;
  FeatureMatrix m(n, 2);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = m(i, 0) = std::sqrt(rng.uniform());
    b[i] = m(i, 1) = rng.uniform() * rng.uniform();
  }
  const std::vector<double> per_space{entropy(build_histogram(a, 32)), entropy(build_histogram(b, 32))};
  const auto indep = fusion_entropy_comparison(per_space, joint_entropy(m, 32), 0.05);
  const bool indep_ok = std::abs(indep.difference) <= 0.05;
  return {fixture_ok && indep_ok,
          "fixture: largest (fusion - sum) over repetitions and classes " + fmt(worst_gap, 3) +
              " nats; independent blocks gap " + fmt(indep.difference, 4) + " nats"};
}

Outcome complexity_scaling() {
  const std::size_t dims = 16, spaces = 3, classes = 4, queries = 400;
  Rng rng(RngSeed{1010});
  auto make = [&](std::size_t n) {
    LabeledDataset d(classes, std::vector<std::size_t>(spaces, dims));
    for (std::size_t i = 0; i < n; ++i) {
      LabeledSample s{"s" + std::to_string(i), static_cast<ClassIndex>(i % classes), {}};
      for (std::size_t j = 0; j < spaces; ++j) {
        std::vector<double> v(dims);
        for (auto& x : v) x = rng.normal() + static_cast<double>(s.label);
        s.features.push_back(std::move(v));
      }
      d.add(s);
    }
    return d;
  };
  const auto probe = make(queries);
  TrainOptions opts;
  opts.base_k = KPolicy::fixed(5);
  opts.meta_k = KPolicy::fixed(5);
  std::vector<double> t;
  for (std::size_t n : {1000, 2000, 4000}) {
    const auto model = train(make(n), opts);
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      ClassifyTimings ct;
      classify(model, probe.features(), 1, &ct);
      best = std::min(best, ct.base_seconds);
    }
    t.push_back(best);
  }
  const double r1 = t[1] / t[0], r2 = t[2] / t[1];
  const bool pass = r1 >= 1.6 && r1 <= 4.8 && r2 >= 1.6 && r2 <= 4.8;
  return {pass, "base classification " + fmt(t[0], 4) + " / " + fmt(t[1], 4) + " / " +
                    fmt(t[2], 4) + " s, ratios " + fmt(r1, 2) + " and " + fmt(r2, 2)};
}

}  // namespace

int main() {
  std::size_t failed = 0;
  auto report = [&](int id, const std::string& title, const Outcome& o) {
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " -- "
              << o.detail << std::endl;
  };
  auto guarded = [&](int id, const std::string& title, const std::function<Outcome()>& f) {
    try {
      report(id, title, f());
    } catch (const std::exception& e) {
      report(id, title, {false, std::string("error: ") + e.what()});
    }
  };

  guarded(1, "simplex invariants", simplex_invariants);
  guarded(2, "oracle equivalence of neighbor search and leave-one-out memberships",
          oracle_equivalence);
  guarded(3, "error difference identity", algebraic_identity);
  guarded(4, "fusion distance block decomposition", block_decomposition);

  std::optional<ExperimentReport> first;
  double first_secs = 0.0;
  try {
    const auto t0 = Clock::now();
    first = run_experiment(table_one_config());
    first_secs = seconds_since(t0);
  } catch (const std::exception& e) {
    std::cerr << "avecorr_1.0 experiment failed: " << e.what() << "\n";
  }
  auto need_first = [&]() -> const ExperimentReport& {
    if (!first) throw std::runtime_error("avecorr_1.0 experiment did not run");
    return *first;
  };

  guarded(5, "avecorr_1.0 accuracy band", [&] { return table_one_band(need_first(), first_secs); });
  guarded(6, "monotone degradation across avecorr fixtures", degradation_trend);
  guarded(7, "two-class geometry experiment", two_class_geometry);
  guarded(8, "Cover-Hart band for 1-NN", cover_hart);
  guarded(9, "entropy dependence verdict", [&] { return entropy_dependence(need_first()); });
  guarded(10, "base classification scales with N", complexity_scaling);
  guarded(11, "deterministic reports", [&]() -> Outcome {
    const auto a = strip_timings(report_to_json(need_first())).dump();
    const auto b = strip_timings(report_to_json(run_experiment(table_one_config()))).dump();
    return {a == b, std::string(a == b ? "identical" : "different") + " (" +
                        std::to_string(a.size()) + " bytes)"};
  });

  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
