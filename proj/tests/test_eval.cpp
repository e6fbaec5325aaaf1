// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "voiceprint/eval.hpp"
#include "voiceprint/report.hpp"
#include "voiceprint/rng.hpp"

using namespace voiceprint;

namespace {

// Feature table with one Gaussian blob per individual; identity is encoded
// identically in every call type, so it separates cleanly.
FeatureTable blob_features(int per_cell, double spread, std::uint64_t seed) {
  const std::vector<std::string> individuals = {"alpha", "bravo", "carol"};
  const std::vector<std::string> call_types = {"scream", "pant_hoot_intro", "pant_hoot_climax"};
  Rng rng(seed);
  FeatureTable table;
  const int n = per_cell * 9;
  table.X.resize(n, 8);
  int row = 0;
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < per_cell; ++k) {
        table.snippet_ids.push_back("s" + std::to_string(row));
        table.individual_ids.push_back(individuals[static_cast<std::size_t>(i)]);
        table.call_types.push_back(call_types[static_cast<std::size_t>(c)]);
        for (int j = 0; j < 8; ++j) {
          table.X(row, j) = 4.0 * i + spread * rng.normal();
        }
        ++row;
      }
    }
  }
  return table;
}

}  // namespace

TEST_CASE("accuracy") {
  std::vector<int> truth(49, 1);
  std::vector<int> predictions = truth;
  CHECK(accuracy(truth, predictions) == 1.0);
  for (int i = 0; i < 4; ++i) predictions[static_cast<std::size_t>(i)] = 0;
  CHECK(accuracy(truth, predictions) == doctest::Approx(45.0 / 49.0).epsilon(1e-12));

  CHECK_THROWS(accuracy({1, 2}, {1}));
  CHECK_THROWS(accuracy({}, {}));
}

TEST_CASE("weighted F1 on the hand-worked binary fixture") {
  // TP=3 FP=1 FN=1 TN=5 for the positive class (label 1).
  // class 1: P = 3/4, R = 3/4, F1 = 0.75, support 4.
  // class 0: P = 5/6, R = 5/6, F1 = 5/6, support 6.
  // weighted: (4 * 0.75 + 6 * 5/6) / 10 = 0.8.
  std::vector<int> truth, predictions;
  for (int i = 0; i < 3; ++i) { truth.push_back(1); predictions.push_back(1); }  // TP
  truth.push_back(1); predictions.push_back(0);                                  // FN
  predictions.push_back(1); truth.push_back(0);                                  // FP
  for (int i = 0; i < 5; ++i) { truth.push_back(0); predictions.push_back(0); }  // TN
  CHECK(f1_weighted(truth, predictions, 2) == doctest::Approx(0.8).epsilon(1e-12));

  CHECK(f1_weighted({0, 1, 2}, {0, 1, 2}, 3) == 1.0);

  // A class absent from y_true has support 0 and contributes nothing.
  CHECK(f1_weighted({0, 0, 1}, {0, 0, 1}, 3) == 1.0);
}

TEST_CASE("ci95 formulas") {
  CHECK_THROWS(ci95({0.5}));

  const Ci same = ci95({0.7, 0.7, 0.7});
  CHECK(same.low == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(same.high == doctest::Approx(0.7).epsilon(1e-12));

  // {0.8, 0.9}: sd = 0.0707..., sem = 0.05, half-width = 0.098.
  const Ci two = ci95({0.8, 0.9});
  CHECK((two.high + two.low) / 2.0 == doctest::Approx(0.85).epsilon(1e-12));
  CHECK((two.high - two.low) / 2.0 == doctest::Approx(0.098).epsilon(1e-3));
}

TEST_CASE("ci width shrinks like 1/sqrt(n): 100 -> 400 halves within 10%") {
  Rng rng(123);
  std::vector<double> scores;
  for (int i = 0; i < 400; ++i) scores.push_back(0.8 + 0.05 * rng.normal());
  const std::vector<double> first100(scores.begin(), scores.begin() + 100);
  const Ci narrow = ci95(scores);
  const Ci wide = ci95(first100);
  const double ratio = (wide.high - wide.low) / (narrow.high - narrow.low);
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman_rank_correlation({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman_rank_correlation({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
  CHECK(std::abs(spearman_rank_correlation({1, 2, 3, 4, 5, 6},
                                           {3, 1, 4, 1.5, 5, 2})) < 0.9);
}

TEST_CASE("confusion_by_calltype reproduces a planted row and omits empty rows") {
  // alpha's pant_hoot_climax row: 875/103/22 of 1000 predictions.
  const std::vector<std::string> classes = {"alpha", "bravo", "carol"};
  const std::vector<std::string> call_types = {"scream", "pant_hoot_climax"};
  std::vector<std::vector<std::vector<long long>>> counts(
      3, std::vector<std::vector<long long>>(2, std::vector<long long>(3, 0)));
  counts[0][1] = {875, 103, 22};
  counts[0][0] = {10, 0, 0};
  counts[1][0] = {0, 5, 0};
  counts[1][1] = {0, 7, 0};
  counts[2][0] = {0, 0, 9};
  // carol x pant_hoot_climax stays empty -> omitted with a warning.

  std::vector<std::string> warnings;
  const auto confusions = confusion_by_calltype(classes, call_types, counts, &warnings);
  REQUIRE(confusions.size() == 3);
  REQUIRE(confusions[0].call_types.size() == 2);
  CHECK(confusions[0].proportions[1][0] == doctest::Approx(0.875).epsilon(1e-12));
  CHECK(confusions[0].proportions[1][1] == doctest::Approx(0.103).epsilon(1e-12));
  CHECK(confusions[0].proportions[1][2] == doctest::Approx(0.022).epsilon(1e-12));

  for (const auto& confusion : confusions) {
    for (const auto& row : confusion.proportions) {
      double sum = 0.0;
      for (double v : row) sum += v;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
  CHECK(confusions[2].call_types == std::vector<std::string>{"scream"});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("carol") != std::string::npos);
}

TEST_CASE("a perfect classifier yields identity-like confusion rows") {
  const std::vector<std::string> classes = {"alpha", "bravo"};
  const std::vector<std::string> call_types = {"scream", "pant_hoot_intro"};
  std::vector<std::vector<std::vector<long long>>> counts(
      2, std::vector<std::vector<long long>>(2, std::vector<long long>(2, 0)));
  for (int i = 0; i < 2; ++i) {
    for (int c = 0; c < 2; ++c) counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]
                                      [static_cast<std::size_t>(i)] = 7;
  }
  const auto confusions = confusion_by_calltype(classes, call_types, counts, nullptr);
  for (std::size_t i = 0; i < confusions.size(); ++i) {
    for (const auto& row : confusions[i].proportions) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        CHECK(row[j] == (i == j ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("classifier_comparison: summaries match hand-computed mean and SEM") {
  const FeatureTable features = blob_features(4, 1.2, 3);
  EvalConfig config;
  config.n_replicates = 5;
  config.master_seed = 17;
  config.classifiers = {ClassifierKind::naive_bayes};
  const EvalReport report = classifier_comparison(features, config);

  REQUIRE(report.raw_scores.size() == 5);
  std::vector<double> accs;
  for (const auto& r : report.raw_scores) accs.push_back(r.accuracy);
  double mean = 0.0;
  for (double a : accs) mean += a;
  mean /= 5.0;
  double ss = 0.0;
  for (double a : accs) ss += (a - mean) * (a - mean);
  const double sem = std::sqrt(ss / 4.0) / std::sqrt(5.0);

  REQUIRE(report.summaries.size() == 2);
  CHECK(report.summaries[0].metric == "accuracy");
  CHECK(report.summaries[0].mean == doctest::Approx(mean).epsilon(1e-15));
  CHECK(report.summaries[0].sem == doctest::Approx(sem).epsilon(1e-15));
  CHECK(report.effective_n.at("nb") == 5);
}

TEST_CASE("single replicate flags a degenerate SEM") {
  const FeatureTable features = blob_features(3, 1.0, 5);
  EvalConfig config;
  config.n_replicates = 1;
  config.master_seed = 5;
  config.classifiers = {ClassifierKind::naive_bayes};
  const EvalReport report = classifier_comparison(features, config);
  REQUIRE(!report.summaries.empty());
  CHECK(report.summaries[0].sem_degenerate);
  CHECK(report.summaries[0].sem == 0.0);
}

TEST_CASE("pooled confusion counts reproduce the mean accuracy exactly") {
  const FeatureTable features = blob_features(4, 2.0, 7);
  EvalConfig config;
  config.n_replicates = 20;
  config.master_seed = 3;
  config.classifiers = {ClassifierKind::naive_bayes};
  const EvalReport report = classifier_comparison(features, config);

  long long correct = 0, total = 0;
  for (const auto& confusion : report.confusions.at(0)) {
    // Column index of this individual in the prediction axis.
    std::size_t self = 0;
    for (std::size_t j = 0; j < confusion.predicted.size(); ++j) {
      if (confusion.predicted[j] == confusion.individual) self = j;
    }
    for (const auto& row : confusion.counts) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        total += row[j];
        if (j == self) correct += row[j];
      }
    }
  }
  const double pooled = static_cast<double>(correct) / static_cast<double>(total);
  // Test sets have a fixed size across replicates, so the mean of
  // per-replicate accuracies equals the pooled ratio.
  CHECK(std::abs(pooled - report.summaries[0].mean) < 1e-12);
}

TEST_CASE("classifier_comparison is deterministic and pool-size invariant") {
  const FeatureTable features = blob_features(3, 1.5, 11);
  EvalConfig config;
  config.n_replicates = 8;
  config.master_seed = 21;
  config.classifiers = {ClassifierKind::svm, ClassifierKind::naive_bayes};

  const EvalReport a = classifier_comparison(features, config);
  const EvalReport b = classifier_comparison(features, config);
  config.jobs = 2;
  const EvalReport c = classifier_comparison(features, config);

  const std::string ja = eval_report_json(a, nullptr);
  CHECK(ja == eval_report_json(b, nullptr));
  CHECK(ja == eval_report_json(c, nullptr));
}

TEST_CASE("stratified_subset: exact size, class cover, determinism") {
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(0);
  for (int i = 0; i < 12; ++i) labels.push_back(1);
  for (int i = 0; i < 8; ++i) labels.push_back(2);

  const std::vector<int> pick = stratified_subset(labels, 3, 5, 77);
  CHECK(pick.size() == 5);
  std::set<int> classes_hit;
  std::set<int> unique(pick.begin(), pick.end());
  CHECK(unique.size() == 5);
  for (int i : pick) classes_hit.insert(labels[static_cast<std::size_t>(i)]);
  CHECK(classes_hit.size() == 3);

  CHECK(stratified_subset(labels, 3, 5, 77) == pick);
  CHECK_THROWS(stratified_subset(labels, 3, 2, 1));   // below class count
  CHECK_THROWS(stratified_subset(labels, 3, 50, 1));  // no test remainder
}

TEST_CASE("feature_space_comparison: grid arithmetic, identical inputs, determinism") {
  const FeatureTable features = blob_features(6, 1.0, 13);  // 54 rows
  CompareConfig config;
  config.train_grid = {4, 9, 18};
  config.per_bin = 3;
  config.master_seed = 2;

  const CompareReport report = feature_space_comparison(features, features, config);
  CHECK(report.points.size() == 6);  // 3 grid values x 2 spaces
  for (const auto& p : report.points) {
    CHECK(p.n_replicates == 12);  // 4 bins x 3
    CHECK(p.ci_low <= p.mean_accuracy);
    CHECK(p.mean_accuracy <= p.ci_high);
  }

  // Identical feature tables under one master seed give identical curves.
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(report.points[i].mean_accuracy == report.points[i + 3].mean_accuracy);
    CHECK(report.points[i].ci_low == report.points[i + 3].ci_low);
  }

  config.jobs = 2;
  const CompareReport parallel = feature_space_comparison(features, features, config);
  CHECK(compare_report_json(report) == compare_report_json(parallel));

  CompareConfig bad = config;
  bad.train_grid = {60};
  CHECK_THROWS(feature_space_comparison(features, features, bad));
  bad.train_grid = {2};
  CHECK_THROWS(feature_space_comparison(features, features, bad));
}

TEST_CASE("cross_calltype_eval rotates the held-out call type") {
  const FeatureTable features = blob_features(4, 0.8, 19);
  const CrossCallTypeReport report = cross_calltype_eval(
      features, {ClassifierKind::naive_bayes}, ClassifierSettings{}, 7);
  REQUIRE(report.results.size() == 3);  // one rotation per call type
  std::set<std::string> held;
  for (const auto& r : report.results) {
    held.insert(r.held_out_call_type);
    CHECK(r.n_test == 12);  // 3 individuals x 4 per cell
    CHECK(r.accuracy > 0.9);  // identity is shared across call types here
  }
  CHECK(held.size() == 3);
  CHECK(report.mean_accuracy.at("nb") > 0.9);
}
