// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "voiceprint/classifiers.hpp"
#include "voiceprint/features_io.hpp"

namespace voiceprint {

// ---- metrics -------------------------------------------------------------

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Per-class F1 = 2PR/(P+R) (0 when P+R = 0), averaged with weights
// = class support / total.
double f1_weighted(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes);

double mean_of(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);  // n-1 denominator, 0 for n < 2
double sem_of(const std::vector<double>& xs);     // sd / sqrt(n)

struct Ci {
  double low = 0.0;
  double high = 0.0;
};

// mean +- 1.96 * SEM. Throws for fewer than two scores.
Ci ci95(const std::vector<double>& scores);

// Rank correlation with average ranks for ties.
double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

// ---- repeated-partition classifier comparison ------------------------------

struct MetricSummary {
  std::string classifier;
  std::string metric;  // "accuracy" or "f1_weighted"
  double mean = 0.0;
  double sd = 0.0;
  double sem = 0.0;
  int n_replicates = 0;
  bool sem_degenerate = false;  // true when n < 2
};

struct ReplicateFailure {
  int replicate = 0;
  std::string classifier;
  std::string diagnostic;
};

struct RawScore {
  int replicate = 0;
  std::string classifier;
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Row-normalized confusion for one individual: how each of its call types
// was attributed across predicted individuals.
struct CallTypeConfusion {
  std::string individual;
  std::vector<std::string> call_types;            // rows
  std::vector<std::string> predicted;             // columns
  std::vector<std::vector<long long>> counts;     // raw, persisted
  std::vector<std::vector<double>> proportions;   // rows sum to 1
};

struct EvalConfig {
  int n_replicates = 500;
  double train_fraction = 0.75;
  bool stratified = true;
  std::vector<ClassifierKind> classifiers = all_classifiers();
  ClassifierSettings settings;
  std::uint64_t master_seed = 0;
  int jobs = 1;
};

struct EvalReport {
  int n_replicates_requested = 0;
  double train_fraction = 0.0;
  bool stratified = true;
  std::vector<std::string> classes;     // individuals, first-appearance order
  std::vector<std::string> call_types;  // first-appearance order
  std::vector<MetricSummary> summaries;
  std::vector<RawScore> raw_scores;
  std::vector<ReplicateFailure> failures;
  std::map<std::string, int> effective_n;
  // confusions[k] = per-individual matrices for classifiers[k], accumulated
  // over every replicate's test predictions.
  std::vector<std::vector<CallTypeConfusion>> confusions;
  std::vector<std::string> warnings;
  double max_kkt_residual = 0.0;
  std::uint64_t master_seed = 0;
};

// Repeated random partitioning: per replicate r, a split derived from
// "eval/rep/<r>", one fit and test score per classifier. Identical
// master_seed (at any worker count) gives identical output.
EvalReport classifier_comparison(const FeatureTable& features, const EvalConfig& config);

// Builds the per-individual confusion tables from joined predictions.
// Rows with zero test occurrences are omitted and reported in warnings.
std::vector<CallTypeConfusion> confusion_by_calltype(
    const std::vector<std::string>& classes, const std::vector<std::string>& call_types,
    const std::vector<std::vector<std::vector<long long>>>& cell_counts,
    std::vector<std::string>* warnings);

// ---- feature-space comparison sweep -----------------------------------------

struct CBin {
  double lo = 0.0;
  double hi = 0.0;
};

struct CompareConfig {
  std::vector<int> train_grid = {5, 10, 20, 40, 60, 80, 100, 120, 140, 160, 175};
  std::vector<CBin> c_bins = {{0.1, 1.0}, {1.0, 10.0}, {10.0, 100.0}, {100.0, 1000.0}};
  int per_bin = 500;
  SvmConfig svm;  // C is drawn per replicate
  std::uint64_t master_seed = 0;
  int jobs = 1;
};

struct ComparisonPoint {
  std::string feature_space;
  int n_train = 0;
  double mean_accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_replicates = 0;
};

struct CompareRawScore {
  std::string feature_space;
  int n_train = 0;
  int replicate = 0;  // 0..(bins * per_bin - 1) within the point
  double c_value = 0.0;
  double accuracy = 0.0;
};

struct CompareReport {
  std::vector<ComparisonPoint> points;
  std::vector<CompareRawScore> raw;
  std::vector<ReplicateFailure> failures;
  double max_kkt_residual = 0.0;
  std::uint64_t master_seed = 0;
};

// Per (feature space, n_train) point: bins x per_bin SVM replicates, C drawn
// log-uniformly within its bin, train subset of exactly n_train rows
// (stratified by individual), the remainder as test.
CompareReport feature_space_comparison(const FeatureTable& mfcc_features,
                                       const FeatureTable& learnt_features,
                                       const CompareConfig& config);

// Exact-size stratified subset: proportional quotas by largest remainder,
// at least one row per class. Returns sorted row indices.
std::vector<int> stratified_subset(const std::vector<int>& labels, int n_classes, int n_train,
                                   std::uint64_t seed);

// ---- cross-call-type generalization (voice-print probe) -------------------

struct CrossCallTypeResult {
  std::string classifier;
  std::string held_out_call_type;
  double accuracy = 0.0;
  int n_test = 0;
};

struct CrossCallTypeReport {
  std::vector<CrossCallTypeResult> results;
  std::map<std::string, double> mean_accuracy;  // per classifier, over held-out types
};

// Trains on all call types but one and tests on the held-out one, rotating
// the held-out type.
CrossCallTypeReport cross_calltype_eval(const FeatureTable& features,
                                        const std::vector<ClassifierKind>& classifiers,
                                        const ClassifierSettings& settings,
                                        std::uint64_t master_seed);

}  // namespace voiceprint
