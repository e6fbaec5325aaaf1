// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "voiceprint/dataset.hpp"
#include "voiceprint/parallel.hpp"
#include "voiceprint/rng.hpp"

namespace voiceprint {

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) throw std::runtime_error("accuracy: length mismatch");
  if (y_true.empty()) throw std::runtime_error("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double f1_weighted(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes) {
  if (y_true.size() != y_pred.size()) throw std::runtime_error("f1_weighted: length mismatch");
  if (y_true.empty()) throw std::runtime_error("f1_weighted: empty input");
  std::vector<long long> tp(static_cast<std::size_t>(n_classes), 0);
  std::vector<long long> fp(static_cast<std::size_t>(n_classes), 0);
  std::vector<long long> fn(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
      throw std::runtime_error("f1_weighted: label out of range");
    }
    if (t == p) {
      ++tp[static_cast<std::size_t>(t)];
    } else {
      ++fn[static_cast<std::size_t>(t)];
      ++fp[static_cast<std::size_t>(p)];
    }
  }
  double f1 = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    const auto support = tp[static_cast<std::size_t>(c)] + fn[static_cast<std::size_t>(c)];
    if (support == 0) continue;  // zero weight, contributes nothing
    const double denom_p = static_cast<double>(tp[static_cast<std::size_t>(c)] +
                                               fp[static_cast<std::size_t>(c)]);
    const double denom_r = static_cast<double>(support);
    const double precision =
        denom_p > 0 ? static_cast<double>(tp[static_cast<std::size_t>(c)]) / denom_p : 0.0;
    const double recall = static_cast<double>(tp[static_cast<std::size_t>(c)]) / denom_r;
    const double class_f1 =
        precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    f1 += class_f1 * static_cast<double>(support) / static_cast<double>(y_true.size());
  }
  return f1;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw std::runtime_error("mean: empty input");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double sem_of(const std::vector<double>& xs) {
  if (xs.empty()) throw std::runtime_error("sem: empty input");
  return sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

Ci ci95(const std::vector<double>& scores) {
  if (scores.size() < 2) throw std::runtime_error("ci95: need at least two scores");
  const double m = mean_of(scores);
  const double half = 1.96 * sem_of(scores);
  return {m - half, m + half};
}

double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::runtime_error("spearman: need two equal-length series");
  }
  auto ranks = [](const std::vector<double>& xs) {
    const int n = static_cast<int>(xs.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      return xs[static_cast<std::size_t>(i)] < xs[static_cast<std::size_t>(j)];
    });
    std::vector<double> r(static_cast<std::size_t>(n));
    int i = 0;
    while (i < n) {
      int j = i;
      while (j + 1 < n && xs[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])] ==
                              xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]) {
        ++j;
      }
      const double avg = 0.5 * (i + j) + 1.0;  // average rank for ties
      for (int k = i; k <= j; ++k) {
        r[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = avg;
      }
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  const double ma = mean_of(ra), mb = mean_of(rb);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) throw std::runtime_error("spearman: constant series");
  return cov / std::sqrt(va * vb);
}

// ---- classifier comparison -------------------------------------------------

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  }
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels, const std::vector<int>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int i : rows) out.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

struct RepOutcome {
  struct PerClassifier {
    bool ok = false;
    double accuracy = 0.0;
    double f1 = 0.0;
    double kkt = 0.0;
    std::vector<int> predictions;  // aligned with test rows
    std::string diagnostic;
  };
  std::vector<int> test_rows;
  std::vector<PerClassifier> per_classifier;
};

}  // namespace

std::vector<CallTypeConfusion> confusion_by_calltype(
    const std::vector<std::string>& classes, const std::vector<std::string>& call_types,
    const std::vector<std::vector<std::vector<long long>>>& cell_counts,
    std::vector<std::string>* warnings) {
  std::vector<CallTypeConfusion> out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    CallTypeConfusion confusion;
    confusion.individual = classes[i];
    confusion.predicted = classes;
    for (std::size_t c = 0; c < call_types.size(); ++c) {
      const auto& row = cell_counts[i][c];
      const long long total = std::accumulate(row.begin(), row.end(), 0LL);
      if (total == 0) {
        if (warnings != nullptr) {
          warnings->push_back("no test predictions for individual '" + classes[i] +
                              "', call type '" + call_types[c] + "'; row omitted");
        }
        continue;
      }
      confusion.call_types.push_back(call_types[c]);
      confusion.counts.push_back(row);
      std::vector<double> props(row.size());
      for (std::size_t j = 0; j < row.size(); ++j) {
        props[j] = static_cast<double>(row[j]) / static_cast<double>(total);
      }
      confusion.proportions.push_back(std::move(props));
    }
    out.push_back(std::move(confusion));
  }
  return out;
}

EvalReport classifier_comparison(const FeatureTable& features, const EvalConfig& config) {
  const ClassMap individuals = class_map(features.individual_ids);
  const ClassMap types = class_map(features.call_types);
  const int n_classes = static_cast<int>(individuals.classes.size());
  if (n_classes < 2) throw std::runtime_error("classifier_comparison: need at least two classes");
  if (config.n_replicates < 1) throw std::runtime_error("classifier_comparison: need replicates");

  EvalReport report;
  report.n_replicates_requested = config.n_replicates;
  report.train_fraction = config.train_fraction;
  report.stratified = config.stratified;
  report.classes = individuals.classes;
  report.call_types = types.classes;
  report.master_seed = config.master_seed;

  const int n_clf = static_cast<int>(config.classifiers.size());
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.n_replicates));

  parallel_for(config.n_replicates, config.jobs, [&](int r) {
    RepOutcome& outcome = outcomes[static_cast<std::size_t>(r)];
    const std::uint64_t split_seed =
        derive_seed(config.master_seed, "eval/rep/" + std::to_string(r));
    auto [train_rows, test_rows] = partition_indices(
        features.individual_ids, config.train_fraction, split_seed, config.stratified);
    outcome.test_rows = test_rows;

    LabeledDataset train;
    train.X = gather_rows(features.X, train_rows);
    train.y = gather_labels(individuals.labels, train_rows);
    train.n_classes = n_classes;
    const Eigen::MatrixXd test_x = gather_rows(features.X, test_rows);
    const std::vector<int> test_y = gather_labels(individuals.labels, test_rows);

    outcome.per_classifier.resize(static_cast<std::size_t>(n_clf));
    for (int k = 0; k < n_clf; ++k) {
      auto& slot = outcome.per_classifier[static_cast<std::size_t>(k)];
      const ClassifierKind kind = config.classifiers[static_cast<std::size_t>(k)];
      try {
        const std::uint64_t fit_seed = derive_seed(
            config.master_seed, "eval/rep/" + std::to_string(r) + "/" + classifier_name(kind));
        const TrainedClassifier model = fit_classifier(kind, train, config.settings, fit_seed);
        slot.predictions = predict(model, test_x);
        slot.accuracy = accuracy(test_y, slot.predictions);
        slot.f1 = f1_weighted(test_y, slot.predictions, n_classes);
        slot.kkt = max_kkt_residual(model);
        slot.ok = true;
      } catch (const std::exception& e) {
        slot.diagnostic = e.what();
      }
    }
  });

  // Ordered reduction: scores, failures, confusion counts.
  std::vector<std::vector<double>> accs(static_cast<std::size_t>(n_clf));
  std::vector<std::vector<double>> f1s(static_cast<std::size_t>(n_clf));
  std::vector<std::vector<std::vector<std::vector<long long>>>> confusion_counts(
      static_cast<std::size_t>(n_clf),
      std::vector<std::vector<std::vector<long long>>>(
          static_cast<std::size_t>(n_classes),
          std::vector<std::vector<long long>>(
              types.classes.size(), std::vector<long long>(static_cast<std::size_t>(n_classes), 0))));

  for (int r = 0; r < config.n_replicates; ++r) {
    const RepOutcome& outcome = outcomes[static_cast<std::size_t>(r)];
    for (int k = 0; k < n_clf; ++k) {
      const auto& slot = outcome.per_classifier[static_cast<std::size_t>(k)];
      const std::string name = classifier_name(config.classifiers[static_cast<std::size_t>(k)]);
      if (!slot.ok) {
        report.failures.push_back({r, name, slot.diagnostic});
        continue;
      }
      accs[static_cast<std::size_t>(k)].push_back(slot.accuracy);
      f1s[static_cast<std::size_t>(k)].push_back(slot.f1);
      report.raw_scores.push_back({r, name, slot.accuracy, slot.f1});
      report.max_kkt_residual = std::max(report.max_kkt_residual, slot.kkt);
      for (std::size_t t = 0; t < outcome.test_rows.size(); ++t) {
        const int row = outcome.test_rows[t];
        const int true_class = individuals.labels[static_cast<std::size_t>(row)];
        const int call_type = types.labels[static_cast<std::size_t>(row)];
        const int predicted = slot.predictions[t];
        ++confusion_counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(true_class)]
                          [static_cast<std::size_t>(call_type)][static_cast<std::size_t>(predicted)];
      }
    }
  }

  for (int k = 0; k < n_clf; ++k) {
    const std::string name = classifier_name(config.classifiers[static_cast<std::size_t>(k)]);
    const auto& a = accs[static_cast<std::size_t>(k)];
    const auto& f = f1s[static_cast<std::size_t>(k)];
    report.effective_n[name] = static_cast<int>(a.size());
    if (a.empty()) continue;
    const bool degenerate = a.size() < 2;
    report.summaries.push_back(
        {name, "accuracy", mean_of(a), sample_sd(a), degenerate ? 0.0 : sem_of(a),
         static_cast<int>(a.size()), degenerate});
    report.summaries.push_back(
        {name, "f1_weighted", mean_of(f), sample_sd(f), degenerate ? 0.0 : sem_of(f),
         static_cast<int>(f.size()), degenerate});
    report.confusions.push_back(confusion_by_calltype(
        individuals.classes, types.classes, confusion_counts[static_cast<std::size_t>(k)],
        &report.warnings));
  }
  return report;
}

// ---- feature-space comparison ----------------------------------------------

std::vector<int> stratified_subset(const std::vector<int>& labels, int n_classes, int n_train,
                                   std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  if (n_train < n_classes) {
    throw std::runtime_error("stratified_subset: n_train below the number of classes");
  }
  if (n_train >= n) throw std::runtime_error("stratified_subset: n_train must leave a test set");

  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_classes));
  for (int i = 0; i < n; ++i) {
    members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
  }
  for (const auto& m : members) {
    if (m.empty()) throw std::runtime_error("stratified_subset: empty class");
  }

  // Proportional quotas by largest remainder, then clamp to [1, class size].
  std::vector<int> quota(static_cast<std::size_t>(n_classes), 0);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int c = 0; c < n_classes; ++c) {
    const double target = static_cast<double>(n_train) *
                          static_cast<double>(members[static_cast<std::size_t>(c)].size()) / n;
    quota[static_cast<std::size_t>(c)] = static_cast<int>(std::floor(target));
    assigned += quota[static_cast<std::size_t>(c)];
    remainders.push_back({target - std::floor(target), c});
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; i < n_train - assigned; ++i) {
    ++quota[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i % n_classes)].second)];
  }
  // Every class contributes at least one row (and at most all but one when
  // it must donate a slot).
  for (int c = 0; c < n_classes; ++c) {
    while (quota[static_cast<std::size_t>(c)] == 0) {
      int donor = -1;
      for (int d = 0; d < n_classes; ++d) {
        if (quota[static_cast<std::size_t>(d)] > 1 &&
            (donor < 0 ||
             quota[static_cast<std::size_t>(d)] > quota[static_cast<std::size_t>(donor)])) {
          donor = d;
        }
      }
      if (donor < 0) throw std::runtime_error("stratified_subset: cannot cover every class");
      --quota[static_cast<std::size_t>(donor)];
      ++quota[static_cast<std::size_t>(c)];
    }
    const int limit = static_cast<int>(members[static_cast<std::size_t>(c)].size());
    if (quota[static_cast<std::size_t>(c)] > limit) {
      // Push the overflow to the largest class with room.
      int overflow = quota[static_cast<std::size_t>(c)] - limit;
      quota[static_cast<std::size_t>(c)] = limit;
      for (int d = 0; d < n_classes && overflow > 0; ++d) {
        const int room = static_cast<int>(members[static_cast<std::size_t>(d)].size()) -
                         quota[static_cast<std::size_t>(d)];
        const int take = std::min(room, overflow);
        quota[static_cast<std::size_t>(d)] += take;
        overflow -= take;
      }
      if (overflow > 0) throw std::runtime_error("stratified_subset: quota overflow");
    }
  }

  Rng rng(seed);
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(n_train));
  for (int c = 0; c < n_classes; ++c) {
    auto& m = members[static_cast<std::size_t>(c)];
    rng.shuffle(m);
    chosen.insert(chosen.end(), m.begin(), m.begin() + quota[static_cast<std::size_t>(c)]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

CompareReport feature_space_comparison(const FeatureTable& mfcc_features,
                                       const FeatureTable& learnt_features,
                                       const CompareConfig& config) {
  if (mfcc_features.individual_ids != learnt_features.individual_ids ||
      mfcc_features.snippet_ids != learnt_features.snippet_ids) {
    throw std::runtime_error("feature_space_comparison: feature tables disagree on rows");
  }
  const ClassMap individuals = class_map(mfcc_features.individual_ids);
  const int n_classes = static_cast<int>(individuals.classes.size());
  const int n = static_cast<int>(mfcc_features.X.rows());
  for (int n_train : config.train_grid) {
    if (n_train >= n) {
      throw std::runtime_error("feature_space_comparison: grid value " +
                               std::to_string(n_train) + " >= dataset size");
    }
    if (n_train < n_classes) {
      throw std::runtime_error("feature_space_comparison: grid value " +
                               std::to_string(n_train) + " below the number of classes");
    }
  }

  const std::vector<std::pair<std::string, const FeatureTable*>> spaces = {
      {"mfcc", &mfcc_features}, {"learnt", &learnt_features}};
  const int n_bins = static_cast<int>(config.c_bins.size());
  const int reps_per_point = n_bins * config.per_bin;
  const int n_points = static_cast<int>(spaces.size() * config.train_grid.size());
  const int total = n_points * reps_per_point;

  struct JobResult {
    bool ok = false;
    double accuracy = 0.0;
    double c_value = 0.0;
    double kkt = 0.0;
    std::string diagnostic;
  };
  std::vector<JobResult> results(static_cast<std::size_t>(total));

  parallel_for(total, config.jobs, [&](int job) {
    JobResult& out = results[static_cast<std::size_t>(job)];
    const int point = job / reps_per_point;
    const int rep = job % reps_per_point;
    const int bin = rep / config.per_bin;
    const int space_idx = point / static_cast<int>(config.train_grid.size());
    const int grid_idx = point % static_cast<int>(config.train_grid.size());
    const int n_train = config.train_grid[static_cast<std::size_t>(grid_idx)];
    const FeatureTable& table = *spaces[static_cast<std::size_t>(space_idx)].second;

    // The derivation path deliberately omits the feature space: both spaces
    // see the same C draws and train subsets per replicate (paired design),
    // so identical feature tables give identical curves.
    const std::string path = "compare/" + std::to_string(n_train) + "/" + std::to_string(bin) +
                             "/" + std::to_string(rep % config.per_bin);
    Rng rng(derive_seed(config.master_seed, path));
    const CBin& cb = config.c_bins[static_cast<std::size_t>(bin)];
    const double c_value = std::exp(rng.uniform(std::log(cb.lo), std::log(cb.hi)));
    out.c_value = c_value;
    try {
      const std::vector<int> train_rows = stratified_subset(
          individuals.labels, n_classes, n_train,
          derive_seed(config.master_seed, path + "/subset"));
      std::vector<char> in_train(static_cast<std::size_t>(n), 0);
      for (int i : train_rows) in_train[static_cast<std::size_t>(i)] = 1;
      std::vector<int> test_rows;
      for (int i = 0; i < n; ++i) {
        if (!in_train[static_cast<std::size_t>(i)]) test_rows.push_back(i);
      }

      LabeledDataset train;
      train.X = gather_rows(table.X, train_rows);
      train.y = gather_labels(individuals.labels, train_rows);
      train.n_classes = n_classes;

      SvmConfig svm = config.svm;
      svm.C = c_value;
      const SvmModel model = fit_svm(train, svm);
      const std::vector<int> predictions = predict(model, gather_rows(table.X, test_rows));
      out.accuracy = accuracy(gather_labels(individuals.labels, test_rows), predictions);
      out.kkt = svm_max_kkt_residual(model);
      out.ok = true;
    } catch (const std::exception& e) {
      out.diagnostic = e.what();
    }
  });

  CompareReport report;
  report.master_seed = config.master_seed;
  for (int point = 0; point < n_points; ++point) {
    const int space_idx = point / static_cast<int>(config.train_grid.size());
    const int grid_idx = point % static_cast<int>(config.train_grid.size());
    const std::string& space = spaces[static_cast<std::size_t>(space_idx)].first;
    const int n_train = config.train_grid[static_cast<std::size_t>(grid_idx)];

    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(reps_per_point));
    for (int rep = 0; rep < reps_per_point; ++rep) {
      const JobResult& jr = results[static_cast<std::size_t>(point * reps_per_point + rep)];
      if (!jr.ok) {
        report.failures.push_back(
            {point * reps_per_point + rep, "svm(" + space + ")", jr.diagnostic});
        continue;
      }
      scores.push_back(jr.accuracy);
      report.raw.push_back({space, n_train, rep, jr.c_value, jr.accuracy});
      report.max_kkt_residual = std::max(report.max_kkt_residual, jr.kkt);
    }
    if (scores.empty()) continue;
    const Ci ci = scores.size() >= 2 ? ci95(scores) : Ci{scores.front(), scores.front()};
    report.points.push_back(
        {space, n_train, mean_of(scores), ci.low, ci.high, static_cast<int>(scores.size())});
  }
  return report;
}

// ---- cross-call-type --------------------------------------------------------

CrossCallTypeReport cross_calltype_eval(const FeatureTable& features,
                                        const std::vector<ClassifierKind>& classifiers,
                                        const ClassifierSettings& settings,
                                        std::uint64_t master_seed) {
  const ClassMap individuals = class_map(features.individual_ids);
  const ClassMap types = class_map(features.call_types);
  if (types.classes.size() < 2) {
    throw std::runtime_error("cross_calltype_eval: need at least two call types");
  }
  const int n = static_cast<int>(features.X.rows());

  CrossCallTypeReport report;
  std::map<std::string, std::vector<double>> per_classifier;
  for (std::size_t held = 0; held < types.classes.size(); ++held) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < n; ++i) {
      if (types.labels[static_cast<std::size_t>(i)] == static_cast<int>(held)) {
        test_rows.push_back(i);
      } else {
        train_rows.push_back(i);
      }
    }
    if (test_rows.empty() || train_rows.empty()) continue;

    LabeledDataset train;
    train.X = gather_rows(features.X, train_rows);
    train.y = gather_labels(individuals.labels, train_rows);
    train.n_classes = static_cast<int>(individuals.classes.size());
    const Eigen::MatrixXd test_x = gather_rows(features.X, test_rows);
    const std::vector<int> test_y = gather_labels(individuals.labels, test_rows);

    for (ClassifierKind kind : classifiers) {
      const std::uint64_t seed = derive_seed(
          master_seed, "xcall/" + types.classes[held] + "/" + classifier_name(kind));
      const TrainedClassifier model = fit_classifier(kind, train, settings, seed);
      const double acc = accuracy(test_y, predict(model, test_x));
      report.results.push_back(
          {classifier_name(kind), types.classes[held], acc, static_cast<int>(test_rows.size())});
      per_classifier[classifier_name(kind)].push_back(acc);
    }
  }
  for (const auto& [name, scores] : per_classifier) {
    report.mean_accuracy[name] = mean_of(scores);
  }
  return report;
}

}  // namespace voiceprint
