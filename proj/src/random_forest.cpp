// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "voiceprint/rng.hpp"

namespace voiceprint {

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

double gini_from_counts(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

int majority_label(const std::vector<int>& counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& data, const ForestConfig& config, int max_features, Rng& rng)
      : data_(data), config_(config), max_features_(max_features), rng_(rng) {}

  DecisionTree build(std::vector<int> sample) {
    tree_.nodes.clear();
    grow(std::move(sample), 0);
    return std::move(tree_);
  }

 private:
  // Returns the index of the created node. Children are grown left first so
  // the node layout is a pure function of the data and RNG stream.
  int grow(std::vector<int> sample, int depth) {
    const int node_index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<int> counts(static_cast<std::size_t>(data_.n_classes), 0);
    for (int i : sample) ++counts[static_cast<std::size_t>(data_.y[static_cast<std::size_t>(i)])];
    const double node_gini = gini_from_counts(counts, static_cast<int>(sample.size()));

    const bool depth_capped = config_.max_depth > 0 && depth >= config_.max_depth;
    if (node_gini <= 0.0 || depth_capped ||
        static_cast<int>(sample.size()) < config_.min_samples_split) {
      tree_.nodes[static_cast<std::size_t>(node_index)].label = majority_label(counts);
      return node_index;
    }

    const SplitChoice split = best_split(sample, counts, node_gini);
    if (!split.found) {
      tree_.nodes[static_cast<std::size_t>(node_index)].label = majority_label(counts);
      return node_index;
    }

    std::vector<int> left, right;
    for (int i : sample) {
      if (data_.X(i, split.feature) <= split.threshold) {
        left.push_back(i);
      } else {
        right.push_back(i);
      }
    }
    sample.clear();
    sample.shrink_to_fit();

    tree_.nodes[static_cast<std::size_t>(node_index)].feature = split.feature;
    tree_.nodes[static_cast<std::size_t>(node_index)].threshold = split.threshold;
    const int left_index = grow(std::move(left), depth + 1);
    tree_.nodes[static_cast<std::size_t>(node_index)].left = left_index;
    const int right_index = grow(std::move(right), depth + 1);
    tree_.nodes[static_cast<std::size_t>(node_index)].right = right_index;
    return node_index;
  }

  SplitChoice best_split(const std::vector<int>& sample, const std::vector<int>& parent_counts,
                         double parent_gini) {
    const int d = static_cast<int>(data_.X.cols());
    // Candidate features: partial Fisher-Yates draw without replacement.
    std::vector<int> features(static_cast<std::size_t>(d));
    for (int f = 0; f < d; ++f) features[static_cast<std::size_t>(f)] = f;
    for (int f = 0; f < max_features_; ++f) {
      const int j = f + static_cast<int>(rng_.below(static_cast<std::uint64_t>(d - f)));
      std::swap(features[static_cast<std::size_t>(f)], features[static_cast<std::size_t>(j)]);
    }

    const int n = static_cast<int>(sample.size());
    SplitChoice best;
    std::vector<std::pair<double, int>> values(static_cast<std::size_t>(n));
    std::vector<int> left_counts(static_cast<std::size_t>(data_.n_classes));

    for (int fi = 0; fi < max_features_; ++fi) {
      const int f = features[static_cast<std::size_t>(fi)];
      for (int i = 0; i < n; ++i) {
        const int row = sample[static_cast<std::size_t>(i)];
        values[static_cast<std::size_t>(i)] = {data_.X(row, f),
                                               data_.y[static_cast<std::size_t>(row)]};
      }
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::fill(left_counts.begin(), left_counts.end(), 0);
      for (int i = 0; i + 1 < n; ++i) {
        ++left_counts[static_cast<std::size_t>(values[static_cast<std::size_t>(i)].second)];
        const double v = values[static_cast<std::size_t>(i)].first;
        const double v_next = values[static_cast<std::size_t>(i) + 1].first;
        if (!(v_next > v)) continue;  // only between distinct values

        const int n_left = i + 1;
        const int n_right = n - n_left;
        double left_sq = 0.0, right_sq = 0.0;
        for (int c = 0; c < data_.n_classes; ++c) {
          const double lc = left_counts[static_cast<std::size_t>(c)];
          const double rc = parent_counts[static_cast<std::size_t>(c)] - lc;
          left_sq += lc * lc;
          right_sq += rc * rc;
        }
        const double gini_left = 1.0 - left_sq / (static_cast<double>(n_left) * n_left);
        const double gini_right = 1.0 - right_sq / (static_cast<double>(n_right) * n_right);
        const double weighted =
            (n_left * gini_left + n_right * gini_right) / static_cast<double>(n);
        const double decrease = parent_gini - weighted;
        if (decrease > best.impurity_decrease + 1e-15) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (v + v_next);
          best.impurity_decrease = decrease;
        }
      }
    }
    return best;
  }

  const LabeledDataset& data_;
  const ForestConfig& config_;
  int max_features_;
  Rng& rng_;
  DecisionTree tree_;
};

}  // namespace

ForestModel fit_random_forest(const LabeledDataset& data, const ForestConfig& config) {
  validate_dataset(data, true);
  if (config.n_trees < 1) throw std::runtime_error("forest: need at least one tree");

  const int d = static_cast<int>(data.X.cols());
  int max_features = config.max_features > 0
                         ? std::min(config.max_features, d)
                         : std::max(1, static_cast<int>(std::floor(std::sqrt(d))));

  ForestModel model;
  model.n_classes = data.n_classes;
  model.feature_dim = d;
  model.trees.reserve(static_cast<std::size_t>(config.n_trees));

  const int n = static_cast<int>(data.X.rows());
  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(config.seed, "tree/" + std::to_string(t)));
    std::vector<int> sample(static_cast<std::size_t>(n));
    if (config.bootstrap) {
      for (int i = 0; i < n; ++i) {
        sample[static_cast<std::size_t>(i)] =
            static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      }
    } else {
      for (int i = 0; i < n; ++i) sample[static_cast<std::size_t>(i)] = i;
    }
    TreeBuilder builder(data, config, max_features, rng);
    model.trees.push_back(builder.build(std::move(sample)));
  }
  return model;
}

std::vector<int> predict(const ForestModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.feature_dim) {
    throw std::runtime_error("forest predict: feature dimension mismatch");
  }
  std::vector<int> labels(static_cast<std::size_t>(X.rows()));
  std::vector<int> votes(static_cast<std::size_t>(model.n_classes));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& tree : model.trees) {
      int node = 0;
      while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        node = X(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
      }
      ++votes[static_cast<std::size_t>(tree.nodes[static_cast<std::size_t>(node)].label)];
    }
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c) {
      if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

}  // namespace voiceprint
