// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "voiceprint/labeled_dataset.hpp"

namespace voiceprint {

struct ForestConfig {
  int n_trees = 100;
  int max_features = 0;       // 0 = floor(sqrt(n_features))
  int max_depth = 0;          // 0 = unlimited
  int min_samples_split = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;  // leaf label when feature < 0
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_classes = 0;
  int feature_dim = 0;
};

// Bootstrap sample per tree, Gini-impurity splits over max_features
// candidate features per node. Deterministic given the seed.
ForestModel fit_random_forest(const LabeledDataset& data, const ForestConfig& config);

// Majority vote over trees; ties go to the lowest class index.
std::vector<int> predict(const ForestModel& model, const Eigen::MatrixXd& X);

}  // namespace voiceprint
