// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace voiceprint {

// Feature matrix (one row per snippet) with integer class labels in
// [0, n_classes).
struct LabeledDataset {
  Eigen::MatrixXd X;
  std::vector<int> y;
  int n_classes = 0;
};

// Throws unless rows match labels, labels are in range, features are finite
// and (when require_two_classes) at least two classes are present.
void validate_dataset(const LabeledDataset& data, bool require_two_classes);

// gamma rule shared by the kernel classifiers:
// 1 / (n_features * mean per-feature population variance).
double gamma_scale_rule(const Eigen::MatrixXd& X);

}  // namespace voiceprint
