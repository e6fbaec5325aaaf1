// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "voiceprint/labeled_dataset.hpp"

namespace voiceprint {

struct GnbConfig {
  // Added variance = var_smoothing * max per-feature variance of the data.
  double var_smoothing = 1e-9;
};

struct GnbModel {
  int n_classes = 0;
  int feature_dim = 0;
  Eigen::VectorXd log_prior;  // per class
  Eigen::MatrixXd mean;       // n_classes x d
  Eigen::MatrixXd var;        // n_classes x d, smoothed
};

GnbModel fit_gaussian_nb(const LabeledDataset& data, const GnbConfig& config);

// argmax of log prior + sum of log Gaussian densities; ties go to the
// lowest class index.
std::vector<int> predict(const GnbModel& model, const Eigen::MatrixXd& X);

}  // namespace voiceprint
