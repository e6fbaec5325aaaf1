// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "voiceprint/labeled_dataset.hpp"

namespace voiceprint {

struct SvmConfig {
  double C = 10.0;
  double gamma = 0.0;      // 0 = variance-scale rule
  double tolerance = 1e-3; // KKT tolerance of the SMO solver
  int max_passes = 2000;   // iteration cap: max_passes * n pair updates
};

// exp(-gamma * |a - b|^2)
double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma);

// One soft-margin RBF machine for a class pair, solved by sequential
// minimal optimization.
struct BinarySvm {
  int class_pos = 0;  // +1 side (lower class index)
  int class_neg = 0;
  Eigen::MatrixXd support_x;   // support vectors, one per row
  Eigen::VectorXd alpha_y;     // alpha_i * y_i per support vector
  double bias = 0.0;
  double dual_objective = 0.0;     // sum(alpha) - 1/2 a'Qa at the solution
  double max_kkt_residual = 0.0;   // recomputed after convergence
};

struct SvmModel {
  int n_classes = 0;
  int feature_dim = 0;
  double gamma = 0.0;
  std::vector<BinarySvm> machines;  // all (c1 < c2) pairs in index order
};

// One-vs-one with pairwise voting; ties go to the lowest class index.
SvmModel fit_svm(const LabeledDataset& data, const SvmConfig& config);

std::vector<int> predict(const SvmModel& model, const Eigen::MatrixXd& X);

// Decision value of one machine at x.
double svm_decision(const BinarySvm& machine, double gamma, const Eigen::VectorXd& x);

// Largest KKT residual across the model's machines.
double svm_max_kkt_residual(const SvmModel& model);

}  // namespace voiceprint
