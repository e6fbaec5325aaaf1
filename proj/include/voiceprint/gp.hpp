// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "voiceprint/labeled_dataset.hpp"

namespace voiceprint {

struct GpConfig {
  double gamma = 0.0;        // 0 = variance-scale rule
  int newton_max_iter = 50;
  double tol = 1e-6;         // infinity norm of the mode update
  double jitter = 1e-8;      // added to the kernel diagonal
};

// One binary GP classifier (class vs rest) with logistic likelihood and a
// Laplace approximation around the posterior mode.
struct GpBinary {
  int class_index = 0;
  Eigen::MatrixXd train_x;
  Eigen::VectorXd f_hat;      // posterior mode
  Eigen::VectorXd grad;       // t - sigmoid(f_hat)
  Eigen::VectorXd w_sqrt;     // sqrt(pi (1 - pi)) at the mode
  Eigen::MatrixXd chol_b;     // lower Cholesky of I + W^1/2 K W^1/2
  Eigen::VectorXd a;          // K^-1 f_hat (from the Newton recursion)
};

struct GpModel {
  int n_classes = 0;
  int feature_dim = 0;
  double gamma = 0.0;
  double jitter = 0.0;
  std::vector<GpBinary> machines;
};

// One-vs-rest, Newton iterations for the mode. Throws on non-convergence
// within newton_max_iter.
GpModel fit_gp_laplace(const LabeledDataset& data, const GpConfig& config);

// argmax of the per-class predictive probabilities; ties go to the lowest
// class index.
std::vector<int> predict(const GpModel& model, const Eigen::MatrixXd& X);

// Predictive probability of one machine at x.
double gp_predict_prob(const GpBinary& machine, double gamma, double jitter,
                       const Eigen::VectorXd& x);

}  // namespace voiceprint
