// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/naive_bayes.hpp"

#include <cmath>
#include <stdexcept>

namespace voiceprint {

GnbModel fit_gaussian_nb(const LabeledDataset& data, const GnbConfig& config) {
  validate_dataset(data, true);
  const int n = static_cast<int>(data.X.rows());
  const int d = static_cast<int>(data.X.cols());

  GnbModel model;
  model.n_classes = data.n_classes;
  model.feature_dim = d;
  model.log_prior.resize(data.n_classes);
  model.mean = Eigen::MatrixXd::Zero(data.n_classes, d);
  model.var = Eigen::MatrixXd::Zero(data.n_classes, d);

  std::vector<int> counts(static_cast<std::size_t>(data.n_classes), 0);
  for (int i = 0; i < n; ++i) {
    const int c = data.y[static_cast<std::size_t>(i)];
    ++counts[static_cast<std::size_t>(c)];
    model.mean.row(c) += data.X.row(i);
  }
  for (int c = 0; c < data.n_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      model.mean.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
  }
  for (int i = 0; i < n; ++i) {
    const int c = data.y[static_cast<std::size_t>(i)];
    model.var.row(c) += (data.X.row(i) - model.mean.row(c)).array().square().matrix();
  }

  const Eigen::RowVectorXd grand_mean = data.X.colwise().mean();
  const double max_var =
      (data.X.rowwise() - grand_mean).array().square().colwise().mean().maxCoeff();
  const double epsilon = config.var_smoothing * std::max(max_var, 1e-300);

  for (int c = 0; c < data.n_classes; ++c) {
    const int count = counts[static_cast<std::size_t>(c)];
    if (count > 0) {
      model.var.row(c) /= static_cast<double>(count);
      model.log_prior(c) = std::log(static_cast<double>(count) / n);
    } else {
      model.log_prior(c) = -std::numeric_limits<double>::infinity();
    }
    model.var.row(c).array() += epsilon;
  }
  return model;
}

std::vector<int> predict(const GnbModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.feature_dim) {
    throw std::runtime_error("naive bayes predict: feature dimension mismatch");
  }
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  std::vector<int> labels(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < model.n_classes; ++c) {
      double score = model.log_prior(c);
      for (int f = 0; f < model.feature_dim; ++f) {
        const double diff = X(i, f) - model.mean(c, f);
        const double v = model.var(c, f);
        score -= 0.5 * (kLog2Pi + std::log(v) + diff * diff / v);
      }
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

}  // namespace voiceprint
