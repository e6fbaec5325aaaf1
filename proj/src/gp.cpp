// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace voiceprint {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& X, double gamma, double jitter) {
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * (X * X.transpose())).colwise() + sq;
  d2.rowwise() += sq.transpose();
  Eigen::MatrixXd K = (-gamma * d2.cwiseMax(0.0)).array().exp();
  K.diagonal().array() += jitter;
  return K;
}

// Posterior mode by the numerically stable Newton recursion
// (B = I + W^1/2 K W^1/2, f <- K (W f + grad) - corrections).
GpBinary fit_binary(const Eigen::MatrixXd& X, const std::vector<double>& y, int class_index,
                    double gamma, const GpConfig& config) {
  const int n = static_cast<int>(X.rows());
  const Eigen::MatrixXd K = rbf_gram(X, gamma, config.jitter);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t(i) = 0.5 * (y[static_cast<std::size_t>(i)] + 1.0);

  Eigen::VectorXd grad(n), w_sqrt(n), a(n);
  Eigen::MatrixXd chol_l;
  bool converged = false;
  for (int iter = 0; iter < config.newton_max_iter; ++iter) {
    Eigen::VectorXd pi(n), w(n);
    for (int i = 0; i < n; ++i) {
      pi(i) = sigmoid(f(i));
      w(i) = std::max(pi(i) * (1.0 - pi(i)), 1e-12);
    }
    grad = t - pi;
    w_sqrt = w.cwiseSqrt();

    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
    B += w_sqrt.asDiagonal() * K * w_sqrt.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("gp: Cholesky factorization failed");
    }
    chol_l = llt.matrixL();

    const Eigen::VectorXd b = w.cwiseProduct(f) + grad;
    const Eigen::VectorXd kb = K * b;
    const Eigen::VectorXd solved = llt.solve(w_sqrt.cwiseProduct(kb));
    a = b - w_sqrt.cwiseProduct(solved);
    const Eigen::VectorXd f_new = K * a;

    const double update = (f_new - f).lpNorm<Eigen::Infinity>();
    f = f_new;
    if (update < config.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error("gp: Newton iterations did not converge");
  }

  // Final Laplace state at the mode.
  GpBinary machine;
  machine.class_index = class_index;
  machine.train_x = X;
  machine.f_hat = f;
  machine.a = a;
  Eigen::VectorXd pi(n), w(n);
  for (int i = 0; i < n; ++i) {
    pi(i) = sigmoid(f(i));
    w(i) = std::max(pi(i) * (1.0 - pi(i)), 1e-12);
  }
  machine.grad = t - pi;
  machine.w_sqrt = w.cwiseSqrt();
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  B += machine.w_sqrt.asDiagonal() * K * machine.w_sqrt.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gp: Cholesky factorization failed at the mode");
  }
  machine.chol_b = llt.matrixL();
  return machine;
}

}  // namespace

GpModel fit_gp_laplace(const LabeledDataset& data, const GpConfig& config) {
  validate_dataset(data, true);

  GpModel model;
  model.n_classes = data.n_classes;
  model.feature_dim = static_cast<int>(data.X.cols());
  model.gamma = config.gamma > 0.0 ? config.gamma : gamma_scale_rule(data.X);
  model.jitter = config.jitter;

  for (int c = 0; c < data.n_classes; ++c) {
    std::vector<double> y(data.y.size());
    bool has_pos = false;
    for (std::size_t i = 0; i < data.y.size(); ++i) {
      y[i] = data.y[i] == c ? 1.0 : -1.0;
      has_pos = has_pos || data.y[i] == c;
    }
    if (!has_pos) continue;  // absent class keeps probability 0 implicitly
    model.machines.push_back(fit_binary(data.X, y, c, model.gamma, config));
  }
  return model;
}

double gp_predict_prob(const GpBinary& machine, double gamma, double jitter,
                       const Eigen::VectorXd& x) {
  const int n = static_cast<int>(machine.train_x.rows());
  Eigen::VectorXd k_star(n);
  for (int i = 0; i < n; ++i) {
    k_star(i) = std::exp(-gamma * (machine.train_x.row(i).transpose() - x).squaredNorm());
  }
  const double mean = k_star.dot(machine.grad);
  const Eigen::VectorXd v = machine.chol_b.triangularView<Eigen::Lower>().solve(
      machine.w_sqrt.cwiseProduct(k_star));
  const double variance = std::max(1.0 + jitter - v.squaredNorm(), 0.0);
  // Logistic-probit approximation of the predictive integral.
  return 1.0 / (1.0 + std::exp(-mean / std::sqrt(1.0 + kPi * variance / 8.0)));
}

std::vector<int> predict(const GpModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.feature_dim) {
    throw std::runtime_error("gp predict: feature dimension mismatch");
  }
  std::vector<int> labels(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd x = X.row(i).transpose();
    int best = -1;
    double best_prob = -1.0;
    for (const auto& machine : model.machines) {
      const double prob = gp_predict_prob(machine, model.gamma, model.jitter, x);
      if (prob > best_prob) {
        best_prob = prob;
        best = machine.class_index;
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

}  // namespace voiceprint
