// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace voiceprint {

void validate_dataset(const LabeledDataset& data, bool require_two_classes) {
  if (data.X.rows() != static_cast<Eigen::Index>(data.y.size())) {
    throw std::runtime_error("dataset: rows != labels");
  }
  if (data.X.rows() == 0) throw std::runtime_error("dataset: empty");
  if (!data.X.allFinite()) throw std::runtime_error("dataset: non-finite feature");
  std::vector<bool> present(static_cast<std::size_t>(data.n_classes), false);
  for (int label : data.y) {
    if (label < 0 || label >= data.n_classes) {
      throw std::runtime_error("dataset: label out of range");
    }
    present[static_cast<std::size_t>(label)] = true;
  }
  if (require_two_classes) {
    int distinct = 0;
    for (bool p : present) distinct += p ? 1 : 0;
    if (distinct < 2) throw std::runtime_error("dataset: need at least two classes");
  }
}

double gamma_scale_rule(const Eigen::MatrixXd& X) {
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const double mean_var =
      (X.rowwise() - mean).array().square().colwise().mean().mean();
  if (!(mean_var > 1e-300)) return 1.0 / static_cast<double>(X.cols());
  return 1.0 / (static_cast<double>(X.cols()) * mean_var);
}

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma) {
  if (!(gamma > 0.0)) throw std::runtime_error("rbf_kernel: gamma must be positive");
  return std::exp(-gamma * (a - b).squaredNorm());
}

namespace {

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& X, double gamma) {
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * (X * X.transpose())).colwise() + sq;
  d2.rowwise() += sq.transpose();
  return (-gamma * d2.cwiseMax(0.0)).array().exp();
}

struct SmoResult {
  Eigen::VectorXd alpha;
  double bias = 0.0;
  double dual_objective = 0.0;
  double max_kkt_residual = 0.0;
};

// Sequential minimal optimization with maximal-violating-pair selection and
// a second-order choice of the partner index. The loop stops when
// m(alpha) - M(alpha) <= tol, which bounds every KKT residual by tol/2 once
// the bias is placed mid-interval. All scans run in index order so a fit is
// a pure function of its inputs.
SmoResult solve_binary_smo(const Eigen::MatrixXd& K, const std::vector<double>& y, double C,
                           double tol, int max_passes) {
  const int n = static_cast<int>(y.size());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  // Gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij; starts at -e.
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  const double tau = 1e-12;

  auto in_up = [&](int i) {
    return (y[static_cast<std::size_t>(i)] > 0.0 && alpha(i) < C) ||
           (y[static_cast<std::size_t>(i)] < 0.0 && alpha(i) > 0.0);
  };
  auto in_low = [&](int i) {
    return (y[static_cast<std::size_t>(i)] > 0.0 && alpha(i) > 0.0) ||
           (y[static_cast<std::size_t>(i)] < 0.0 && alpha(i) < C);
  };

  const long long max_iterations =
      std::max<long long>(static_cast<long long>(max_passes) * n, 10000);
  long long iterations = 0;
  double final_m = 0.0, final_big_m = 0.0;
  bool have_up = false, have_low = false;

  while (true) {
    // m = max over I_up of -y_i grad_i, M = min over I_low.
    int i_up = -1;
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (in_up(i) && -y[static_cast<std::size_t>(i)] * grad(i) > m) {
        m = -y[static_cast<std::size_t>(i)] * grad(i);
        i_up = i;
      }
    }
    double big_m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (in_low(i)) big_m = std::min(big_m, -y[static_cast<std::size_t>(i)] * grad(i));
    }
    have_up = i_up >= 0;
    have_low = std::isfinite(big_m);
    final_m = m;
    final_big_m = big_m;
    if (!have_up || !have_low || m - big_m <= tol) break;

    // Second-order working-set selection for the partner.
    int j_low = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (!in_low(j)) continue;
      const double diff = m + y[static_cast<std::size_t>(j)] * grad(j);  // m - (-y_j grad_j)
      if (diff <= 0.0) continue;
      double quad = K(i_up, i_up) + K(j, j) - 2.0 * K(i_up, j);
      if (quad <= tau) quad = tau;
      const double gain = diff * diff / quad;
      if (gain > best_gain) {
        best_gain = gain;
        j_low = j;
      }
    }
    if (j_low < 0) break;  // no violating partner; m - M <= 0 next round

    if (++iterations > max_iterations) {
      throw std::runtime_error("svm: SMO did not converge within max_passes");
    }

    const int i = i_up, j = j_low;
    const double yi = y[static_cast<std::size_t>(i)], yj = y[static_cast<std::size_t>(j)];
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= tau) quad = tau;

    // Feasible direction preserving sum(y a): da_i = yi s, da_j = -yj s with
    // s > 0 for a violating pair, clipped to the box.
    const double diff = m + yj * grad(j);  // m - (-yj grad_j) > 0
    double step = diff / quad;
    double step_max = yi > 0.0 ? C - alpha(i) : alpha(i);
    step_max = std::min(step_max, yj > 0.0 ? alpha(j) : C - alpha(j));
    step = std::min(step, step_max);
    if (!(step > 0.0)) break;  // numerically pinned at the box

    alpha(i) = std::clamp(alpha(i) + yi * step, 0.0, C);
    alpha(j) = std::clamp(alpha(j) - yj * step, 0.0, C);
    for (int t = 0; t < n; ++t) {
      grad(t) += y[static_cast<std::size_t>(t)] * step * (K(i, t) - K(j, t));
    }
  }

  SmoResult result;
  result.alpha = alpha;
  if (have_up && have_low) {
    result.bias = 0.5 * (final_m + final_big_m);
  } else if (have_up) {
    result.bias = final_m;
  } else if (have_low) {
    result.bias = final_big_m;
  } else {
    result.bias = 0.0;
  }

  Eigen::VectorXd ay(n);
  for (int i = 0; i < n; ++i) ay(i) = alpha(i) * y[static_cast<std::size_t>(i)];
  const Eigen::VectorXd f = K * ay + Eigen::VectorXd::Constant(n, result.bias);
  result.dual_objective = alpha.sum() - 0.5 * ay.dot(K * ay);
  for (int i = 0; i < n; ++i) {
    const double margin = y[static_cast<std::size_t>(i)] * f(i);
    double residual;
    if (alpha(i) <= 0.0) {
      residual = std::max(0.0, 1.0 - margin);
    } else if (alpha(i) >= C) {
      residual = std::max(0.0, margin - 1.0);
    } else {
      residual = std::abs(margin - 1.0);
    }
    result.max_kkt_residual = std::max(result.max_kkt_residual, residual);
  }
  return result;
}

}  // namespace

SvmModel fit_svm(const LabeledDataset& data, const SvmConfig& config) {
  validate_dataset(data, true);
  if (!(config.C > 0.0)) throw std::runtime_error("svm: C must be positive");

  SvmModel model;
  model.n_classes = data.n_classes;
  model.feature_dim = static_cast<int>(data.X.cols());
  model.gamma = config.gamma > 0.0 ? config.gamma : gamma_scale_rule(data.X);

  for (int c1 = 0; c1 < data.n_classes; ++c1) {
    for (int c2 = c1 + 1; c2 < data.n_classes; ++c2) {
      std::vector<int> rows;
      std::vector<double> y;
      for (int i = 0; i < static_cast<int>(data.y.size()); ++i) {
        if (data.y[static_cast<std::size_t>(i)] == c1) {
          rows.push_back(i);
          y.push_back(1.0);
        } else if (data.y[static_cast<std::size_t>(i)] == c2) {
          rows.push_back(i);
          y.push_back(-1.0);
        }
      }
      bool has_pos = false, has_neg = false;
      for (double v : y) (v > 0 ? has_pos : has_neg) = true;
      // A pair with one side absent casts no informative vote; skip it.
      if (!has_pos || !has_neg) continue;
      Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), data.X.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        sub.row(static_cast<Eigen::Index>(r)) = data.X.row(rows[r]);
      }
      const Eigen::MatrixXd gram = rbf_gram(sub, model.gamma);
      const SmoResult solved =
          solve_binary_smo(gram, y, config.C, config.tolerance, config.max_passes);

      BinarySvm machine;
      machine.class_pos = c1;
      machine.class_neg = c2;
      machine.bias = solved.bias;
      machine.dual_objective = solved.dual_objective;
      machine.max_kkt_residual = solved.max_kkt_residual;
      std::vector<int> sv;
      for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        if (solved.alpha(i) > 1e-12) sv.push_back(i);
      }
      machine.support_x.resize(static_cast<Eigen::Index>(sv.size()), data.X.cols());
      machine.alpha_y.resize(static_cast<Eigen::Index>(sv.size()));
      for (std::size_t r = 0; r < sv.size(); ++r) {
        machine.support_x.row(static_cast<Eigen::Index>(r)) = sub.row(sv[r]);
        machine.alpha_y(static_cast<Eigen::Index>(r)) =
            solved.alpha(sv[r]) * y[static_cast<std::size_t>(sv[r])];
      }
      model.machines.push_back(std::move(machine));
    }
  }
  if (model.machines.empty()) throw std::runtime_error("svm: no trainable class pair");
  return model;
}

double svm_decision(const BinarySvm& machine, double gamma, const Eigen::VectorXd& x) {
  double f = machine.bias;
  for (Eigen::Index r = 0; r < machine.support_x.rows(); ++r) {
    f += machine.alpha_y(r) *
         std::exp(-gamma * (machine.support_x.row(r).transpose() - x).squaredNorm());
  }
  return f;
}

std::vector<int> predict(const SvmModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.feature_dim) {
    throw std::runtime_error("svm predict: feature dimension mismatch");
  }
  std::vector<int> labels(static_cast<std::size_t>(X.rows()));
  std::vector<int> votes(static_cast<std::size_t>(model.n_classes));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    const Eigen::VectorXd x = X.row(i).transpose();
    for (const auto& machine : model.machines) {
      const double f = svm_decision(machine, model.gamma, x);
      ++votes[static_cast<std::size_t>(f >= 0.0 ? machine.class_pos : machine.class_neg)];
    }
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c) {
      if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

double svm_max_kkt_residual(const SvmModel& model) {
  double r = 0.0;
  for (const auto& machine : model.machines) r = std::max(r, machine.max_kkt_residual);
  return r;
}

}  // namespace voiceprint
