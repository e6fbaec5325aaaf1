// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/classifiers.hpp"

#include <cmath>
#include <stdexcept>

namespace voiceprint {

std::string classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::random_forest: return "rf";
    case ClassifierKind::naive_bayes: return "nb";
    case ClassifierKind::gaussian_process: return "gp";
  }
  return "unknown";
}

ClassifierKind classifier_from_name(const std::string& name) {
  if (name == "svm") return ClassifierKind::svm;
  if (name == "rf") return ClassifierKind::random_forest;
  if (name == "nb") return ClassifierKind::naive_bayes;
  if (name == "gp") return ClassifierKind::gaussian_process;
  throw std::runtime_error("unknown classifier '" + name + "' (expected svm, rf, nb or gp)");
}

const std::vector<ClassifierKind>& all_classifiers() {
  static const std::vector<ClassifierKind> kinds = {
      ClassifierKind::svm, ClassifierKind::random_forest, ClassifierKind::naive_bayes,
      ClassifierKind::gaussian_process};
  return kinds;
}

TrainedClassifier fit_classifier(ClassifierKind kind, const LabeledDataset& data,
                                 const ClassifierSettings& settings, std::uint64_t seed) {
  TrainedClassifier trained;
  trained.kind = kind;
  trained.standardized = settings.standardize;

  LabeledDataset working = data;
  if (settings.standardize) {
    trained.feat_mean = working.X.colwise().mean();
    Eigen::RowVectorXd sd =
        (working.X.rowwise() - trained.feat_mean).array().square().colwise().mean().sqrt();
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
      if (!(sd(j) > 1e-12)) sd(j) = 1.0;
    }
    trained.feat_scale = sd;
    working.X = (working.X.rowwise() - trained.feat_mean).array().rowwise() /
                trained.feat_scale.array();
  }

  switch (kind) {
    case ClassifierKind::svm:
      trained.model = fit_svm(working, settings.svm);
      break;
    case ClassifierKind::random_forest: {
      ForestConfig cfg = settings.forest;
      cfg.seed = seed;
      trained.model = fit_random_forest(working, cfg);
      break;
    }
    case ClassifierKind::naive_bayes:
      trained.model = fit_gaussian_nb(working, settings.nb);
      break;
    case ClassifierKind::gaussian_process:
      trained.model = fit_gp_laplace(working, settings.gp);
      break;
  }
  return trained;
}

std::vector<int> predict(const TrainedClassifier& model, const Eigen::MatrixXd& X) {
  if (X.rows() == 0) return {};
  const Eigen::MatrixXd* input = &X;
  Eigen::MatrixXd scaled;
  if (model.standardized) {
    scaled = (X.rowwise() - model.feat_mean).array().rowwise() / model.feat_scale.array();
    input = &scaled;
  }
  return std::visit([&](const auto& m) { return predict(m, *input); }, model.model);
}

double max_kkt_residual(const TrainedClassifier& model) {
  if (const auto* svm = std::get_if<SvmModel>(&model.model)) {
    return svm_max_kkt_residual(*svm);
  }
  return 0.0;
}

}  // namespace voiceprint
