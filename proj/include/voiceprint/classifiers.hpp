// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "voiceprint/gp.hpp"
#include "voiceprint/labeled_dataset.hpp"
#include "voiceprint/naive_bayes.hpp"
#include "voiceprint/random_forest.hpp"
#include "voiceprint/svm.hpp"

namespace voiceprint {

enum class ClassifierKind { svm, random_forest, naive_bayes, gaussian_process };

std::string classifier_name(ClassifierKind kind);
ClassifierKind classifier_from_name(const std::string& name);

const std::vector<ClassifierKind>& all_classifiers();

struct ClassifierSettings {
  SvmConfig svm;
  ForestConfig forest;
  GnbConfig nb;
  GpConfig gp;
  bool standardize = false;  // z-score features using train statistics
};

// Uniform train/predict contract over the four model families. Immutable
// after fit.
struct TrainedClassifier {
  ClassifierKind kind;
  std::variant<SvmModel, ForestModel, GnbModel, GpModel> model;
  bool standardized = false;
  Eigen::RowVectorXd feat_mean;
  Eigen::RowVectorXd feat_scale;
};

// `seed` feeds the random forest; the other three fits are deterministic
// functions of the data.
TrainedClassifier fit_classifier(ClassifierKind kind, const LabeledDataset& data,
                                 const ClassifierSettings& settings, std::uint64_t seed);

std::vector<int> predict(const TrainedClassifier& model, const Eigen::MatrixXd& X);

// KKT residual of a fitted SVM (0 for the other kinds).
double max_kkt_residual(const TrainedClassifier& model);

}  // namespace voiceprint
