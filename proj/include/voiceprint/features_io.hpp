// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace voiceprint {

// One pooled feature vector per snippet, the same schema for both frontends:
// snippet_id,individual_id,call_type,f000..f127
struct FeatureTable {
  std::vector<std::string> snippet_ids;
  std::vector<std::string> individual_ids;
  std::vector<std::string> call_types;
  Eigen::MatrixXd X;
};

void save_features_csv(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable load_features_csv(const std::filesystem::path& path);

// Class indices in first-appearance order.
struct ClassMap {
  std::vector<std::string> classes;
  std::vector<int> labels;
};

ClassMap class_map(const std::vector<std::string>& ids);

}  // namespace voiceprint
