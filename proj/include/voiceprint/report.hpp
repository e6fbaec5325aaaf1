// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "voiceprint/eval.hpp"

namespace voiceprint {

// All writers below are deterministic byte-for-byte in their inputs.

std::string eval_report_json(const EvalReport& report, const CrossCallTypeReport* cross);

// Schema: replicate,classifier,feature_space,n_train,C,metric,value
void write_eval_raw_scores_csv(const std::filesystem::path& path, const EvalReport& report,
                               const std::string& feature_space_label, int n_train,
                               double svm_c);

void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<CallTypeConfusion>& confusions);

// Confusion heat tables, one block per individual.
std::string confusion_svg(const std::string& classifier,
                          const std::vector<CallTypeConfusion>& confusions);

std::string compare_report_json(const CompareReport& report);

void write_compare_points_csv(const std::filesystem::path& path, const CompareReport& report);

void write_compare_raw_csv(const std::filesystem::path& path, const CompareReport& report);

// Mean-accuracy curves with 95% CI bands, one per feature space.
std::string comparison_svg(const CompareReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace voiceprint
