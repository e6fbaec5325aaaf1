// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "voiceprint/classifiers.hpp"
#include "voiceprint/embedder.hpp"
#include "voiceprint/eval.hpp"
#include "voiceprint/mfcc.hpp"
#include "voiceprint/synth.hpp"

namespace voiceprint {

// Full run configuration; defaults reproduce the stock demo pipeline.
// Loaded from a JSON document, with CLI flags overriding individual keys.
struct RunConfig {
  std::optional<std::uint64_t> master_seed;
  int jobs = 1;
  SynthSpec synth = demo_synth_spec();
  MfccConfig mfcc;
  TcnConfig tcn;
  TrainConfig train;
  ClassifierSettings classifiers;
  int eval_replicates = 500;
  double eval_train_fraction = 0.75;
  bool eval_stratified = true;
  bool eval_cross_call_type = true;
  CompareConfig compare;

  std::uint64_t require_seed() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

// Synthesizes the corpus under out_dir and prints the cell-count table.
int cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out);

// One pooled 128-dim vector per snippet. frontend is "mfcc" or "learnt";
// the learnt path needs a weights file and resamples to the embedder rate.
int cmd_extract(const RunConfig& config, const std::filesystem::path& manifest_path,
                const std::string& frontend,
                const std::optional<std::filesystem::path>& weights_path,
                const std::filesystem::path& out_csv, std::ostream& out);

// In-memory core of cmd_extract.
FeatureTable extract_feature_table(const RunConfig& config,
                                   const std::filesystem::path& manifest_path,
                                   const std::string& frontend,
                                   const std::optional<std::filesystem::path>& weights_path);

int cmd_train_embedder(const RunConfig& config, const std::filesystem::path& manifest_path,
                       const std::filesystem::path& out_weights,
                       const std::filesystem::path& out_loss_csv, std::ostream& out);

// Repeated-partition classifier comparison + per-call-type confusions.
int cmd_evaluate(const RunConfig& config, const std::filesystem::path& features_csv,
                 const std::filesystem::path& out_dir, const std::string& feature_space_label,
                 std::ostream& out, std::ostream& err);

// MFCC-vs-learnt sweep over training-set sizes.
int cmd_compare(const RunConfig& config, const std::filesystem::path& mfcc_csv,
                const std::filesystem::path& learnt_csv, const std::filesystem::path& out_dir,
                std::ostream& out, std::ostream& err);

}  // namespace voiceprint
