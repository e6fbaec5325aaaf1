// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Golden-byte regression tests. Regenerate with VOICEPRINT_REGEN=1 after an
// intentional change, then review the diff under tests/golden/.

#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "test_util.hpp"
#include "voiceprint/commands.hpp"
#include "voiceprint/csv.hpp"
#include "voiceprint/rng.hpp"

using namespace voiceprint;

namespace {

const std::filesystem::path kGoldenDir = VOICEPRINT_GOLDEN_DIR;

// Compares actual bytes against tests/golden/<name>; rewrites when
// VOICEPRINT_REGEN is set.
void golden_compare(const std::string& name, const std::string& actual) {
  const std::filesystem::path path = kGoldenDir / name;
  if (std::getenv("VOICEPRINT_REGEN") != nullptr) {
    test::spit(path, actual);
    MESSAGE("regenerated ", path.string());
    return;
  }
  REQUIRE_MESSAGE(std::filesystem::exists(path),
                  "missing golden file; run with VOICEPRINT_REGEN=1 to create it");
  CHECK_MESSAGE(test::slurp(path) == actual, "golden mismatch for ", name);
}

Manifest demo_manifest() {
  Manifest m;
  const std::vector<std::string> individuals = {"alpha", "bravo", "carol"};
  const std::vector<std::string> call_types = {"scream", "pant_hoot_intro", "pant_hoot_climax"};
  const int counts[3][3] = {{30, 29, 13}, {30, 20, 17}, {33, 12, 11}};
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < counts[i][c]; ++k) {
        CallRecord rec;
        rec.snippet_id = individuals[static_cast<std::size_t>(i)] + "_" +
                         call_types[static_cast<std::size_t>(c)] + "_" + std::to_string(k);
        rec.individual_id = individuals[static_cast<std::size_t>(i)];
        rec.call_type = call_types[static_cast<std::size_t>(c)];
        rec.audio_path = "audio/" + rec.snippet_id + ".wav";
        rec.duration_s = 1.0;
        m.records.push_back(std::move(rec));
      }
    }
  }
  return m;
}

FeatureTable fixture_features() {
  const std::vector<std::string> individuals = {"alpha", "bravo", "carol"};
  const std::vector<std::string> call_types = {"scream", "pant_hoot_intro", "pant_hoot_climax"};
  Rng rng(2718);
  FeatureTable table;
  table.X.resize(36, 128);
  int row = 0;
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 4; ++k) {
        table.snippet_ids.push_back("fix" + std::to_string(row));
        table.individual_ids.push_back(individuals[static_cast<std::size_t>(i)]);
        table.call_types.push_back(call_types[static_cast<std::size_t>(c)]);
        for (int j = 0; j < 128; ++j) {
          table.X(row, j) = 0.22 * i + rng.normal();
        }
        ++row;
      }
    }
  }
  return table;
}

}  // namespace

TEST_CASE("golden: stratified partition of the demo manifest at seed 42") {
  SplitSpec spec;
  spec.seed = 42;
  const auto [train, test] = partition(demo_manifest(), spec);
  std::ostringstream out;
  for (const auto& rec : train.records) out << rec.snippet_id << "\n";
  out << "--\n";
  for (const auto& rec : test.records) out << rec.snippet_id << "\n";
  golden_compare("partition_seed42.txt", out.str());
}

TEST_CASE("golden: fixture classifier predictions") {
  const FeatureTable features = fixture_features();
  const ClassMap individuals = class_map(features.individual_ids);
  LabeledDataset data;
  data.X = features.X;
  data.y = individuals.labels;
  data.n_classes = 3;

  std::ostringstream out;
  for (ClassifierKind kind : all_classifiers()) {
    const TrainedClassifier model = fit_classifier(kind, data, ClassifierSettings{}, 11);
    out << classifier_name(kind) << ":";
    for (int label : predict(model, data.X)) out << " " << label;
    out << "\n";
  }
  golden_compare("predict_labels.txt", out.str());
}

TEST_CASE("golden: evaluate report bytes under a fixed master seed") {
  test::TempDir dir("golden_eval");
  save_features_csv(dir / "features.csv", fixture_features());

  RunConfig config;
  config.master_seed = 777;
  config.eval_replicates = 4;
  std::ostringstream sink;
  cmd_evaluate(config, dir / "features.csv", dir / "eval", "fixture", sink, sink);
  golden_compare("eval_report.json", test::slurp(dir / "eval" / "report.json"));
  golden_compare("eval_raw_scores.csv", test::slurp(dir / "eval" / "raw_scores.csv"));
}

TEST_CASE("golden: comparison points bytes under a fixed master seed") {
  test::TempDir dir("golden_cmp");
  save_features_csv(dir / "features.csv", fixture_features());

  RunConfig config;
  config.master_seed = 31337;
  config.compare.train_grid = {6, 12, 24};
  config.compare.per_bin = 3;
  std::ostringstream sink;
  cmd_compare(config, dir / "features.csv", dir / "features.csv", dir / "cmp", sink, sink);
  golden_compare("compare_points.csv", test::slurp(dir / "cmp" / "points.csv"));
}
