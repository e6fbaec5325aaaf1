// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "voiceprint/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"voiceprint: call-type-independent vocal identity benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--jobs", jobs, "worker pool size (overrides the config)");

  auto* synth = app.add_subcommand("synth", "synthesize a labeled corpus");
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* extract = app.add_subcommand("extract", "pooled features, one row per snippet");
  std::string extract_manifest, extract_frontend = "mfcc", extract_out;
  std::optional<std::string> extract_weights;
  extract->add_option("--manifest", extract_manifest, "manifest CSV")->required();
  extract->add_option("--frontend", extract_frontend, "mfcc or learnt");
  extract->add_option("--weights", extract_weights, "weights file (learnt frontend)");
  extract->add_option("--out", extract_out, "output feature CSV")->required();

  auto* train = app.add_subcommand("train-embedder", "train the identity embedder");
  std::string train_manifest, train_out, train_loss = "";
  train->add_option("--manifest", train_manifest, "training corpus manifest")->required();
  train->add_option("--out", train_out, "output weights file")->required();
  train->add_option("--loss-csv", train_loss, "loss trace CSV (default: <out>.loss.csv)");

  auto* evaluate = app.add_subcommand("evaluate", "classifier comparison + confusions");
  std::string eval_features, eval_out, eval_label = "features";
  evaluate->add_option("--features", eval_features, "feature CSV")->required();
  evaluate->add_option("--out", eval_out, "output directory")->required();
  evaluate->add_option("--label", eval_label, "feature-space label for the raw-score CSV");

  auto* compare = app.add_subcommand("compare", "MFCC vs learnt feature-space sweep");
  std::string cmp_mfcc, cmp_learnt, cmp_out;
  compare->add_option("--mfcc", cmp_mfcc, "MFCC feature CSV")->required();
  compare->add_option("--learnt", cmp_learnt, "learnt feature CSV")->required();
  compare->add_option("--out", cmp_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    voiceprint::RunConfig config;
    if (!config_path.empty()) config = voiceprint::load_run_config(config_path);
    if (seed.has_value()) config.master_seed = *seed;
    if (jobs.has_value()) config.jobs = *jobs;

    if (synth->parsed()) {
      return voiceprint::cmd_synth(config, synth_out, std::cout);
    }
    if (extract->parsed()) {
      std::optional<std::filesystem::path> weights;
      if (extract_weights.has_value()) weights = *extract_weights;
      return voiceprint::cmd_extract(config, extract_manifest, extract_frontend, weights,
                                     extract_out, std::cout);
    }
    if (train->parsed()) {
      const std::string loss = train_loss.empty() ? train_out + ".loss.csv" : train_loss;
      return voiceprint::cmd_train_embedder(config, train_manifest, train_out, loss, std::cout);
    }
    if (evaluate->parsed()) {
      return voiceprint::cmd_evaluate(config, eval_features, eval_out, eval_label, std::cout,
                                      std::cerr);
    }
    if (compare->parsed()) {
      return voiceprint::cmd_compare(config, cmp_mfcc, cmp_learnt, cmp_out, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
