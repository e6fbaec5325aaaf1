// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/commands.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <stdexcept>

#include "voiceprint/csv.hpp"
#include "voiceprint/parallel.hpp"
#include "voiceprint/report.hpp"
#include "voiceprint/rng.hpp"

namespace voiceprint {

namespace {

using nlohmann::json;

ContourShape contour_from_name(const std::string& name) {
  if (name == "flat") return ContourShape::flat;
  if (name == "rising") return ContourShape::rising;
  if (name == "peaked") return ContourShape::peaked;
  throw std::runtime_error("unknown contour '" + name + "' (expected flat, rising or peaked)");
}

SynthSpec parse_synth(const json& j) {
  SynthSpec spec = demo_synth_spec();
  if (j.contains("individuals")) {
    spec.individual_ids = j.at("individuals").get<std::vector<std::string>>();
  }
  if (j.contains("call_types")) {
    spec.call_types.clear();
    for (const auto& ct : j.at("call_types")) {
      CallTypeProfile p;
      p.name = ct.at("name").get<std::string>();
      if (ct.contains("contour")) p.contour = contour_from_name(ct.at("contour").get<std::string>());
      if (ct.contains("duration_min_s")) p.duration_min_s = ct.at("duration_min_s").get<double>();
      if (ct.contains("duration_max_s")) p.duration_max_s = ct.at("duration_max_s").get<double>();
      if (ct.contains("noise_mix")) p.noise_mix = ct.at("noise_mix").get<double>();
      if (ct.contains("elements")) p.element_count = ct.at("elements").get<int>();
      spec.call_types.push_back(std::move(p));
    }
  }
  if (j.contains("counts")) {
    spec.snippets_per_cell = j.at("counts").get<std::vector<std::vector<int>>>();
  } else if (j.contains("snippets_per_cell")) {
    const int uniform = j.at("snippets_per_cell").get<int>();
    spec.snippets_per_cell.assign(spec.individual_ids.size(),
                                  std::vector<int>(spec.call_types.size(), uniform));
  } else if (j.contains("individuals") || j.contains("call_types")) {
    spec.snippets_per_cell.assign(spec.individual_ids.size(),
                                  std::vector<int>(spec.call_types.size(), 12));
  }
  if (j.contains("sample_rate_hz")) spec.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  if (j.contains("null_identity")) spec.null_identity = j.at("null_identity").get<bool>();
  return spec;
}

void parse_mfcc(const json& j, MfccConfig& c) {
  if (j.contains("n_coeffs")) c.n_coeffs = j.at("n_coeffs").get<int>();
  if (j.contains("n_mels")) c.n_mels = j.at("n_mels").get<int>();
  if (j.contains("f_min_hz")) c.f_min_hz = j.at("f_min_hz").get<double>();
  if (j.contains("f_max_hz")) c.f_max_hz = j.at("f_max_hz").get<double>();
  if (j.contains("frame_ms")) c.frame_ms = j.at("frame_ms").get<double>();
  if (j.contains("hop_ms")) c.hop_ms = j.at("hop_ms").get<double>();
  if (j.contains("fft_size")) c.fft_size = j.at("fft_size").get<int>();
  if (j.contains("log_floor")) c.log_floor = j.at("log_floor").get<double>();
}

void parse_tcn(const json& j, TcnConfig& c) {
  if (j.contains("n_blocks")) c.n_blocks = j.at("n_blocks").get<int>();
  if (j.contains("channels")) c.channels = j.at("channels").get<int>();
  if (j.contains("kernel_size")) c.kernel_size = j.at("kernel_size").get<int>();
  if (j.contains("dilations")) c.dilations = j.at("dilations").get<std::vector<int>>();
  if (j.contains("frame_hop_samples")) c.frame_hop_samples = j.at("frame_hop_samples").get<int>();
  if (j.contains("embed_dim")) c.embed_dim = j.at("embed_dim").get<int>();
  if (j.contains("l2_normalize_output")) {
    c.l2_normalize_output = j.at("l2_normalize_output").get<bool>();
  }
  if (j.contains("input_sample_rate_hz")) {
    c.input_sample_rate_hz = j.at("input_sample_rate_hz").get<int>();
  }
}

void parse_train(const json& j, TrainConfig& c) {
  if (j.contains("margin")) c.margin = j.at("margin").get<double>();
  if (j.contains("speakers_per_batch")) c.speakers_per_batch = j.at("speakers_per_batch").get<int>();
  if (j.contains("snippets_per_speaker")) {
    c.snippets_per_speaker = j.at("snippets_per_speaker").get<int>();
  }
  if (j.contains("steps")) c.steps = j.at("steps").get<int>();
  if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("mining")) {
    const std::string m = j.at("mining").get<std::string>();
    if (m == "all") {
      c.mining = MiningStrategy::all;
    } else if (m == "semi_hard") {
      c.mining = MiningStrategy::semi_hard;
    } else {
      throw std::runtime_error("unknown mining strategy '" + m + "'");
    }
  }
}

void parse_classifiers(const json& j, ClassifierSettings& s) {
  if (j.contains("svm")) {
    const auto& v = j.at("svm");
    if (v.contains("C")) s.svm.C = v.at("C").get<double>();
    if (v.contains("gamma")) s.svm.gamma = v.at("gamma").get<double>();
    if (v.contains("tolerance")) s.svm.tolerance = v.at("tolerance").get<double>();
    if (v.contains("max_passes")) s.svm.max_passes = v.at("max_passes").get<int>();
  }
  if (j.contains("forest")) {
    const auto& v = j.at("forest");
    if (v.contains("n_trees")) s.forest.n_trees = v.at("n_trees").get<int>();
    if (v.contains("max_features")) s.forest.max_features = v.at("max_features").get<int>();
    if (v.contains("max_depth")) s.forest.max_depth = v.at("max_depth").get<int>();
    if (v.contains("bootstrap")) s.forest.bootstrap = v.at("bootstrap").get<bool>();
  }
  if (j.contains("gp")) {
    const auto& v = j.at("gp");
    if (v.contains("gamma")) s.gp.gamma = v.at("gamma").get<double>();
    if (v.contains("newton_max_iter")) s.gp.newton_max_iter = v.at("newton_max_iter").get<int>();
    if (v.contains("tol")) s.gp.tol = v.at("tol").get<double>();
  }
  if (j.contains("nb")) {
    const auto& v = j.at("nb");
    if (v.contains("var_smoothing")) s.nb.var_smoothing = v.at("var_smoothing").get<double>();
  }
  if (j.contains("standardize")) s.standardize = j.at("standardize").get<bool>();
}

}  // namespace

std::uint64_t RunConfig::require_seed() const {
  if (!master_seed.has_value()) {
    throw std::runtime_error("master_seed required (set it in the config file or pass --seed)");
  }
  return *master_seed;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path.string() + ": " + e.what());
  }

  RunConfig config;
  if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("jobs")) config.jobs = j.at("jobs").get<int>();
  if (j.contains("synth")) config.synth = parse_synth(j.at("synth"));
  if (j.contains("mfcc")) parse_mfcc(j.at("mfcc"), config.mfcc);
  if (j.contains("embedder")) parse_tcn(j.at("embedder"), config.tcn);
  if (j.contains("train")) parse_train(j.at("train"), config.train);
  if (j.contains("classifiers")) parse_classifiers(j.at("classifiers"), config.classifiers);
  if (j.contains("evaluate")) {
    const auto& v = j.at("evaluate");
    if (v.contains("replicates")) config.eval_replicates = v.at("replicates").get<int>();
    if (v.contains("train_fraction")) {
      config.eval_train_fraction = v.at("train_fraction").get<double>();
    }
    if (v.contains("stratified")) config.eval_stratified = v.at("stratified").get<bool>();
    if (v.contains("cross_call_type")) {
      config.eval_cross_call_type = v.at("cross_call_type").get<bool>();
    }
  }
  if (j.contains("compare")) {
    const auto& v = j.at("compare");
    if (v.contains("train_grid")) config.compare.train_grid = v.at("train_grid").get<std::vector<int>>();
    if (v.contains("per_bin")) config.compare.per_bin = v.at("per_bin").get<int>();
    if (v.contains("c_bins")) {
      config.compare.c_bins.clear();
      for (const auto& bin : v.at("c_bins")) {
        config.compare.c_bins.push_back({bin.at(0).get<double>(), bin.at(1).get<double>()});
      }
    }
  }

  config.tcn.validate();
  return config;
}

int cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out) {
  const std::uint64_t seed = config.require_seed();
  const SynthResult result =
      synthesize_corpus(config.synth, derive_seed(seed, "synth"), out_dir);
  const CellCounts counts = counts_by_cell(result.manifest);

  // Cell-count table: individuals as rows, call types as columns.
  std::size_t label_w = std::string("individual").size();
  for (const auto& id : counts.individuals) label_w = std::max(label_w, id.size());
  out << std::left << std::setw(static_cast<int>(label_w) + 2) << "individual";
  for (const auto& ct : counts.call_types) out << std::right << std::setw(18) << ct;
  out << std::right << std::setw(8) << "total" << "\n";
  for (std::size_t i = 0; i < counts.individuals.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(label_w) + 2) << counts.individuals[i];
    for (std::size_t c = 0; c < counts.call_types.size(); ++c) {
      out << std::right << std::setw(18) << counts.counts[i][c];
    }
    out << std::right << std::setw(8) << counts.row_totals[i] << "\n";
  }
  out << std::left << std::setw(static_cast<int>(label_w) + 2) << "total";
  for (std::size_t c = 0; c < counts.call_types.size(); ++c) {
    out << std::right << std::setw(18) << counts.col_totals[c];
  }
  out << std::right << std::setw(8) << counts.total << "\n";
  out << "wrote " << counts.total << " snippets to " << out_dir.string() << "\n";
  return 0;
}

FeatureTable extract_feature_table(const RunConfig& config,
                                   const std::filesystem::path& manifest_path,
                                   const std::string& frontend,
                                   const std::optional<std::filesystem::path>& weights_path) {
  if (frontend != "mfcc" && frontend != "learnt") {
    throw std::runtime_error("unknown frontend '" + frontend + "' (expected mfcc or learnt)");
  }
  const Manifest manifest = load_manifest(manifest_path);

  ModelWeights weights;
  if (frontend == "learnt") {
    if (!weights_path.has_value()) {
      throw std::runtime_error("the learnt frontend needs --weights");
    }
    weights = load_weights(*weights_path);
    if (weights.config.embed_dim != kFeatureDim) {
      throw std::runtime_error("weights file embeds " + std::to_string(weights.config.embed_dim) +
                               " dims; the feature schema needs " + std::to_string(kFeatureDim));
    }
  }

  const int n = static_cast<int>(manifest.records.size());
  FeatureTable table;
  table.X.resize(n, kFeatureDim);
  table.snippet_ids.resize(static_cast<std::size_t>(n));
  table.individual_ids.resize(static_cast<std::size_t>(n));
  table.call_types.resize(static_cast<std::size_t>(n));

  parallel_for(n, config.jobs, [&](int i) {
    const CallRecord& rec = manifest.records[static_cast<std::size_t>(i)];
    const Waveform audio = read_wav(resolve_audio_path(manifest_path, rec.audio_path));
    FeatureVector pooled;
    if (frontend == "mfcc") {
      pooled = mean_pool(mfcc_sequence(audio, config.mfcc));
    } else {
      const Waveform at_rate = resample(audio, weights.config.input_sample_rate_hz);
      pooled = mean_pool_embedding(forward(weights, at_rate),
                                   weights.config.l2_normalize_output);
    }
    if (static_cast<int>(pooled.size()) != kFeatureDim) {
      throw std::runtime_error("frontend produced " + std::to_string(pooled.size()) +
                               " dims for snippet '" + rec.snippet_id + "'");
    }
    table.snippet_ids[static_cast<std::size_t>(i)] = rec.snippet_id;
    table.individual_ids[static_cast<std::size_t>(i)] = rec.individual_id;
    table.call_types[static_cast<std::size_t>(i)] = rec.call_type;
    for (int j = 0; j < kFeatureDim; ++j) table.X(i, j) = pooled[static_cast<std::size_t>(j)];
  });
  return table;
}

int cmd_extract(const RunConfig& config, const std::filesystem::path& manifest_path,
                const std::string& frontend,
                const std::optional<std::filesystem::path>& weights_path,
                const std::filesystem::path& out_csv, std::ostream& out) {
  config.require_seed();  // uniform interface; extraction itself is deterministic
  const FeatureTable table = extract_feature_table(config, manifest_path, frontend, weights_path);
  save_features_csv(out_csv, table);
  out << "wrote " << table.X.rows() << " feature rows to " << out_csv.string() << "\n";
  return 0;
}

int cmd_train_embedder(const RunConfig& config, const std::filesystem::path& manifest_path,
                       const std::filesystem::path& out_weights,
                       const std::filesystem::path& out_loss_csv, std::ostream& out) {
  const std::uint64_t seed = config.require_seed();
  const Manifest manifest = load_manifest(manifest_path);
  const ClassMap speakers = [&] {
    std::vector<std::string> ids;
    for (const auto& rec : manifest.records) ids.push_back(rec.individual_id);
    return class_map(ids);
  }();

  std::vector<TrainSnippet> corpus(manifest.records.size());
  parallel_for(static_cast<int>(manifest.records.size()), config.jobs, [&](int i) {
    const CallRecord& rec = manifest.records[static_cast<std::size_t>(i)];
    const Waveform audio = read_wav(resolve_audio_path(manifest_path, rec.audio_path));
    const Waveform at_rate = resample(audio, config.tcn.input_sample_rate_hz);
    corpus[static_cast<std::size_t>(i)] = {speakers.labels[static_cast<std::size_t>(i)],
                                           embedder_frames(at_rate, config.tcn)};
  });

  const ModelWeights initial = init_weights(config.tcn, derive_seed(seed, "embedder/init"));
  TrainConfig train_config = config.train;
  train_config.seed = derive_seed(seed, "embedder/train");
  const TrainResult result = train(initial, train_config, corpus);
  save_weights(out_weights, result.weights);

  CsvTable trace;
  trace.header = {"step", "loss", "n_triplets"};
  for (std::size_t s = 0; s < result.loss_trace.size(); ++s) {
    trace.rows.push_back({std::to_string(s), format_double(result.loss_trace[s]),
                          std::to_string(result.triplet_counts[s])});
  }
  write_csv(out_loss_csv, trace);

  const std::size_t tail = std::min<std::size_t>(20, result.loss_trace.size());
  if (tail > 0) {
    double tail_mean = 0.0;
    for (std::size_t s = result.loss_trace.size() - tail; s < result.loss_trace.size(); ++s) {
      tail_mean += result.loss_trace[s];
    }
    tail_mean /= static_cast<double>(tail);
    out << "trained " << config.train.steps << " steps on " << corpus.size()
        << " snippets; final " << tail << "-step mean loss " << format_double(tail_mean) << "\n";
  }
  out << "wrote " << out_weights.string() << " and " << out_loss_csv.string() << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& config, const std::filesystem::path& features_csv,
                 const std::filesystem::path& out_dir, const std::string& feature_space_label,
                 std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = config.require_seed();
  const FeatureTable features = load_features_csv(features_csv);

  EvalConfig eval_config;
  eval_config.n_replicates = config.eval_replicates;
  eval_config.train_fraction = config.eval_train_fraction;
  eval_config.stratified = config.eval_stratified;
  eval_config.settings = config.classifiers;
  eval_config.master_seed = seed;
  eval_config.jobs = config.jobs;

  const EvalReport report = classifier_comparison(features, eval_config);

  CrossCallTypeReport cross;
  const bool have_cross = config.eval_cross_call_type;
  if (have_cross) {
    cross = cross_calltype_eval(features, eval_config.classifiers, config.classifiers, seed);
  }

  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "report.json",
                  eval_report_json(report, have_cross ? &cross : nullptr));
  // Train size is fixed across replicates by the split spec.
  const auto [train_rows, test_rows] =
      partition_indices(features.individual_ids, eval_config.train_fraction,
                        derive_seed(seed, "eval/rep/0"), eval_config.stratified);
  write_eval_raw_scores_csv(out_dir / "raw_scores.csv", report, feature_space_label,
                            static_cast<int>(train_rows.size()), config.classifiers.svm.C);
  for (std::size_t k = 0; k < report.confusions.size(); ++k) {
    const std::string name = report.summaries[2 * k].classifier;
    write_confusion_csv(out_dir / ("confusion_" + name + ".csv"), report.confusions[k]);
    write_text_file(out_dir / ("confusion_" + name + ".svg"),
                    confusion_svg(name, report.confusions[k]));
  }

  for (const auto& s : report.summaries) {
    out << s.classifier << " " << s.metric << ": " << format_double(s.mean) << " +- "
        << format_double(s.sem) << " (sd " << format_double(s.sd) << ", n=" << s.n_replicates
        << (s.sem_degenerate ? ", sem degenerate" : "") << ")\n";
  }
  if (!report.failures.empty()) {
    err << report.failures.size() << " replicate fits failed; see report.json\n";
  }
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  out << "wrote evaluation outputs to " << out_dir.string() << "\n";
  return 0;
}

int cmd_compare(const RunConfig& config, const std::filesystem::path& mfcc_csv,
                const std::filesystem::path& learnt_csv, const std::filesystem::path& out_dir,
                std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = config.require_seed();
  const FeatureTable mfcc_features = load_features_csv(mfcc_csv);
  const FeatureTable learnt_features = load_features_csv(learnt_csv);

  CompareConfig compare_config = config.compare;
  compare_config.svm = config.classifiers.svm;
  compare_config.master_seed = seed;
  compare_config.jobs = config.jobs;

  const CompareReport report =
      feature_space_comparison(mfcc_features, learnt_features, compare_config);

  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "report.json", compare_report_json(report));
  write_compare_points_csv(out_dir / "points.csv", report);
  write_compare_raw_csv(out_dir / "raw_scores.csv", report);
  write_text_file(out_dir / "comparison.svg", comparison_svg(report));

  for (const auto& p : report.points) {
    out << p.feature_space << " n_train=" << p.n_train << ": " << format_double(p.mean_accuracy)
        << " [" << format_double(p.ci_low) << ", " << format_double(p.ci_high) << "] (n="
        << p.n_replicates << ")\n";
  }
  if (!report.failures.empty()) {
    err << report.failures.size() << " replicate fits failed; see report.json\n";
  }
  out << "wrote comparison outputs to " << out_dir.string() << "\n";
  return 0;
}

}  // namespace voiceprint
