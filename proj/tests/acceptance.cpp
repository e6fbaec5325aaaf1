// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: nine end-to-end checks of the pipeline, each printed as
// one PASS/FAIL line. The heavy checks run the full desk-scale protocol
// (500-partition benchmark, 11-point comparison sweep with 2000 replicates
// per point); --quick shrinks the sweep for CI runs without relaxing the
// thresholds it shares with the full run.
//
// Usage: acceptance [--quick] [--jobs N] [--keep] [--seed N]

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "voiceprint/commands.hpp"
#include "voiceprint/report.hpp"
#include "voiceprint/rng.hpp"

using namespace voiceprint;

namespace {

std::uint64_t kMasterSeed = 20260811;

struct CheckResult {
  std::string name;
  bool pass = false;
};

std::vector<CheckResult> g_results;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void record(const std::string& name, bool pass, const std::string& detail, double seconds) {
  g_results.push_back({name, pass});
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << "  " << name << "  (" << std::fixed << std::setprecision(1)
       << seconds << " s)  " << detail;
  std::cout << line.str() << "\n";
  std::cout.flush();
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

Waveform seeded_noise(int rate, int n, std::uint64_t seed) {
  Rng rng(seed);
  Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(static_cast<std::size_t>(n));
  for (auto& s : w.samples) s = static_cast<float>(0.6 * rng.uniform(-1.0, 1.0));
  return w;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// ---- 1: MFCC pipeline vs brute-force oracle --------------------------------

void check_mfcc_oracle() {
  Stopwatch timer;
  MfccConfig config;
  const oracle::BruteForceMfcc reference(config, 44100);
  double worst = 0.0;
  bool shapes_ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Waveform w = seeded_noise(44100, 44100, derive_seed(1000, std::to_string(seed)));
    const auto got = mfcc_sequence(w, config);
    const auto want = reference.run(w);
    if (got.size() != want.size()) {
      shapes_ok = false;
      break;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      for (std::size_t k = 0; k < got[i].size(); ++k) {
        const double rel = std::abs(got[i][k] - want[i][k]) / std::max(1.0, std::abs(want[i][k]));
        worst = std::max(worst, rel);
      }
    }
  }
  const double elapsed = timer.seconds();
  const bool pass = shapes_ok && worst <= 1e-6 && elapsed < 10.0;
  record("mfcc-oracle-equivalence", pass,
         "10 random 1 s signals; worst rel deviation " + fmt(worst / 1e-6, 4) +
             "e-6 (limit 1e-6); runtime limit 10 s",
         elapsed);
}

// ---- 2: embedder rate/shape contract ----------------------------------------

void check_embedder_contract() {
  Stopwatch timer;
  TcnConfig config;
  const ModelWeights weights = init_weights(config, 2026);
  bool pass = true;
  std::string detail = "counts floor(N/1024); 128 finite dims; unit norm within 1e-6";
  for (int n : {1024, 1025, 16000, 160000}) {
    const auto vectors = forward(weights, seeded_noise(16000, n, 50 + static_cast<unsigned>(n)));
    if (static_cast<int>(vectors.size()) != n / 1024) {
      pass = false;
      detail = "vector count mismatch at N=" + std::to_string(n);
      break;
    }
    for (const auto& v : vectors) {
      if (v.size() != 128) pass = false;
      double norm = 0.0;
      for (double x : v) {
        if (!std::isfinite(x)) pass = false;
        norm += x * x;
      }
      if (std::abs(std::sqrt(norm) - 1.0) > 1e-6) pass = false;
    }
    if (!pass) {
      detail = "shape or norm violation at N=" + std::to_string(n);
      break;
    }
  }
  record("embedder-rate-shape", pass, detail, timer.seconds());
}

// ---- 3: triplet backprop vs central finite differences ----------------------

void check_gradients() {
  Stopwatch timer;
  TcnConfig config;
  config.n_blocks = 1;
  config.channels = 8;
  config.dilations = {2};
  config.frame_hop_samples = 64;
  config.embed_dim = 16;
  ModelWeights weights = init_weights(config, 5);

  std::vector<Eigen::MatrixXd> frames;
  Rng rng(6);
  for (int s = 0; s < 4; ++s) {
    Eigen::MatrixXd f(config.frame_hop_samples, 4);
    for (int i = 0; i < f.size(); ++i) f.data()[i] = 0.5 * rng.uniform(-1.0, 1.0);
    frames.push_back(std::move(f));
  }
  std::vector<const Eigen::MatrixXd*> ptrs;
  for (const auto& f : frames) ptrs.push_back(&f);
  const std::vector<int> labels = {0, 0, 1, 1};

  std::vector<double> grads;
  triplet_batch_loss(weights, ptrs, labels, MiningStrategy::all, 0.5, &grads);
  auto loss_at = [&]() {
    return triplet_batch_loss(weights, ptrs, labels, MiningStrategy::all, 0.5, nullptr);
  };

  // Flat index = tensor offset + element, in declared order.
  const auto tensors = oracle::weight_tensors(weights);
  std::vector<std::size_t> offsets(tensors.size(), 0);
  for (std::size_t t = 1; t < tensors.size(); ++t) {
    offsets[t] = offsets[t - 1] + tensors[t - 1]->size();
  }
  std::vector<std::pair<std::size_t, std::size_t>> flat;
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    for (std::size_t e = 0; e < tensors[t]->size(); ++e) flat.push_back({t, e});
  }

  Rng pick(777);
  const double h = 1e-4;
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto [t, e] = flat[static_cast<std::size_t>(pick.below(flat.size()))];
    float& slot = (*tensors[t])[e];
    const float original = slot;
    slot = static_cast<float>(static_cast<double>(original) + h);
    const double up_w = static_cast<double>(slot);
    const double up = loss_at();
    slot = static_cast<float>(static_cast<double>(original) - h);
    const double down_w = static_cast<double>(slot);
    const double down = loss_at();
    slot = original;
    const double fd = (up - down) / (up_w - down_w);
    const double analytic = grads[offsets[t] + e];
    const double rel =
        std::abs(fd - analytic) / std::max({std::abs(analytic), std::abs(fd), 1e-8});
    worst = std::max(worst, rel);
  }
  const double elapsed = timer.seconds();
  const bool pass = worst < 1e-4 && elapsed < 30.0;
  record("gradient-check", pass,
         "25 sampled weights, 1-block/8-channel model; worst rel error " + fmt(worst / 1e-4, 4) +
             "e-4 (limit 1e-4); runtime limit 30 s",
         elapsed);
}

// ---- shared pipeline state ---------------------------------------------------

struct Pipeline {
  std::filesystem::path dir;
  int jobs = 1;
  RunConfig config;
  std::filesystem::path eval_manifest;
  FeatureTable learnt_eval;
  FeatureTable learnt_null;
  FeatureTable mfcc_eval;
  EvalReport benchmark;  // the 500-partition run on learnt features
  double compare_max_kkt = 0.0;
};

// Synthesizes the corpora, trains the embedder and extracts all feature
// tables the later checks consume.
void build_pipeline(Pipeline& p) {
  std::cout << "# preparing corpora, embedder and features (shared by later checks)\n";
  Stopwatch timer;

  p.config.master_seed = kMasterSeed;
  p.config.jobs = p.jobs;

  // Training corpus: 10 speakers x 3 call types x 6 snippets.
  SynthSpec train_spec = uniform_synth_spec(10, 6);
  synthesize_corpus(train_spec, derive_seed(kMasterSeed, "accept/train-corpus"),
                    p.dir / "train_corpus");

  // Held-out evaluation corpus: 3 fresh individuals, demo cell counts.
  synthesize_corpus(demo_synth_spec(), derive_seed(kMasterSeed, "accept/eval-corpus"),
                    p.dir / "eval_corpus");

  // Negative control: identity cues redrawn per call type, balanced cells
  // so class priors carry no information either.
  SynthSpec null_spec = uniform_synth_spec(3, 22);
  null_spec.null_identity = true;
  synthesize_corpus(null_spec, derive_seed(kMasterSeed, "accept/null-corpus"),
                    p.dir / "null_corpus");

  std::ostringstream sink;
  cmd_train_embedder(p.config, p.dir / "train_corpus" / "manifest.csv", p.dir / "weights.bin",
                     p.dir / "loss.csv", sink);

  p.eval_manifest = p.dir / "eval_corpus" / "manifest.csv";
  p.learnt_eval = extract_feature_table(p.config, p.eval_manifest, "learnt", p.dir / "weights.bin");
  p.learnt_null = extract_feature_table(p.config, p.dir / "null_corpus" / "manifest.csv", "learnt",
                                        p.dir / "weights.bin");
  p.mfcc_eval = extract_feature_table(p.config, p.eval_manifest, "mfcc", std::nullopt);
  if (p.learnt_eval.X.rows() != 195 || p.mfcc_eval.X.rows() != 195) {
    throw std::runtime_error("expected one pooled vector per snippet (195 rows)");
  }
  std::cout << "# pipeline ready in " << fmt(timer.seconds(), 1) << " s\n";
}

// ---- 4: the 500-partition classifier benchmark -------------------------------

void check_classifier_benchmark(Pipeline& p) {
  Stopwatch timer;
  EvalConfig config;
  config.n_replicates = 500;
  config.train_fraction = 0.75;
  config.stratified = true;
  config.settings = p.config.classifiers;
  config.master_seed = kMasterSeed;
  config.jobs = p.jobs;
  p.benchmark = classifier_comparison(p.learnt_eval, config);

  bool pass = p.benchmark.failures.empty();
  std::string detail = "mean accuracy:";
  double svm_mean = 0.0;
  for (const auto& s : p.benchmark.summaries) {
    if (s.metric != "accuracy") continue;
    detail += " " + s.classifier + "=" + fmt(s.mean);
    if (s.mean < 0.80) pass = false;
    if (s.classifier == "svm") svm_mean = s.mean;
  }
  if (svm_mean < 0.85) pass = false;

  // Metric-learning effect on held-out speakers: mean within-individual
  // pooled-embedding distance strictly below the between-individual mean.
  {
    double within = 0.0, between = 0.0;
    long long n_within = 0, n_between = 0;
    const Eigen::MatrixXd& x = p.learnt_eval.X;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
        const double d = (x.row(i) - x.row(j)).norm();
        if (p.learnt_eval.individual_ids[static_cast<std::size_t>(i)] ==
            p.learnt_eval.individual_ids[static_cast<std::size_t>(j)]) {
          within += d;
          ++n_within;
        } else {
          between += d;
          ++n_between;
        }
      }
    }
    within /= static_cast<double>(n_within);
    between /= static_cast<double>(n_between);
    detail += "; embed dist within=" + fmt(within) + " between=" + fmt(between);
    if (!(within < between)) pass = false;
  }

  const double elapsed = timer.seconds();
  if (elapsed >= 600.0) pass = false;
  record("classifier-benchmark", pass,
         detail + " (all >= 0.80, svm >= 0.85); 500 partitions; runtime limit 600 s", elapsed);
}

// ---- 5: cross-call-type voice-print property ---------------------------------

void check_cross_calltype(Pipeline& p) {
  Stopwatch timer;
  const CrossCallTypeReport shared = cross_calltype_eval(
      p.learnt_eval, all_classifiers(), p.config.classifiers, kMasterSeed);
  const CrossCallTypeReport null_control = cross_calltype_eval(
      p.learnt_null, all_classifiers(), p.config.classifiers, kMasterSeed);

  bool pass = true;
  std::string detail = "held-out call type accuracy, shared cues:";
  for (const auto& [name, acc] : shared.mean_accuracy) {
    detail += " " + name + "=" + fmt(acc);
    if (acc <= 0.60) pass = false;
  }
  detail += " | null control:";
  for (const auto& [name, acc] : null_control.mean_accuracy) {
    detail += " " + name + "=" + fmt(acc);
    if (acc > 0.50) pass = false;
  }
  record("cross-call-type-voiceprint", pass, detail + " (shared > 0.60, null <= 0.50)",
         timer.seconds());
}

// ---- 6: statistics correctness ------------------------------------------------

void check_statistics(Pipeline& p) {
  Stopwatch timer;
  bool pass = true;
  std::string failure;

  // 5-replicate fixture: mean and SEM must equal the textbook formulas
  // applied to the persisted raw scores.
  EvalConfig config;
  config.n_replicates = 5;
  config.settings = p.config.classifiers;
  config.master_seed = kMasterSeed;
  config.classifiers = {ClassifierKind::naive_bayes};
  const EvalReport five = classifier_comparison(p.learnt_eval, config);
  if (five.raw_scores.size() != 5) {
    pass = false;
    failure = "expected 5 raw scores";
  } else {
    double mean = 0.0;
    for (const auto& r : five.raw_scores) mean += r.accuracy;
    mean /= 5.0;
    double ss = 0.0;
    for (const auto& r : five.raw_scores) ss += (r.accuracy - mean) * (r.accuracy - mean);
    const double sem = std::sqrt(ss / 4.0) / std::sqrt(5.0);
    if (five.summaries.empty() || five.summaries[0].mean != mean ||
        five.summaries[0].sem != sem) {
      pass = false;
      failure = "mean/SEM disagree with the hand formula";
    }
  }

  // Confusion rows from the 500-partition run sum to 1 within 1e-9.
  for (const auto& per_classifier : p.benchmark.confusions) {
    for (const auto& confusion : per_classifier) {
      for (const auto& row : confusion.proportions) {
        double sum = 0.0;
        for (double v : row) sum += v;
        if (std::abs(sum - 1.0) > 1e-9) {
          pass = false;
          failure = "confusion row sum off by " + fmt(std::abs(sum - 1.0), 12);
        }
      }
    }
  }

  // Planted fixture: 875/103/22 of 1000 reproduces (0.875, 0.103, 0.022).
  std::vector<std::vector<std::vector<long long>>> counts(
      1, std::vector<std::vector<long long>>(1, std::vector<long long>{875, 103, 22}));
  const auto planted =
      confusion_by_calltype({"a"}, {"pant_hoot_climax"}, counts, nullptr);
  if (planted.size() != 1 || planted[0].proportions.size() != 1 ||
      planted[0].proportions[0] != std::vector<double>{0.875, 0.103, 0.022}) {
    pass = false;
    failure = "planted confusion row not reproduced";
  }

  record("statistics-correctness", pass,
         pass ? "5-replicate mean/SEM exact; confusion rows sum to 1; planted row reproduced"
              : failure,
         timer.seconds());
}

// ---- 7: the comparison sweep ---------------------------------------------------

void check_comparison_sweep(Pipeline& p, bool quick) {
  Stopwatch timer;
  CompareConfig config;
  if (quick) {
    config.train_grid = {5, 20, 60, 120, 175};
    config.per_bin = 50;  // 200 replicates per point
  }
  config.svm = p.config.classifiers.svm;
  config.master_seed = kMasterSeed;
  config.jobs = p.jobs;

  const CompareReport report = feature_space_comparison(p.mfcc_eval, p.learnt_eval, config);
  p.compare_max_kkt = report.max_kkt_residual;

  bool pass = report.failures.empty();
  std::string detail;

  // Every point carries its full replicate count.
  const int expected_reps = static_cast<int>(config.c_bins.size()) * config.per_bin;
  const std::size_t expected_points = 2 * config.train_grid.size();
  if (report.points.size() != expected_points) {
    pass = false;
    detail += "point count " + std::to_string(report.points.size()) + " != " +
              std::to_string(expected_points) + "; ";
  }
  for (const auto& point : report.points) {
    if (point.n_replicates != expected_reps) pass = false;
  }

  // Monotone learning curves: Spearman(mean accuracy, n_train) > 0.8 per space.
  for (const std::string space : {"mfcc", "learnt"}) {
    std::vector<double> xs, ys;
    for (const auto& point : report.points) {
      if (point.feature_space == space) {
        xs.push_back(static_cast<double>(point.n_train));
        ys.push_back(point.mean_accuracy);
      }
    }
    const double rho = spearman_rank_correlation(xs, ys);
    detail += space + " spearman=" + fmt(rho, 3) + " ";
    if (rho <= 0.8) pass = false;
  }

  // CI width shrinks like 1/sqrt(n): the mean width over the four disjoint
  // quarter-subsamples vs the full width. Each quarter takes per_bin/4
  // replicates of every C bin, so it keeps the full C mixture.
  {
    std::vector<double> all_scores;
    std::vector<std::vector<double>> quarters(4);
    const int pick_n_train = config.train_grid[config.train_grid.size() / 2];
    for (const auto& raw : report.raw) {
      if (raw.feature_space != "learnt" || raw.n_train != pick_n_train) continue;
      all_scores.push_back(raw.accuracy);
      const int within_bin = raw.replicate % config.per_bin;
      quarters[static_cast<std::size_t>(within_bin / (config.per_bin / 4)) % 4].push_back(
          raw.accuracy);
    }
    double quarter_width = 0.0;
    for (const auto& q : quarters) {
      const Ci ci = ci95(q);
      quarter_width += (ci.high - ci.low) / 4.0;
    }
    const Ci narrow = ci95(all_scores);
    const double ratio = quarter_width / (narrow.high - narrow.low);
    detail += "ci width ratio(n, 4n)=" + fmt(ratio, 3) + " ";
    if (std::abs(ratio - 2.0) > 0.2) pass = false;  // 1/sqrt(4) = 2, within 10%
  }

  // Determinism: re-running one grid point in isolation reproduces its curve
  // values exactly (replicate seeds depend only on the point's own path).
  {
    CompareConfig slice = config;
    slice.train_grid = {config.train_grid.front()};
    const CompareReport rerun = feature_space_comparison(p.mfcc_eval, p.learnt_eval, slice);
    for (const auto& point : rerun.points) {
      for (const auto& full : report.points) {
        if (full.feature_space == point.feature_space && full.n_train == point.n_train) {
          if (full.mean_accuracy != point.mean_accuracy || full.ci_low != point.ci_low ||
              full.ci_high != point.ci_high) {
            pass = false;
            detail += "slice rerun diverged; ";
          }
        }
      }
    }
  }

  const double elapsed = timer.seconds();
  const double limit = quick ? 120.0 : 1200.0;
  if (elapsed >= limit) pass = false;
  record("comparison-sweep", pass,
         detail + "(spearman > 0.8; ci ratio within 10% of 2; runtime limit " +
             fmt(limit, 0) + " s)",
         elapsed);

  // Keep the artifacts for inspection.
  write_compare_points_csv(p.dir / "comparison_points.csv", report);
  write_text_file(p.dir / "comparison.svg", comparison_svg(report));
}

// ---- 8: SVM solver correctness --------------------------------------------------

void check_svm_solver(Pipeline& p) {
  Stopwatch timer;
  bool pass = true;
  std::string detail;

  double worst_gap = 0.0;
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL, 15ULL}) {
    Rng rng(seed);
    LabeledDataset data;
    data.n_classes = 2;
    data.X = Eigen::MatrixXd(6, 3);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 3; ++j) data.X(i, j) = rng.uniform(-1.0, 1.0);
      data.y.push_back(i < 3 ? 0 : 1);
    }
    SvmConfig config;
    config.C = 4.0;
    config.gamma = 0.9;
    config.tolerance = 1e-8;
    const SvmModel model = fit_svm(data, config);

    Eigen::MatrixXd gram(6, 6);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        gram(i, j) = rbf_kernel(data.X.row(i).transpose(), data.X.row(j).transpose(),
                                config.gamma);
      }
    }
    std::vector<double> y_signed;
    for (int label : data.y) y_signed.push_back(label == 0 ? 1.0 : -1.0);
    const double reference = oracle::svm_dual_optimum(gram, y_signed, config.C);
    const double gap = reference - model.machines[0].dual_objective;
    worst_gap = std::max(worst_gap, std::abs(gap));
    if (std::abs(gap) > 1e-6) pass = false;
  }
  detail += "worst dual gap " + fmt(worst_gap / 1e-6, 4) + "e-6 (limit 1e-6); ";

  // KKT residuals recorded across every harness fit (benchmark + sweep).
  const double tol = p.config.classifiers.svm.tolerance;
  const double harness_kkt = std::max(p.benchmark.max_kkt_residual, p.compare_max_kkt);
  detail += "max harness KKT residual " + fmt(harness_kkt, 6) + " (tolerance " + fmt(tol, 4) + ")";
  if (harness_kkt > tol + 1e-12) pass = false;

  record("svm-solver-correctness", pass, detail, timer.seconds());
}

// ---- 9: end-to-end determinism ---------------------------------------------------

void check_end_to_end_determinism(Pipeline& p) {
  Stopwatch timer;
  bool pass = true;
  std::string failure;

  RunConfig config;
  config.master_seed = 3141;
  config.synth = uniform_synth_spec(3, 3);
  for (auto& ct : config.synth.call_types) {
    ct.duration_min_s = 0.35;
    ct.duration_max_s = 0.55;
  }
  config.eval_replicates = 6;
  config.eval_cross_call_type = true;
  config.compare.train_grid = {5, 9};
  config.compare.per_bin = 2;

  std::ostringstream sink;
  auto run = [&](const std::filesystem::path& root, int jobs) {
    RunConfig local = config;
    local.jobs = jobs;
    cmd_synth(local, root / "corpus", sink);
    cmd_extract(local, root / "corpus" / "manifest.csv", "mfcc", std::nullopt,
                root / "features.csv", sink);
    cmd_evaluate(local, root / "features.csv", root / "eval", "mfcc", sink, sink);
    cmd_compare(local, root / "features.csv", root / "features.csv", root / "cmp", sink, sink);
  };
  run(p.dir / "det_a", 1);
  run(p.dir / "det_b", 2);  // different worker-pool size

  const std::vector<std::string> files = {
      "features.csv",         "eval/report.json",     "eval/raw_scores.csv",
      "eval/confusion_svm.csv", "eval/confusion_svm.svg", "cmp/report.json",
      "cmp/points.csv",       "cmp/raw_scores.csv",   "cmp/comparison.svg"};
  for (const auto& name : files) {
    if (slurp(p.dir / "det_a" / name) != slurp(p.dir / "det_b" / name)) {
      pass = false;
      failure += name + " ";
    }
  }
  // And the audio itself.
  const Manifest manifest = load_manifest(p.dir / "det_a" / "corpus" / "manifest.csv");
  for (const auto& rec : manifest.records) {
    if (slurp(p.dir / "det_a" / "corpus" / rec.audio_path) !=
        slurp(p.dir / "det_b" / "corpus" / rec.audio_path)) {
      pass = false;
      failure += rec.audio_path + " ";
      break;
    }
  }
  record("end-to-end-determinism", pass,
         pass ? "synth/extract/evaluate/compare byte-identical at pool sizes 1 and 2"
              : "differs: " + failure,
         timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  bool keep = false;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) {
      jobs = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      kMasterSeed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--keep") == 0) {
      keep = true;
    } else {
      std::cerr << "usage: acceptance [--quick] [--jobs N] [--keep] [--seed N]\n";
      return 2;
    }
  }

  Pipeline pipeline;
  pipeline.jobs = jobs;
  pipeline.dir = std::filesystem::temp_directory_path() /
                 ("voiceprint_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(pipeline.dir);
  std::cout << "# workdir " << pipeline.dir.string() << " (jobs=" << jobs
            << (quick ? ", quick sweep" : ", full sweep") << ")\n";

  Stopwatch total;
  int failures = 0;
  try {
    check_mfcc_oracle();
    check_embedder_contract();
    check_gradients();
    build_pipeline(pipeline);
    check_classifier_benchmark(pipeline);
    check_cross_calltype(pipeline);
    check_statistics(pipeline);
    check_comparison_sweep(pipeline, quick);
    check_svm_solver(pipeline);
    check_end_to_end_determinism(pipeline);
  } catch (const std::exception& e) {
    std::cout << "FAIL  (exception)  " << e.what() << "\n";
    ++failures;
  }

  for (const auto& result : g_results) failures += result.pass ? 0 : 1;
  std::cout << "# " << (g_results.size() - static_cast<std::size_t>(failures)) << "/"
            << g_results.size() << " checks passed in " << fmt(total.seconds(), 1) << " s\n";

  if (!keep) {
    std::error_code ec;
    std::filesystem::remove_all(pipeline.dir, ec);
  } else {
    std::cout << "# artifacts kept in " << pipeline.dir.string() << "\n";
  }
  return failures == 0 ? 0 : 1;
}
