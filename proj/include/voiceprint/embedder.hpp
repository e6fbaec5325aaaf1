// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "voiceprint/audio.hpp"

namespace voiceprint {

// Residual temporal-convolutional identity embedder. The waveform is cut
// into non-overlapping frame_hop_samples windows; an input convolution
// projects each window to `channels` features, a stack of dilated causal
// residual blocks mixes them over time, and a pointwise convolution head
// emits one embed_dim identity vector per window (64 ms at 16 kHz).
struct TcnConfig {
  int n_blocks = 4;
  int channels = 64;
  int kernel_size = 3;
  std::vector<int> dilations = {1, 2, 4, 8};
  int frame_hop_samples = 1024;
  int embed_dim = 128;
  bool l2_normalize_output = true;
  int input_sample_rate_hz = 16000;

  void validate() const;
};

struct ModelWeights {
  TcnConfig config;
  std::vector<float> frontend_w;  // [channels][frame_hop_samples]
  std::vector<float> frontend_b;  // [channels]
  struct BlockWeights {
    std::vector<float> w1, b1;  // w: [kernel][out][in]
    std::vector<float> w2, b2;
  };
  std::vector<BlockWeights> blocks;
  std::vector<float> head_w;  // [embed_dim][channels]
  std::vector<float> head_b;  // [embed_dim]
};

using IdentityVector = std::vector<double>;

std::size_t weight_count(const TcnConfig& config);

// Fan-in-scaled uniform initialization, deterministic in the seed.
ModelWeights init_weights(const TcnConfig& config, std::uint64_t seed);

// Cuts a 16 kHz waveform into the embedder's input frames
// (frame_hop_samples x floor(N / frame_hop_samples)).
// Throws on a wrong sample rate or an input shorter than one frame.
Eigen::MatrixXd embedder_frames(const Waveform& w, const TcnConfig& config);

// One identity vector per full frame_hop_samples window; unit norm when
// l2_normalize_output is set. Evaluated frame by frame, so the output for a
// prefix of a signal is bit-identical to the prefix of the output.
std::vector<IdentityVector> forward(const ModelWeights& weights, const Waveform& w);

// Coordinatewise mean over the sequence, re-normalized when renormalize is
// set. Throws on an empty sequence.
IdentityVector mean_pool_embedding(const std::vector<IdentityVector>& seq, bool renormalize);

// max(0, d(a,p) - d(a,n) + margin), d = Euclidean distance.
double triplet_loss(const IdentityVector& anchor, const IdentityVector& positive,
                    const IdentityVector& negative, double margin);

enum class MiningStrategy { all, semi_hard };

struct Triplet {
  int anchor, positive, negative;
};

// `all`: every unordered same-label pair crossed with every other-label
// negative. `semi_hard`: per pair, the closest negative inside the margin
// band (d(a,p) < d(a,n) < d(a,p) + margin), falling back to the hardest
// negative when the band is empty. Throws when no valid triplet exists.
std::vector<Triplet> mine_triplets(const std::vector<IdentityVector>& embeddings,
                                   const std::vector<int>& labels, MiningStrategy strategy,
                                   double margin);

struct TrainConfig {
  double margin = 0.5;
  int speakers_per_batch = 8;   // P
  int snippets_per_speaker = 4; // K
  int steps = 2500;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  MiningStrategy mining = MiningStrategy::semi_hard;
  std::uint64_t seed = 0;
};

struct TrainSnippet {
  int speaker = 0;
  Eigen::MatrixXd frames;  // from embedder_frames
};

struct TrainResult {
  ModelWeights weights;
  std::vector<double> loss_trace;     // one mean triplet loss per step
  std::vector<int> triplet_counts;    // mined triplets per step
};

// Batched triplet loss over pooled snippet embeddings; fills flat gradients
// (in declared tensor order) when grads_out is non-null. This is the exact
// objective train() descends, which makes it the target for the
// finite-difference check.
double triplet_batch_loss(const ModelWeights& weights,
                          const std::vector<const Eigen::MatrixXd*>& snippet_frames,
                          const std::vector<int>& labels, MiningStrategy strategy, double margin,
                          std::vector<double>* grads_out, int* n_triplets_out = nullptr);

// Adam on the triplet objective with P x K batches; deterministic in
// (weights, config, corpus). Throws when fewer than P speakers have K
// snippets.
TrainResult train(const ModelWeights& initial, const TrainConfig& config,
                  const std::vector<TrainSnippet>& corpus);

// Versioned binary container: magic, config block, little-endian f32
// tensors in declared order. Round-trips bit-exactly.
void save_weights(const std::filesystem::path& path, const ModelWeights& weights);
ModelWeights load_weights(const std::filesystem::path& path);

}  // namespace voiceprint
