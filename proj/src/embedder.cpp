// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "voiceprint/rng.hpp"

namespace voiceprint {

namespace {

// Double-precision view of the weights used by all math paths. Weights are
// stored as f32 (the serialized form); computation promotes to double.
struct Params {
  Eigen::MatrixXd frontend_w;  // C x hop
  Eigen::VectorXd frontend_b;
  struct Block {
    std::vector<Eigen::MatrixXd> w1;  // kernel taps, each C x C
    Eigen::VectorXd b1;
    std::vector<Eigen::MatrixXd> w2;
    Eigen::VectorXd b2;
  };
  std::vector<Block> blocks;
  Eigen::MatrixXd head_w;  // E x C
  Eigen::VectorXd head_b;
};

Eigen::MatrixXd unpack_matrix(const float* data, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = static_cast<double>(data[static_cast<std::size_t>(r) * cols + c]);
    }
  }
  return m;
}

Params pack_params(const ModelWeights& w) {
  const TcnConfig& cfg = w.config;
  Params p;
  p.frontend_w = unpack_matrix(w.frontend_w.data(), cfg.channels, cfg.frame_hop_samples);
  p.frontend_b = unpack_matrix(w.frontend_b.data(), cfg.channels, 1);
  p.blocks.resize(static_cast<std::size_t>(cfg.n_blocks));
  const int C = cfg.channels;
  const std::size_t tap_size = static_cast<std::size_t>(C) * C;
  for (int b = 0; b < cfg.n_blocks; ++b) {
    const auto& bw = w.blocks[static_cast<std::size_t>(b)];
    auto& pb = p.blocks[static_cast<std::size_t>(b)];
    for (int j = 0; j < cfg.kernel_size; ++j) {
      pb.w1.push_back(unpack_matrix(bw.w1.data() + static_cast<std::size_t>(j) * tap_size, C, C));
      pb.w2.push_back(unpack_matrix(bw.w2.data() + static_cast<std::size_t>(j) * tap_size, C, C));
    }
    pb.b1 = unpack_matrix(bw.b1.data(), C, 1);
    pb.b2 = unpack_matrix(bw.b2.data(), C, 1);
  }
  p.head_w = unpack_matrix(w.head_w.data(), cfg.embed_dim, cfg.channels);
  p.head_b = unpack_matrix(w.head_b.data(), cfg.embed_dim, 1);
  return p;
}

// Gradients in the same shapes as Params.
struct Grads {
  Eigen::MatrixXd frontend_w;
  Eigen::VectorXd frontend_b;
  struct Block {
    std::vector<Eigen::MatrixXd> w1;
    Eigen::VectorXd b1;
    std::vector<Eigen::MatrixXd> w2;
    Eigen::VectorXd b2;
  };
  std::vector<Block> blocks;
  Eigen::MatrixXd head_w;
  Eigen::VectorXd head_b;

  explicit Grads(const TcnConfig& cfg) {
    frontend_w = Eigen::MatrixXd::Zero(cfg.channels, cfg.frame_hop_samples);
    frontend_b = Eigen::VectorXd::Zero(cfg.channels);
    blocks.resize(static_cast<std::size_t>(cfg.n_blocks));
    for (auto& b : blocks) {
      for (int j = 0; j < cfg.kernel_size; ++j) {
        b.w1.push_back(Eigen::MatrixXd::Zero(cfg.channels, cfg.channels));
        b.w2.push_back(Eigen::MatrixXd::Zero(cfg.channels, cfg.channels));
      }
      b.b1 = Eigen::VectorXd::Zero(cfg.channels);
      b.b2 = Eigen::VectorXd::Zero(cfg.channels);
    }
    head_w = Eigen::MatrixXd::Zero(cfg.embed_dim, cfg.channels);
    head_b = Eigen::VectorXd::Zero(cfg.embed_dim);
  }
};

void append_matrix(std::vector<double>& out, const Eigen::MatrixXd& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
}

// Flat order matches the serialized tensor order.
std::vector<double> flatten_grads(const Grads& g) {
  std::vector<double> flat;
  append_matrix(flat, g.frontend_w);
  append_matrix(flat, g.frontend_b);
  for (const auto& b : g.blocks) {
    for (const auto& w : b.w1) append_matrix(flat, w);
    append_matrix(flat, b.b1);
    for (const auto& w : b.w2) append_matrix(flat, w);
    append_matrix(flat, b.b2);
  }
  append_matrix(flat, g.head_w);
  append_matrix(flat, g.head_b);
  return flat;
}

// Dilated causal convolution with left zero padding, whole-matrix form
// (used by the training path).
Eigen::MatrixXd causal_conv(const std::vector<Eigen::MatrixXd>& taps, const Eigen::VectorXd& bias,
                            const Eigen::MatrixXd& input, int dilation) {
  const int T = static_cast<int>(input.cols());
  const int k = static_cast<int>(taps.size());
  Eigen::MatrixXd out = bias.replicate(1, T);
  for (int j = 0; j < k; ++j) {
    const int offset = (k - 1 - j) * dilation;
    if (offset >= T) continue;
    out.rightCols(T - offset).noalias() +=
        taps[static_cast<std::size_t>(j)] * input.leftCols(T - offset);
  }
  return out;
}

struct SnippetCache {
  const Eigen::MatrixXd* frames = nullptr;
  Eigen::MatrixXd z0;  // frontend pre-activation
  Eigen::MatrixXd h0;
  struct BlockCache {
    Eigen::MatrixXd input;  // H entering the block
    Eigen::MatrixXd p1, a1, p2, s, out;
  };
  std::vector<BlockCache> blocks;
  Eigen::MatrixXd e_raw;         // head output, E x T
  Eigen::MatrixXd e_norm;        // per-column normalized (when configured)
  Eigen::VectorXd col_norms;     // per-column norms (guarded)
  Eigen::VectorXd mean_vec;      // mean over columns (of e_norm or e_raw)
  double mean_norm = 0.0;
  Eigen::VectorXd pooled;
};

constexpr double kNormFloor = 1e-12;

void forward_training(const Params& p, const TcnConfig& cfg, const Eigen::MatrixXd& frames,
                      SnippetCache& cache) {
  cache.frames = &frames;
  const int T = static_cast<int>(frames.cols());
  cache.z0 = p.frontend_w * frames + p.frontend_b.replicate(1, T);
  cache.h0 = cache.z0.cwiseMax(0.0);
  cache.blocks.resize(static_cast<std::size_t>(cfg.n_blocks));
  const Eigen::MatrixXd* h = &cache.h0;
  for (int b = 0; b < cfg.n_blocks; ++b) {
    auto& bc = cache.blocks[static_cast<std::size_t>(b)];
    const auto& pb = p.blocks[static_cast<std::size_t>(b)];
    const int d = cfg.dilations[static_cast<std::size_t>(b)];
    bc.input = *h;
    bc.p1 = causal_conv(pb.w1, pb.b1, bc.input, d);
    bc.a1 = bc.p1.cwiseMax(0.0);
    bc.p2 = causal_conv(pb.w2, pb.b2, bc.a1, d);
    bc.s = bc.p2 + bc.input;
    bc.out = bc.s.cwiseMax(0.0);
    h = &bc.out;
  }
  cache.e_raw = p.head_w * (*h) + p.head_b.replicate(1, T);

  if (cfg.l2_normalize_output) {
    cache.col_norms.resize(T);
    cache.e_norm.resizeLike(cache.e_raw);
    for (int t = 0; t < T; ++t) {
      const double n = std::max(cache.e_raw.col(t).norm(), kNormFloor);
      cache.col_norms(t) = n;
      cache.e_norm.col(t) = cache.e_raw.col(t) / n;
    }
    cache.mean_vec = cache.e_norm.rowwise().mean();
    cache.mean_norm = std::max(cache.mean_vec.norm(), kNormFloor);
    cache.pooled = cache.mean_vec / cache.mean_norm;
  } else {
    cache.mean_vec = cache.e_raw.rowwise().mean();
    cache.pooled = cache.mean_vec;
  }
}

void backward_training(const Params& p, const TcnConfig& cfg, const SnippetCache& cache,
                       const Eigen::VectorXd& d_pooled, Grads& grads) {
  const int T = static_cast<int>(cache.e_raw.cols());

  Eigen::MatrixXd d_e(cfg.embed_dim, T);
  if (cfg.l2_normalize_output) {
    // Through the final renormalization: y = m / |m|.
    const Eigen::VectorXd& y = cache.pooled;
    const Eigen::VectorXd d_mean = (d_pooled - y * y.dot(d_pooled)) / cache.mean_norm;
    // Through the mean, then each column's normalization.
    for (int t = 0; t < T; ++t) {
      const Eigen::VectorXd yt = cache.e_norm.col(t);
      const Eigen::VectorXd d_col = d_mean / static_cast<double>(T);
      d_e.col(t) = (d_col - yt * yt.dot(d_col)) / cache.col_norms(t);
    }
  } else {
    for (int t = 0; t < T; ++t) d_e.col(t) = d_pooled / static_cast<double>(T);
  }

  const Eigen::MatrixXd& last_h =
      cfg.n_blocks > 0 ? cache.blocks.back().out : cache.h0;
  grads.head_w.noalias() += d_e * last_h.transpose();
  grads.head_b.noalias() += d_e.rowwise().sum();
  Eigen::MatrixXd d_h = p.head_w.transpose() * d_e;

  for (int b = cfg.n_blocks - 1; b >= 0; --b) {
    const auto& bc = cache.blocks[static_cast<std::size_t>(b)];
    const auto& pb = p.blocks[static_cast<std::size_t>(b)];
    auto& gb = grads.blocks[static_cast<std::size_t>(b)];
    const int d = cfg.dilations[static_cast<std::size_t>(b)];
    const int k = cfg.kernel_size;

    const Eigen::MatrixXd d_s =
        d_h.cwiseProduct((bc.s.array() > 0.0).cast<double>().matrix());
    Eigen::MatrixXd d_input = d_s;  // residual path

    // Second conv.
    Eigen::MatrixXd d_a1 = Eigen::MatrixXd::Zero(cfg.channels, T);
    gb.b2.noalias() += d_s.rowwise().sum();
    for (int j = 0; j < k; ++j) {
      const int offset = (k - 1 - j) * d;
      if (offset >= T) continue;
      gb.w2[static_cast<std::size_t>(j)].noalias() +=
          d_s.rightCols(T - offset) * bc.a1.leftCols(T - offset).transpose();
      d_a1.leftCols(T - offset).noalias() +=
          pb.w2[static_cast<std::size_t>(j)].transpose() * d_s.rightCols(T - offset);
    }

    const Eigen::MatrixXd d_p1 =
        d_a1.cwiseProduct((bc.p1.array() > 0.0).cast<double>().matrix());

    // First conv.
    gb.b1.noalias() += d_p1.rowwise().sum();
    for (int j = 0; j < k; ++j) {
      const int offset = (k - 1 - j) * d;
      if (offset >= T) continue;
      gb.w1[static_cast<std::size_t>(j)].noalias() +=
          d_p1.rightCols(T - offset) * bc.input.leftCols(T - offset).transpose();
      d_input.leftCols(T - offset).noalias() +=
          pb.w1[static_cast<std::size_t>(j)].transpose() * d_p1.rightCols(T - offset);
    }
    d_h = std::move(d_input);
  }

  const Eigen::MatrixXd d_z0 =
      d_h.cwiseProduct((cache.z0.array() > 0.0).cast<double>().matrix());
  grads.frontend_w.noalias() += d_z0 * cache.frames->transpose();
  grads.frontend_b.noalias() += d_z0.rowwise().sum();
}

double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt(std::max((a - b).squaredNorm(), 1e-24));
}

}  // namespace

void TcnConfig::validate() const {
  if (n_blocks < 1 || channels < 1 || kernel_size < 1 || embed_dim < 1) {
    throw std::runtime_error("embedder config: sizes must be positive");
  }
  if (dilations.size() != static_cast<std::size_t>(n_blocks)) {
    throw std::runtime_error("embedder config: dilations length != n_blocks");
  }
  for (int d : dilations) {
    if (d < 1) throw std::runtime_error("embedder config: dilation must be >= 1");
  }
  if (frame_hop_samples < 1 || input_sample_rate_hz < 1) {
    throw std::runtime_error("embedder config: frame hop and sample rate must be positive");
  }
}

std::size_t weight_count(const TcnConfig& config) {
  const std::size_t C = static_cast<std::size_t>(config.channels);
  std::size_t n = C * static_cast<std::size_t>(config.frame_hop_samples) + C;
  n += static_cast<std::size_t>(config.n_blocks) *
       (2 * (static_cast<std::size_t>(config.kernel_size) * C * C + C));
  n += static_cast<std::size_t>(config.embed_dim) * C + static_cast<std::size_t>(config.embed_dim);
  return n;
}

ModelWeights init_weights(const TcnConfig& config, std::uint64_t seed) {
  config.validate();
  ModelWeights w;
  w.config = config;
  int tensor_index = 0;
  auto fill = [&](std::vector<float>& dst, std::size_t count, double fan_in) {
    Rng rng(derive_seed(seed, "init/" + std::to_string(tensor_index++)));
    const double bound = std::sqrt(1.0 / fan_in);
    dst.resize(count);
    for (auto& v : dst) v = static_cast<float>(rng.uniform(-bound, bound));
  };
  const std::size_t C = static_cast<std::size_t>(config.channels);
  const std::size_t hop = static_cast<std::size_t>(config.frame_hop_samples);
  const std::size_t k = static_cast<std::size_t>(config.kernel_size);

  fill(w.frontend_w, C * hop, static_cast<double>(hop));
  w.frontend_b.assign(C, 0.0f);
  ++tensor_index;
  w.blocks.resize(static_cast<std::size_t>(config.n_blocks));
  for (auto& b : w.blocks) {
    fill(b.w1, k * C * C, static_cast<double>(k * C));
    b.b1.assign(C, 0.0f);
    ++tensor_index;
    fill(b.w2, k * C * C, static_cast<double>(k * C));
    b.b2.assign(C, 0.0f);
    ++tensor_index;
  }
  fill(w.head_w, static_cast<std::size_t>(config.embed_dim) * C, static_cast<double>(C));
  w.head_b.assign(static_cast<std::size_t>(config.embed_dim), 0.0f);
  return w;
}

Eigen::MatrixXd embedder_frames(const Waveform& w, const TcnConfig& config) {
  if (w.sample_rate_hz != config.input_sample_rate_hz) {
    throw std::runtime_error("embedder: expected " +
                             std::to_string(config.input_sample_rate_hz) + " Hz input, got " +
                             std::to_string(w.sample_rate_hz));
  }
  const int hop = config.frame_hop_samples;
  const int T = static_cast<int>(w.samples.size()) / hop;
  if (T < 1) {
    throw std::runtime_error("embedder: input too short (need at least " + std::to_string(hop) +
                             " samples)");
  }
  Eigen::MatrixXd frames(hop, T);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < hop; ++i) {
      frames(i, t) = static_cast<double>(w.samples[static_cast<std::size_t>(t) * hop + i]);
    }
  }
  return frames;
}

std::vector<IdentityVector> forward(const ModelWeights& weights, const Waveform& w) {
  const TcnConfig& cfg = weights.config;
  cfg.validate();
  const Eigen::MatrixXd frames = embedder_frames(w, cfg);
  const Params p = pack_params(weights);
  const int T = static_cast<int>(frames.cols());
  const int k = cfg.kernel_size;

  // Column-by-column evaluation: each output frame is computed from its own
  // history only, so extending the signal never changes earlier vectors.
  std::vector<Eigen::MatrixXd> h(static_cast<std::size_t>(cfg.n_blocks) + 1);
  h[0].resize(cfg.channels, T);
  std::vector<Eigen::MatrixXd> a1(static_cast<std::size_t>(cfg.n_blocks));
  for (auto& m : a1) m.resize(cfg.channels, T);
  for (std::size_t b = 1; b < h.size(); ++b) h[b].resize(cfg.channels, T);

  std::vector<IdentityVector> out;
  out.reserve(static_cast<std::size_t>(T));
  Eigen::VectorXd col(cfg.channels), tmp(cfg.channels);
  for (int t = 0; t < T; ++t) {
    col = p.frontend_w * frames.col(t) + p.frontend_b;
    h[0].col(t) = col.cwiseMax(0.0);
    for (int b = 0; b < cfg.n_blocks; ++b) {
      const auto& pb = p.blocks[static_cast<std::size_t>(b)];
      const int d = cfg.dilations[static_cast<std::size_t>(b)];
      tmp = pb.b1;
      for (int j = 0; j < k; ++j) {
        const int s = t - (k - 1 - j) * d;
        if (s >= 0) tmp.noalias() += pb.w1[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(b)].col(s);
      }
      a1[static_cast<std::size_t>(b)].col(t) = tmp.cwiseMax(0.0);
      tmp = pb.b2;
      for (int j = 0; j < k; ++j) {
        const int s = t - (k - 1 - j) * d;
        if (s >= 0) tmp.noalias() += pb.w2[static_cast<std::size_t>(j)] * a1[static_cast<std::size_t>(b)].col(s);
      }
      tmp += h[static_cast<std::size_t>(b)].col(t);
      h[static_cast<std::size_t>(b) + 1].col(t) = tmp.cwiseMax(0.0);
    }
    Eigen::VectorXd e = p.head_w * h[static_cast<std::size_t>(cfg.n_blocks)].col(t) + p.head_b;
    if (cfg.l2_normalize_output) {
      e /= std::max(e.norm(), kNormFloor);
    }
    out.emplace_back(e.data(), e.data() + cfg.embed_dim);
  }
  return out;
}

IdentityVector mean_pool_embedding(const std::vector<IdentityVector>& seq, bool renormalize) {
  if (seq.empty()) throw std::runtime_error("mean_pool_embedding: empty sequence");
  IdentityVector mean(seq.front().size(), 0.0);
  for (const auto& v : seq) {
    if (v.size() != mean.size()) throw std::runtime_error("mean_pool_embedding: ragged sequence");
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
  }
  for (double& x : mean) x /= static_cast<double>(seq.size());
  if (renormalize) {
    double norm = 0.0;
    for (double x : mean) norm += x * x;
    norm = std::max(std::sqrt(norm), kNormFloor);
    for (double& x : mean) x /= norm;
  }
  return mean;
}

double triplet_loss(const IdentityVector& anchor, const IdentityVector& positive,
                    const IdentityVector& negative, double margin) {
  if (anchor.size() != positive.size() || anchor.size() != negative.size()) {
    throw std::runtime_error("triplet_loss: dimension mismatch");
  }
  double d_ap = 0.0, d_an = 0.0;
  for (std::size_t i = 0; i < anchor.size(); ++i) {
    d_ap += (anchor[i] - positive[i]) * (anchor[i] - positive[i]);
    d_an += (anchor[i] - negative[i]) * (anchor[i] - negative[i]);
  }
  return std::max(0.0, std::sqrt(d_ap) - std::sqrt(d_an) + margin);
}

std::vector<Triplet> mine_triplets(const std::vector<IdentityVector>& embeddings,
                                   const std::vector<int>& labels, MiningStrategy strategy,
                                   double margin) {
  const int n = static_cast<int>(embeddings.size());
  if (static_cast<int>(labels.size()) != n) {
    throw std::runtime_error("mine_triplets: labels size mismatch");
  }
  auto dist = [&](int i, int j) {
    double d2 = 0.0;
    const auto& a = embeddings[static_cast<std::size_t>(i)];
    const auto& b = embeddings[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(d2);
  };

  std::vector<Triplet> triplets;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) continue;
      if (strategy == MiningStrategy::all) {
        for (int m = 0; m < n; ++m) {
          if (labels[static_cast<std::size_t>(m)] == labels[static_cast<std::size_t>(i)]) continue;
          triplets.push_back({i, j, m});
        }
      } else {
        const double d_ap = dist(i, j);
        int best_band = -1, best_any = -1;
        double best_band_d = 0.0, best_any_d = 0.0;
        for (int m = 0; m < n; ++m) {
          if (labels[static_cast<std::size_t>(m)] == labels[static_cast<std::size_t>(i)]) continue;
          const double d_an = dist(i, m);
          if (best_any < 0 || d_an < best_any_d) {
            best_any = m;
            best_any_d = d_an;
          }
          if (d_an > d_ap && d_an < d_ap + margin && (best_band < 0 || d_an < best_band_d)) {
            best_band = m;
            best_band_d = d_an;
          }
        }
        const int chosen = best_band >= 0 ? best_band : best_any;
        if (chosen >= 0) triplets.push_back({i, j, chosen});
      }
    }
  }
  if (triplets.empty()) {
    throw std::runtime_error("mine_triplets: no valid triplet (need two speakers and a repeated speaker)");
  }
  return triplets;
}

double triplet_batch_loss(const ModelWeights& weights,
                          const std::vector<const Eigen::MatrixXd*>& snippet_frames,
                          const std::vector<int>& labels, MiningStrategy strategy, double margin,
                          std::vector<double>* grads_out, int* n_triplets_out) {
  const TcnConfig& cfg = weights.config;
  cfg.validate();
  if (snippet_frames.size() != labels.size() || snippet_frames.empty()) {
    throw std::runtime_error("triplet_batch_loss: bad batch");
  }
  const Params p = pack_params(weights);
  const int n = static_cast<int>(snippet_frames.size());

  std::vector<SnippetCache> caches(static_cast<std::size_t>(n));
  std::vector<IdentityVector> pooled(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    forward_training(p, cfg, *snippet_frames[static_cast<std::size_t>(i)],
                     caches[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd& v = caches[static_cast<std::size_t>(i)].pooled;
    pooled[static_cast<std::size_t>(i)].assign(v.data(), v.data() + v.size());
  }

  const std::vector<Triplet> triplets = mine_triplets(pooled, labels, strategy, margin);
  if (n_triplets_out != nullptr) *n_triplets_out = static_cast<int>(triplets.size());

  double loss = 0.0;
  std::vector<Eigen::VectorXd> d_pooled(
      static_cast<std::size_t>(n), Eigen::VectorXd::Zero(cfg.embed_dim));
  const double inv_count = 1.0 / static_cast<double>(triplets.size());
  for (const Triplet& t : triplets) {
    const Eigen::VectorXd& a = caches[static_cast<std::size_t>(t.anchor)].pooled;
    const Eigen::VectorXd& q = caches[static_cast<std::size_t>(t.positive)].pooled;
    const Eigen::VectorXd& m = caches[static_cast<std::size_t>(t.negative)].pooled;
    const double d_ap = distance(a, q);
    const double d_an = distance(a, m);
    const double hinge = d_ap - d_an + margin;
    if (hinge <= 0.0) continue;
    loss += hinge;
    if (grads_out != nullptr) {
      const Eigen::VectorXd g_ap = (a - q) / d_ap;
      const Eigen::VectorXd g_an = (a - m) / d_an;
      d_pooled[static_cast<std::size_t>(t.anchor)] += inv_count * (g_ap - g_an);
      d_pooled[static_cast<std::size_t>(t.positive)] -= inv_count * g_ap;
      d_pooled[static_cast<std::size_t>(t.negative)] += inv_count * g_an;
    }
  }
  loss *= inv_count;

  if (grads_out != nullptr) {
    Grads grads(cfg);
    for (int i = 0; i < n; ++i) {
      if (d_pooled[static_cast<std::size_t>(i)].isZero(0.0)) continue;
      backward_training(p, cfg, caches[static_cast<std::size_t>(i)],
                        d_pooled[static_cast<std::size_t>(i)], grads);
    }
    *grads_out = flatten_grads(grads);
  }
  return loss;
}

TrainResult train(const ModelWeights& initial, const TrainConfig& config,
                  const std::vector<TrainSnippet>& corpus) {
  const TcnConfig& cfg = initial.config;
  cfg.validate();
  if (config.speakers_per_batch < 2 || config.snippets_per_speaker < 2) {
    throw std::runtime_error("train: need P >= 2 and K >= 2");
  }
  if (!(config.margin > 0.0)) throw std::runtime_error("train: margin must be positive");

  // Speakers eligible for a P x K batch.
  std::vector<int> speaker_ids;
  std::vector<std::vector<int>> by_speaker;
  for (int i = 0; i < static_cast<int>(corpus.size()); ++i) {
    const int s = corpus[static_cast<std::size_t>(i)].speaker;
    auto it = std::find(speaker_ids.begin(), speaker_ids.end(), s);
    std::size_t idx;
    if (it == speaker_ids.end()) {
      speaker_ids.push_back(s);
      by_speaker.emplace_back();
      idx = by_speaker.size() - 1;
    } else {
      idx = static_cast<std::size_t>(it - speaker_ids.begin());
    }
    by_speaker[idx].push_back(i);
  }
  std::vector<int> eligible;
  for (std::size_t s = 0; s < by_speaker.size(); ++s) {
    if (static_cast<int>(by_speaker[s].size()) >= config.snippets_per_speaker) {
      eligible.push_back(static_cast<int>(s));
    }
  }
  if (static_cast<int>(eligible.size()) < config.speakers_per_batch) {
    throw std::runtime_error("train: corpus too small for batch composition (need " +
                             std::to_string(config.speakers_per_batch) + " speakers with " +
                             std::to_string(config.snippets_per_speaker) + " snippets)");
  }

  TrainResult result;
  result.weights = initial;

  const std::size_t n_params = weight_count(cfg);
  std::vector<double> adam_m(n_params, 0.0), adam_v(n_params, 0.0);

  // Flat f32 views over the weight tensors, in declared order.
  auto tensor_list = [](ModelWeights& w) {
    std::vector<std::vector<float>*> list = {&w.frontend_w, &w.frontend_b};
    for (auto& b : w.blocks) {
      list.push_back(&b.w1);
      list.push_back(&b.b1);
      list.push_back(&b.w2);
      list.push_back(&b.b2);
    }
    list.push_back(&w.head_w);
    list.push_back(&w.head_b);
    return list;
  };

  for (int step = 0; step < config.steps; ++step) {
    Rng rng(derive_seed(config.seed, "train/step/" + std::to_string(step)));

    std::vector<int> speakers = eligible;
    rng.shuffle(speakers);
    speakers.resize(static_cast<std::size_t>(config.speakers_per_batch));

    std::vector<const Eigen::MatrixXd*> batch_frames;
    std::vector<int> batch_labels;
    for (int s : speakers) {
      std::vector<int> snippets = by_speaker[static_cast<std::size_t>(s)];
      rng.shuffle(snippets);
      for (int k = 0; k < config.snippets_per_speaker; ++k) {
        batch_frames.push_back(&corpus[static_cast<std::size_t>(snippets[static_cast<std::size_t>(k)])].frames);
        batch_labels.push_back(speaker_ids[static_cast<std::size_t>(s)]);
      }
    }

    std::vector<double> grads;
    int n_triplets = 0;
    const double loss = triplet_batch_loss(result.weights, batch_frames, batch_labels,
                                           config.mining, config.margin, &grads, &n_triplets);
    result.loss_trace.push_back(loss);
    result.triplet_counts.push_back(n_triplets);

    // Adam; weights round to f32 after each update so the in-memory model
    // always equals its serialized form.
    const double t = static_cast<double>(step + 1);
    const double bc1 = 1.0 - std::pow(config.adam_beta1, t);
    const double bc2 = 1.0 - std::pow(config.adam_beta2, t);
    std::size_t flat = 0;
    for (std::vector<float>* tensor : tensor_list(result.weights)) {
      for (float& wv : *tensor) {
        const double g = grads[flat];
        adam_m[flat] = config.adam_beta1 * adam_m[flat] + (1.0 - config.adam_beta1) * g;
        adam_v[flat] = config.adam_beta2 * adam_v[flat] + (1.0 - config.adam_beta2) * g * g;
        const double m_hat = adam_m[flat] / bc1;
        const double v_hat = adam_v[flat] / bc2;
        const double next = static_cast<double>(wv) -
                            config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_eps);
        wv = static_cast<float>(next);
        ++flat;
      }
    }
  }
  return result;
}

namespace {

constexpr char kMagic[4] = {'V', 'P', 'T', 'W'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("weights file truncated while reading " + what);
  return value;
}

void write_tensor(std::ofstream& out, const std::vector<float>& t) {
  write_pod<std::uint64_t>(out, t.size());
  out.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
}

std::vector<float> read_tensor(std::ifstream& in, std::size_t expected, const std::string& what) {
  const auto count = read_pod<std::uint64_t>(in, what);
  if (count != expected) {
    throw std::runtime_error("weights file shape mismatch in " + what + ": expected " +
                             std::to_string(expected) + " values, found " + std::to_string(count));
  }
  std::vector<float> t(count);
  in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw std::runtime_error("weights file truncated while reading " + what);
  return t;
}

}  // namespace

void save_weights(const std::filesystem::path& path, const ModelWeights& weights) {
  weights.config.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write weights file: " + path.string());
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  const TcnConfig& c = weights.config;
  write_pod<std::int32_t>(out, c.n_blocks);
  write_pod<std::int32_t>(out, c.channels);
  write_pod<std::int32_t>(out, c.kernel_size);
  write_pod<std::int32_t>(out, c.frame_hop_samples);
  write_pod<std::int32_t>(out, c.embed_dim);
  write_pod<std::int32_t>(out, c.input_sample_rate_hz);
  write_pod<std::uint8_t>(out, c.l2_normalize_output ? 1 : 0);
  for (int d : c.dilations) write_pod<std::int32_t>(out, d);
  write_tensor(out, weights.frontend_w);
  write_tensor(out, weights.frontend_b);
  for (const auto& b : weights.blocks) {
    write_tensor(out, b.w1);
    write_tensor(out, b.b1);
    write_tensor(out, b.w2);
    write_tensor(out, b.b2);
  }
  write_tensor(out, weights.head_w);
  write_tensor(out, weights.head_b);
  if (!out) throw std::runtime_error("short write to weights file: " + path.string());
}

ModelWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weights file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a weights file: " + path.string());
  }
  const auto version = read_pod<std::uint32_t>(in, "version");
  if (version != kVersion) {
    throw std::runtime_error("unsupported weights file version " + std::to_string(version));
  }
  TcnConfig c;
  c.n_blocks = read_pod<std::int32_t>(in, "n_blocks");
  c.channels = read_pod<std::int32_t>(in, "channels");
  c.kernel_size = read_pod<std::int32_t>(in, "kernel_size");
  c.frame_hop_samples = read_pod<std::int32_t>(in, "frame_hop_samples");
  c.embed_dim = read_pod<std::int32_t>(in, "embed_dim");
  c.input_sample_rate_hz = read_pod<std::int32_t>(in, "input_sample_rate_hz");
  c.l2_normalize_output = read_pod<std::uint8_t>(in, "l2_normalize_output") != 0;
  if (c.n_blocks < 1 || c.n_blocks > 1024) {
    throw std::runtime_error("weights file has implausible n_blocks");
  }
  c.dilations.clear();
  for (int b = 0; b < c.n_blocks; ++b) c.dilations.push_back(read_pod<std::int32_t>(in, "dilation"));
  c.validate();

  ModelWeights w;
  w.config = c;
  const std::size_t C = static_cast<std::size_t>(c.channels);
  const std::size_t k = static_cast<std::size_t>(c.kernel_size);
  w.frontend_w = read_tensor(in, C * static_cast<std::size_t>(c.frame_hop_samples), "frontend_w");
  w.frontend_b = read_tensor(in, C, "frontend_b");
  w.blocks.resize(static_cast<std::size_t>(c.n_blocks));
  for (auto& b : w.blocks) {
    b.w1 = read_tensor(in, k * C * C, "block w1");
    b.b1 = read_tensor(in, C, "block b1");
    b.w2 = read_tensor(in, k * C * C, "block w2");
    b.b2 = read_tensor(in, C, "block b2");
  }
  w.head_w = read_tensor(in, static_cast<std::size_t>(c.embed_dim) * C, "head_w");
  w.head_b = read_tensor(in, static_cast<std::size_t>(c.embed_dim), "head_b");
  return w;
}

}  // namespace voiceprint
