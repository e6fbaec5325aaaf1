// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/mfcc.hpp"

#include <cmath>
#include <stdexcept>

#include "voiceprint/fft.hpp"

namespace voiceprint {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

void validate(const MfccConfig& c, int sample_rate_hz) {
  if (c.n_coeffs < 1 || c.n_mels < c.n_coeffs) {
    throw std::runtime_error("mfcc: need 1 <= n_coeffs <= n_mels");
  }
  if (!(c.f_min_hz >= 0.0 && c.f_min_hz < c.f_max_hz)) {
    throw std::runtime_error("mfcc: need 0 <= f_min < f_max");
  }
  if (c.f_max_hz > 0.5 * sample_rate_hz + 1e-9) {
    throw std::runtime_error("mfcc: f_max exceeds Nyquist");
  }
}
}  // namespace

double mel_from_hz(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double hz_from_mel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Eigen::MatrixXd mel_filterbank(const MfccConfig& config, int fft_size, int sample_rate_hz) {
  validate(config, sample_rate_hz);
  const int n_bins = fft_size / 2 + 1;
  const int n_mels = config.n_mels;

  // n_mels centers plus the two band edges, equally spaced in mel.
  std::vector<double> edges_hz(static_cast<std::size_t>(n_mels) + 2);
  const double mel_lo = mel_from_hz(config.f_min_hz);
  const double mel_hi = mel_from_hz(config.f_max_hz);
  for (int i = 0; i < n_mels + 2; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1);
    edges_hz[static_cast<std::size_t>(i)] = hz_from_mel(mel);
  }

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges_hz[static_cast<std::size_t>(m)];
    const double center = edges_hz[static_cast<std::size_t>(m) + 1];
    const double right = edges_hz[static_cast<std::size_t>(m) + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / fft_size;
      double weight = 0.0;
      if (f > left && f < center) {
        weight = (f - left) / (center - left);
      } else if (f == center) {
        weight = 1.0;
      } else if (f > center && f < right) {
        weight = (right - f) / (right - center);
      }
      fb(m, k) = weight;
    }
    if (!(fb.row(m).maxCoeff() > 0.0)) {
      // A filter narrower than the bin spacing would vanish; snap it to the
      // bin nearest its center so every band stays represented.
      int k_near = static_cast<int>(std::lround(center * fft_size / sample_rate_hz));
      k_near = std::min(std::max(k_near, 0), n_bins - 1);
      fb(m, k_near) = 1.0;
    }
  }
  return fb;
}

std::vector<FeatureVector> mfcc_sequence(const Waveform& w, const MfccConfig& config) {
  if (w.sample_rate_hz < 2.0 * config.f_max_hz - 1e-9) {
    throw std::runtime_error("mfcc: sample rate below 2 * f_max");
  }
  validate(config, w.sample_rate_hz);

  const int frame_len = static_cast<int>(std::lround(config.frame_ms * 1e-3 * w.sample_rate_hz));
  const int hop = static_cast<int>(std::lround(config.hop_ms * 1e-3 * w.sample_rate_hz));
  if (static_cast<int>(w.samples.size()) < frame_len) {
    throw std::runtime_error("mfcc: waveform shorter than one frame");
  }
  const int fft_size = config.fft_size > 0 ? config.fft_size : next_pow2(frame_len);
  if (fft_size < frame_len) {
    throw std::runtime_error("mfcc: fft_size smaller than frame length");
  }

  const Eigen::MatrixXd fb = mel_filterbank(config, fft_size, w.sample_rate_hz);

  // Orthonormal DCT-II, n_coeffs x n_mels.
  const int n_mels = config.n_mels;
  Eigen::MatrixXd dct(config.n_coeffs, n_mels);
  for (int k = 0; k < config.n_coeffs; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n_mels) : std::sqrt(2.0 / n_mels);
    for (int n = 0; n < n_mels; ++n) {
      dct(k, n) = scale * std::cos(kPi * k * (2.0 * n + 1.0) / (2.0 * n_mels));
    }
  }

  const FrameSequence frames = frame(w, frame_len, hop, config.window);
  std::vector<FeatureVector> out;
  out.reserve(static_cast<std::size_t>(frames.n_frames));
  Eigen::VectorXd power(fft_size / 2 + 1);
  for (int i = 0; i < frames.n_frames; ++i) {
    const std::vector<double> ps = power_spectrum(frames.frame(i), frame_len, fft_size);
    for (int k = 0; k <= fft_size / 2; ++k) power(k) = ps[static_cast<std::size_t>(k)];
    Eigen::VectorXd energies = fb * power;
    for (int m = 0; m < n_mels; ++m) {
      energies(m) = std::log(std::max(energies(m), config.log_floor));
    }
    const Eigen::VectorXd coeffs = dct * energies;
    out.emplace_back(coeffs.data(), coeffs.data() + config.n_coeffs);
  }
  return out;
}

FeatureVector mean_pool(const std::vector<FeatureVector>& seq) {
  if (seq.empty()) throw std::runtime_error("mean_pool: empty sequence");
  FeatureVector mean(seq.front().size(), 0.0);
  for (const auto& v : seq) {
    if (v.size() != mean.size()) throw std::runtime_error("mean_pool: ragged sequence");
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(seq.size());
  for (double& x : mean) x *= inv;
  return mean;
}

}  // namespace voiceprint
