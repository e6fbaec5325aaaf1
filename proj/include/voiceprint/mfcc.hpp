// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "voiceprint/audio.hpp"

namespace voiceprint {

// Shared feature currency of both frontends: a 128-dim real vector.
using FeatureVector = std::vector<double>;

inline constexpr int kFeatureDim = 128;

struct MfccConfig {
  int n_coeffs = 128;
  int n_mels = 128;
  double f_min_hz = 50.0;
  double f_max_hz = 22050.0;
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 0;  // 0 = smallest power of two >= frame length
  double log_floor = 1e-10;
  Window window = Window::hann;
};

// mel(f) = 2595 * log10(1 + f / 700)
double mel_from_hz(double hz);
double hz_from_mel(double mel);

// Triangular filters, one row per mel band, over one-sided FFT bins.
// Centers are equally spaced on the mel scale between f_min and f_max.
Eigen::MatrixXd mel_filterbank(const MfccConfig& config, int fft_size, int sample_rate_hz);

// Per frame: power spectrum -> filterbank -> log(max(e, log_floor)) ->
// orthonormal DCT-II -> first n_coeffs coefficients.
std::vector<FeatureVector> mfcc_sequence(const Waveform& w, const MfccConfig& config);

// Coordinatewise arithmetic mean. Throws on an empty sequence.
FeatureVector mean_pool(const std::vector<FeatureVector>& seq);

}  // namespace voiceprint
