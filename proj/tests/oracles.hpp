// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Independent brute-force reference implementations used only by tests.
// Each one re-derives its result from first principles (definition-level
// DFT/DCT, exhaustive enumeration) so it shares no code path with the
// library implementation it checks.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "voiceprint/audio.hpp"
#include "voiceprint/embedder.hpp"
#include "voiceprint/mfcc.hpp"

namespace voiceprint::oracle {

// Definition-level MFCC: direct DFT (explicit cos/sin sums), an explicitly
// constructed triangular mel filterbank and a textbook DCT-II.
class BruteForceMfcc {
 public:
  BruteForceMfcc(const MfccConfig& config, int sample_rate_hz);
  std::vector<std::vector<double>> run(const Waveform& w) const;

 private:
  MfccConfig config_;
  int sample_rate_hz_;
  int frame_len_;
  int hop_;
  int fft_size_;
  Eigen::MatrixXd dft_cos_;    // (fft/2+1) x fft
  Eigen::MatrixXd dft_sin_;
  Eigen::MatrixXd filterbank_; // n_mels x (fft/2+1)
  Eigen::MatrixXd dct_;        // n_coeffs x n_mels
};

// One-sided magnitude spectrum |X_k|, k = 0..N/2, from the definition.
std::vector<double> dft_magnitudes(const std::vector<float>& samples);

// Exact optimum of the soft-margin SVM dual on up to ~8 points, by
// exhaustive enumeration of {0, C, free} support patterns with a dense
// solve for each candidate.
double svm_dual_optimum(const Eigen::MatrixXd& gram, const std::vector<double>& y, double c);

// Exhaustive best Gini stump over all features and all midpoints.
struct StumpChoice {
  int feature = -1;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};
StumpChoice best_stump(const Eigen::MatrixXd& X, const std::vector<int>& y, int n_classes);

// Flat f32 views over a model's tensors in declared order (test-side
// mirror used by the finite-difference gradient check).
std::vector<std::vector<float>*> weight_tensors(ModelWeights& weights);

}  // namespace voiceprint::oracle
