// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

namespace voiceprint {

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& x);

// One-sided power spectrum |X[k]|^2, k = 0..fft_size/2, of a real frame
// zero-padded to fft_size.
std::vector<double> power_spectrum(const double* frame, int frame_len, int fft_size);

int next_pow2(int n);

}  // namespace voiceprint
