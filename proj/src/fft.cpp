// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace voiceprint {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::runtime_error("fft: size must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = x[i + j];
        const std::complex<double> v = x[i + j + len / 2] * w;
        x[i + j] = u + v;
        x[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> power_spectrum(const double* frame, int frame_len, int fft_size) {
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(fft_size));
  for (int i = 0; i < frame_len; ++i) buf[static_cast<std::size_t>(i)] = frame[i];
  fft_inplace(buf);
  std::vector<double> power(static_cast<std::size_t>(fft_size / 2 + 1));
  for (int k = 0; k <= fft_size / 2; ++k) {
    power[static_cast<std::size_t>(k)] = std::norm(buf[static_cast<std::size_t>(k)]);
  }
  return power;
}

}  // namespace voiceprint
