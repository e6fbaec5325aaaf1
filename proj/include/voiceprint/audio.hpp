// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace voiceprint {

// Mono amplitude series in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate_hz = 0;
};

enum class Window { rectangular, hann };

// Windowed frames, row-major: frames[i * frame_len + j].
// n_frames = 1 + floor((N - frame_len) / hop) for N >= frame_len, else 0.
// The tail that does not fill a whole frame is dropped.
struct FrameSequence {
  std::vector<double> data;
  int n_frames = 0;
  int frame_len = 0;
  int hop = 0;

  const double* frame(int i) const { return data.data() + static_cast<std::size_t>(i) * frame_len; }
};

// Reads a RIFF/WAVE file: PCM 16-bit int, 32-bit int or 32-bit IEEE float,
// any channel count (channels are averaged to mono). Integer samples are
// scaled to [-1, 1]; float samples are clamped to [-1, 1].
Waveform read_wav(const std::filesystem::path& path);

// Writes mono 32-bit IEEE float PCM; read_wav(write_wav(w)) is bit-exact.
void write_wav(const std::filesystem::path& path, const Waveform& w);

// Polyphase windowed-sinc resampler (Kaiser window, 60 dB stopband).
// Output length = round(N * target_hz / source_hz).
Waveform resample(const Waveform& w, int target_hz);

FrameSequence frame(const Waveform& w, int frame_len, int hop, Window window);

}  // namespace voiceprint
