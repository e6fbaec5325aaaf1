// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace voiceprint {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

// Zeroth-order modified Bessel function, power series.
double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double half_x = 0.5 * x;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open WAV file: " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk_id = p + pos;
    std::uint32_t chunk_size = read_u32(p + pos + 4);
    pos += 8;
    if (pos + chunk_size > size) {
      throw std::runtime_error("truncated WAV file: " + path.string());
    }
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw std::runtime_error("truncated WAV fmt chunk: " + path.string());
      format = read_u16(p + pos);
      channels = read_u16(p + pos + 2);
      sample_rate = read_u32(p + pos + 4);
      bits = read_u16(p + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      data = p + pos;
      data_size = chunk_size;
    }
    pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    throw std::runtime_error("truncated WAV file (missing fmt or data): " + path.string());
  }
  if (channels == 0 || sample_rate == 0) {
    throw std::runtime_error("malformed WAV fmt chunk: " + path.string());
  }
  if (sample_rate < 8000 || sample_rate > 192000) {
    throw std::runtime_error("unsupported WAV sample rate " + std::to_string(sample_rate) + ": " +
                             path.string());
  }
  const bool pcm16 = format == 1 && bits == 16;
  const bool pcm32 = format == 1 && bits == 32;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !pcm32 && !float32) {
    throw std::runtime_error("unsupported WAV encoding (format " + std::to_string(format) +
                             ", " + std::to_string(bits) + " bits): " + path.string());
  }

  const std::uint32_t bytes_per_sample = bits / 8;
  const std::uint32_t frame_bytes = bytes_per_sample * channels;
  if (data_size % frame_bytes != 0) {
    throw std::runtime_error("truncated WAV data chunk: " + path.string());
  }
  const std::size_t n_frames = data_size / frame_bytes;
  if (n_frames == 0) {
    throw std::runtime_error("empty WAV data chunk: " + path.string());
  }

  Waveform w;
  w.sample_rate_hz = static_cast<int>(sample_rate);
  w.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* s = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        auto v = static_cast<std::int16_t>(read_u16(s));
        acc += static_cast<double>(v) / 32768.0;
      } else if (pcm32) {
        auto v = static_cast<std::int32_t>(read_u32(s));
        acc += static_cast<double>(v) / 2147483648.0;
      } else {
        std::uint32_t u = read_u32(s);
        float f;
        std::memcpy(&f, &u, 4);
        acc += static_cast<double>(f);
      }
    }
    double mono = acc / channels;
    if (channels == 1 && float32) {
      // Preserve the exact stored value (clamped only if out of range) so
      // the float round-trip is bit-exact.
      float f = static_cast<float>(mono);
      w.samples[i] = std::clamp(f, -1.0f, 1.0f);
    } else {
      w.samples[i] = static_cast<float>(std::clamp(mono, -1.0, 1.0));
    }
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  if (w.samples.empty()) {
    throw std::runtime_error("refusing to write empty waveform: " + path.string());
  }
  const std::uint32_t data_size = static_cast<std::uint32_t>(w.samples.size() * 4);
  std::string out;
  out.reserve(58 + data_size);
  out.append("RIFF");
  put_u32(out, 4 + 8 + 16 + 8 + 4 + 8 + data_size);  // WAVE + fmt + fact + data
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, 3);  // IEEE float
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 4);
  put_u16(out, 4);
  put_u16(out, 32);
  out.append("fact");
  put_u32(out, 4);
  put_u32(out, static_cast<std::uint32_t>(w.samples.size()));
  out.append("data");
  put_u32(out, data_size);
  for (float s : w.samples) {
    std::uint32_t u;
    std::memcpy(&u, &s, 4);
    put_u32(out, u);
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write WAV file: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("short write to WAV file: " + path.string());
}

Waveform resample(const Waveform& w, int target_hz) {
  if (target_hz < 8000 || target_hz > 192000) {
    throw std::runtime_error("resample: target rate outside 8000..192000 Hz");
  }
  if (w.samples.empty()) throw std::runtime_error("resample: empty waveform");
  if (target_hz == w.sample_rate_hz) return w;

  const int source_hz = w.sample_rate_hz;
  const std::int64_t n_in = static_cast<std::int64_t>(w.samples.size());
  const std::int64_t n_out =
      std::llround(static_cast<double>(n_in) * target_hz / source_hz);

  // Reduced ratio: output n sits at input position n * step_num / step_den.
  const std::int64_t g = std::gcd<std::int64_t>(source_hz, target_hz);
  const std::int64_t step_num = source_hz / g;   // input samples per output step (numerator)
  const std::int64_t step_den = target_hz / g;   // denominator = number of distinct phases

  // Kaiser-windowed sinc, 60 dB stopband. The stopband edge is pinned to the
  // smaller Nyquist; a 15% transition band is carved out of the passband.
  const double attenuation_db = 60.0;
  const double beta = 0.1102 * (attenuation_db - 8.7);
  const double nyquist = 0.5 * std::min(1.0, static_cast<double>(target_hz) / source_hz);
  const double transition = 0.15 * nyquist;
  const double cutoff = nyquist - 0.5 * transition;  // cycles per input sample
  const int half_width = static_cast<int>(
      std::ceil((attenuation_db - 7.95) / (2.285 * 2.0 * kPi * transition)));
  const double i0_beta = bessel_i0(beta);

  auto kernel = [&](double t) -> double {
    if (std::abs(t) >= half_width) return 0.0;
    const double x = t / half_width;
    const double window = bessel_i0(beta * std::sqrt(1.0 - x * x)) / i0_beta;
    if (t == 0.0) return 2.0 * cutoff * window;
    const double arg = 2.0 * kPi * cutoff * t;
    return 2.0 * cutoff * (std::sin(arg) / arg) * window;
  };

  // One tap table per fractional phase when the ratio is simple; otherwise
  // taps are evaluated on the fly.
  const int taps = 2 * half_width + 2;
  std::vector<double> phase_table;
  const bool use_table = step_den <= 8192;
  if (use_table) {
    phase_table.resize(static_cast<std::size_t>(step_den) * taps);
    for (std::int64_t phase = 0; phase < step_den; ++phase) {
      const double frac = static_cast<double>(phase) / step_den;
      double sum = 0.0;
      double* row = phase_table.data() + static_cast<std::size_t>(phase) * taps;
      for (int j = 0; j < taps; ++j) {
        row[j] = kernel(frac - (j - half_width));
        sum += row[j];
      }
      for (int j = 0; j < taps; ++j) row[j] /= sum;  // unit DC gain per phase
    }
  }

  Waveform out;
  out.sample_rate_hz = target_hz;
  out.samples.resize(static_cast<std::size_t>(n_out));
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t pos_num = n * step_num;
    const std::int64_t idx = pos_num / step_den;
    const std::int64_t phase = pos_num % step_den;
    double acc = 0.0;
    if (use_table) {
      const double* row = phase_table.data() + static_cast<std::size_t>(phase) * taps;
      for (int j = 0; j < taps; ++j) {
        const std::int64_t k = idx + j - half_width;
        if (k >= 0 && k < n_in) acc += row[j] * w.samples[static_cast<std::size_t>(k)];
      }
    } else {
      const double frac = static_cast<double>(phase) / step_den;
      double sum = 0.0;
      double val = 0.0;
      for (int j = 0; j < taps; ++j) {
        const double h = kernel(frac - (j - half_width));
        sum += h;
        const std::int64_t k = idx + j - half_width;
        if (k >= 0 && k < n_in) val += h * w.samples[static_cast<std::size_t>(k)];
      }
      acc = val / sum;
    }
    out.samples[static_cast<std::size_t>(n)] = static_cast<float>(acc);
  }
  return out;
}

FrameSequence frame(const Waveform& w, int frame_len, int hop, Window window) {
  if (frame_len < 1 || hop < 1) {
    throw std::runtime_error("frame: frame_len and hop must be >= 1");
  }
  FrameSequence fs;
  fs.frame_len = frame_len;
  fs.hop = hop;
  const std::int64_t n = static_cast<std::int64_t>(w.samples.size());
  fs.n_frames = n >= frame_len ? static_cast<int>(1 + (n - frame_len) / hop) : 0;
  fs.data.resize(static_cast<std::size_t>(fs.n_frames) * frame_len);

  std::vector<double> win(static_cast<std::size_t>(frame_len), 1.0);
  if (window == Window::hann) {
    // Periodic Hann: w[j] = 0.5 - 0.5 cos(2 pi j / frame_len).
    for (int j = 0; j < frame_len; ++j) {
      win[static_cast<std::size_t>(j)] = 0.5 - 0.5 * std::cos(2.0 * kPi * j / frame_len);
    }
  }
  for (int i = 0; i < fs.n_frames; ++i) {
    const std::size_t start = static_cast<std::size_t>(i) * hop;
    double* dst = fs.data.data() + static_cast<std::size_t>(i) * frame_len;
    for (int j = 0; j < frame_len; ++j) {
      dst[j] = static_cast<double>(w.samples[start + j]) * win[static_cast<std::size_t>(j)];
    }
  }
  return fs;
}

}  // namespace voiceprint
