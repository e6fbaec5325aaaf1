// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "test_util.hpp"
#include "voiceprint/audio.hpp"
#include "voiceprint/rng.hpp"

using namespace voiceprint;

namespace {

constexpr double kPi = 3.14159265358979323846;

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

// Hand-rolled PCM16 writer so read_wav is checked against independent bytes.
std::string pcm16_wav(const std::vector<std::int16_t>& interleaved, int channels, int rate) {
  std::string data;
  for (std::int16_t v : interleaved) put_u16(data, static_cast<std::uint16_t>(v));
  std::string s = "RIFF";
  put_u32(s, 36 + static_cast<std::uint32_t>(data.size()));
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, 1);
  put_u16(s, static_cast<std::uint16_t>(channels));
  put_u32(s, static_cast<std::uint32_t>(rate));
  put_u32(s, static_cast<std::uint32_t>(rate * channels * 2));
  put_u16(s, static_cast<std::uint16_t>(channels * 2));
  put_u16(s, 16);
  s += "data";
  put_u32(s, static_cast<std::uint32_t>(data.size()));
  s += data;
  return s;
}

Waveform sine(double freq_hz, int rate, int n, double amplitude) {
  Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w.samples[static_cast<std::size_t>(i)] =
        static_cast<float>(amplitude * std::sin(2.0 * kPi * freq_hz * i / rate));
  }
  return w;
}

}  // namespace

TEST_CASE("pcm16 scaling: -32768 maps to exactly -1") {
  test::TempDir dir("wav");
  test::spit(dir / "a.wav", pcm16_wav({-32768, 16384, 0}, 1, 44100));
  const Waveform w = read_wav(dir / "a.wav");
  REQUIRE(w.samples.size() == 3);
  CHECK(w.sample_rate_hz == 44100);
  CHECK(w.samples[0] == -1.0f);
  CHECK(w.samples[1] == 0.5f);
  CHECK(w.samples[2] == 0.0f);
}

TEST_CASE("stereo channels (x, -x) average to silence") {
  test::TempDir dir("wav");
  test::spit(dir / "s.wav", pcm16_wav({9000, -9000, -1234, 1234}, 2, 8000));
  const Waveform w = read_wav(dir / "s.wav");
  REQUIRE(w.samples.size() == 2);
  CHECK(w.samples[0] == 0.0f);
  CHECK(w.samples[1] == 0.0f);
}

TEST_CASE("float32 wav round-trips bit-exactly") {
  test::TempDir dir("wav");
  Rng rng(3);
  Waveform w;
  w.sample_rate_hz = 44100;
  for (int i = 0; i < 44100; ++i) {
    w.samples.push_back(static_cast<float>(rng.uniform(-1.0, 1.0)));
  }
  write_wav(dir / "f.wav", w);
  const Waveform back = read_wav(dir / "f.wav");
  REQUIRE(back.samples.size() == w.samples.size());
  CHECK(back.sample_rate_hz == 44100);
  CHECK(std::memcmp(back.samples.data(), w.samples.data(), w.samples.size() * 4) == 0);
}

TEST_CASE("pcm32 integer samples scale by 2^31") {
  test::TempDir dir("wav");
  std::string data;
  put_u32(data, 0x80000000u);  // INT32_MIN -> -1.0
  put_u32(data, 0x40000000u);  // 2^30 -> 0.5
  std::string s = "RIFF";
  put_u32(s, 36 + static_cast<std::uint32_t>(data.size()));
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, 1);
  put_u16(s, 1);
  put_u32(s, 44100);
  put_u32(s, 44100 * 4);
  put_u16(s, 4);
  put_u16(s, 32);
  s += "data";
  put_u32(s, static_cast<std::uint32_t>(data.size()));
  s += data;
  test::spit(dir / "i32.wav", s);
  const Waveform w = read_wav(dir / "i32.wav");
  REQUIRE(w.samples.size() == 2);
  CHECK(w.samples[0] == -1.0f);
  CHECK(w.samples[1] == 0.5f);
}

TEST_CASE("upsampling preserves a tone as well") {
  const Waveform w = sine(1000.0, 16000, 8000, 0.4);  // 0.5 s, 500 cycles
  const Waveform up = resample(w, 44100);
  CHECK(up.samples.size() == 22050);
  // Single-bin direct DFT at 1 kHz (bin 500 of 22050 samples).
  double re = 0.0, im = 0.0;
  for (int t = 0; t < 22050; ++t) {
    const double angle = -2.0 * kPi * 500.0 * t / 22050.0;
    re += up.samples[static_cast<std::size_t>(t)] * std::cos(angle);
    im += up.samples[static_cast<std::size_t>(t)] * std::sin(angle);
  }
  const double amplitude = 2.0 * std::sqrt(re * re + im * im) / 22050.0;
  CHECK(amplitude == doctest::Approx(0.4).epsilon(0.01));
}

TEST_CASE("wav reader rejects bad input") {
  test::TempDir dir("wav");
  test::spit(dir / "bad.wav", "not a wave file at all");
  CHECK_THROWS_WITH_AS(read_wav(dir / "bad.wav"), doctest::Contains("RIFF"), std::runtime_error);

  std::string truncated = pcm16_wav({1, 2, 3, 4}, 1, 8000);
  truncated.resize(truncated.size() - 3);
  test::spit(dir / "trunc.wav", truncated);
  CHECK_THROWS_WITH_AS(read_wav(dir / "trunc.wav"), doctest::Contains("truncated"),
                       std::runtime_error);

  // 24-bit PCM is not supported.
  std::string odd = pcm16_wav({0, 0}, 1, 8000);
  odd[34] = 24;
  test::spit(dir / "odd.wav", odd);
  CHECK_THROWS_WITH_AS(read_wav(dir / "odd.wav"), doctest::Contains("unsupported"),
                       std::runtime_error);

  test::spit(dir / "slow.wav", pcm16_wav({0, 0}, 1, 4000));
  CHECK_THROWS_WITH_AS(read_wav(dir / "slow.wav"), doctest::Contains("sample rate"),
                       std::runtime_error);

  CHECK_THROWS(read_wav(dir / "missing.wav"));
}

TEST_CASE("resample length arithmetic and identity") {
  const Waveform w = sine(440.0, 44100, 44100, 0.5);
  const Waveform down = resample(w, 16000);
  CHECK(down.sample_rate_hz == 16000);
  CHECK(down.samples.size() == 16000);

  const Waveform same = resample(w, 44100);
  CHECK(same.samples == w.samples);
}

TEST_CASE("resampled tone keeps its frequency and amplitude (DFT oracle)") {
  // 0.5 s => integer cycle counts at both rates, so the tone sits on a bin.
  const int n_in = 22050;
  const Waveform w = sine(1000.0, 44100, n_in, 0.4);
  const Waveform down = resample(w, 16000);
  REQUIRE(down.samples.size() == 8000);

  const std::vector<double> mags = oracle::dft_magnitudes(down.samples);
  int peak = 1;
  for (int k = 1; k < static_cast<int>(mags.size()); ++k) {
    if (mags[static_cast<std::size_t>(k)] > mags[static_cast<std::size_t>(peak)]) peak = k;
  }
  const double bin_hz = 16000.0 / 8000.0;
  CHECK(std::abs(peak * bin_hz - 1000.0) <= bin_hz);

  const double amplitude = 2.0 * mags[static_cast<std::size_t>(peak)] / 8000.0;
  CHECK(amplitude == doctest::Approx(0.4).epsilon(0.01));
}

TEST_CASE("resampler attenuates energy above the target Nyquist by 60 dB") {
  // 12 kHz tone is above the 8 kHz target Nyquist; it must not alias through.
  const Waveform w = sine(12000.0, 44100, 22050, 0.5);
  const Waveform down = resample(w, 16000);
  const std::vector<double> mags = oracle::dft_magnitudes(down.samples);
  double peak = 0.0;
  for (double m : mags) peak = std::max(peak, m);
  const double amplitude = 2.0 * peak / static_cast<double>(down.samples.size());
  CHECK(amplitude < 0.5 * 1e-3);  // -60 dB relative to the source amplitude
}

TEST_CASE("frame counts follow 1 + floor((N - len)/hop)") {
  Waveform w;
  w.sample_rate_hz = 44100;
  w.samples.assign(1024, 0.25f);
  CHECK(frame(w, 1024, 1024, Window::rectangular).n_frames == 1);

  w.samples.assign(1023, 0.25f);
  CHECK(frame(w, 1024, 1024, Window::rectangular).n_frames == 0);

  w.samples.assign(44100, 0.25f);
  CHECK(frame(w, 1103, 441, Window::rectangular).n_frames == 98);
}

TEST_CASE("hann frames of a constant-1 signal equal the window") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.assign(512, 1.0f);
  const FrameSequence fs = frame(w, 256, 128, Window::hann);
  REQUIRE(fs.n_frames == 3);
  for (int j = 0; j < 256; ++j) {
    const double expected = 0.5 - 0.5 * std::cos(2.0 * kPi * j / 256.0);
    CHECK(fs.frame(0)[j] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(fs.frame(2)[j] == doctest::Approx(expected).epsilon(1e-12));
  }
}
