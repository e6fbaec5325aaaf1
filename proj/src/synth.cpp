// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "voiceprint/csv.hpp"
#include "voiceprint/rng.hpp"

namespace voiceprint {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Two-pole resonator y[n] = 2 r cos(theta) y[n-1] - r^2 y[n-2] + g x[n].
struct Resonator {
  double a1 = 0.0, a2 = 0.0, gain = 1.0;
  double y1 = 0.0, y2 = 0.0;

  Resonator(double center_hz, double bandwidth_hz, int sample_rate_hz) {
    const double r = std::exp(-kPi * bandwidth_hz / sample_rate_hz);
    const double theta = 2.0 * kPi * center_hz / sample_rate_hz;
    a1 = 2.0 * r * std::cos(theta);
    a2 = -r * r;
    gain = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
  }

  double step(double x) {
    const double y = a1 * y1 + a2 * y2 + gain * x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

double contour_multiplier(ContourShape shape, double tau) {
  switch (shape) {
    case ContourShape::flat:
      return 1.0 + 0.03 * std::sin(2.0 * kPi * 4.0 * tau);
    case ContourShape::rising:
      return 0.80 + 0.45 * tau;
    case ContourShape::peaked:
      return 0.85 + 0.50 * std::sin(kPi * tau);
  }
  return 1.0;
}

void validate_spec(const SynthSpec& spec) {
  if (spec.individual_ids.empty()) throw std::runtime_error("synth: no individuals");
  if (spec.call_types.empty()) throw std::runtime_error("synth: no call types");
  if (spec.sample_rate_hz < 8000) throw std::runtime_error("synth: sample rate too low");
  if (spec.snippets_per_cell.size() != spec.individual_ids.size()) {
    throw std::runtime_error("synth: snippets_per_cell rows != individuals");
  }
  for (const auto& row : spec.snippets_per_cell) {
    if (row.size() != spec.call_types.size()) {
      throw std::runtime_error("synth: snippets_per_cell cols != call types");
    }
    for (int c : row) {
      if (c < 0) throw std::runtime_error("synth: negative cell count");
    }
  }
  if (!spec.identities.empty() && spec.identities.size() != spec.individual_ids.size()) {
    throw std::runtime_error("synth: identities size != individuals");
  }
  for (const auto& id : spec.identities) {
    for (double f : id.formants_hz) {
      if (!(f > 0.0 && f < 0.5 * spec.sample_rate_hz)) {
        throw std::runtime_error("synth: formant frequency outside (0, Nyquist)");
      }
    }
  }
}

}  // namespace

std::vector<CallTypeProfile> default_call_types() {
  return {
      {"scream", ContourShape::flat, 0.60, 1.10, 0.35, 1},
      {"pant_hoot_intro", ContourShape::rising, 0.80, 1.30, 0.12, 3},
      {"pant_hoot_climax", ContourShape::peaked, 0.50, 0.95, 0.22, 1},
  };
}

SynthSpec uniform_synth_spec(int n_individuals, int snippets_per_cell) {
  SynthSpec spec;
  spec.call_types = default_call_types();
  for (int i = 0; i < n_individuals; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ind%02d", i);
    spec.individual_ids.emplace_back(buf);
  }
  spec.snippets_per_cell.assign(static_cast<std::size_t>(n_individuals),
                                std::vector<int>(spec.call_types.size(), snippets_per_cell));
  return spec;
}

SynthSpec demo_synth_spec() {
  SynthSpec spec;
  spec.call_types = default_call_types();
  spec.individual_ids = {"alpha", "bravo", "carol"};
  spec.snippets_per_cell = {{30, 29, 13}, {30, 20, 17}, {33, 12, 11}};
  return spec;
}

std::vector<IdentityProfile> derive_identity_profiles(int n_individuals, int sample_rate_hz,
                                                      std::uint64_t seed) {
  std::vector<IdentityProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(n_individuals));
  const double f0_lo = 95.0;
  const double f0_hi = 310.0;
  for (int i = 0; i < n_individuals; ++i) {
    Rng rng(derive_seed(seed, "identity/" + std::to_string(i)));
    IdentityProfile p;
    // Base F0 on a geometric ladder with a small seeded wobble, so any
    // subset of individuals stays well separated in pitch.
    const double rung = n_individuals > 1
                            ? static_cast<double>(i) / (n_individuals - 1)
                            : 0.5;
    p.base_f0_hz = f0_lo * std::pow(f0_hi / f0_lo, rung) * (1.0 + 0.04 * (rng.uniform01() - 0.5));
    p.formants_hz[0] = rng.uniform(420.0, 920.0);
    p.formants_hz[1] = rng.uniform(1050.0, 2250.0);
    p.formants_hz[2] = rng.uniform(2400.0, 3500.0);
    p.jitter = rng.uniform(0.004, 0.018);
    const double nyquist = 0.5 * sample_rate_hz;
    for (double& f : p.formants_hz) f = std::min(f, 0.95 * nyquist);
    profiles.push_back(p);
  }
  return profiles;
}

Waveform synthesize_snippet(const IdentityProfile& who, const CallTypeProfile& what,
                            int sample_rate_hz, std::uint64_t seed) {
  Rng rng(seed);
  const int sr = sample_rate_hz;
  const double duration = rng.uniform(what.duration_min_s, what.duration_max_s);
  const int n = std::max(static_cast<int>(std::lround(duration * sr)), sr / 10);

  const int gap_len = static_cast<int>(std::lround(0.05 * sr));
  const int elements = std::max(what.element_count, 1);
  const int voiced_total = n - gap_len * (elements - 1);
  const int element_len = std::max(voiced_total / elements, sr / 20);

  // Glottal pulse train through three parallel formant resonators, with the
  // aspiration noise shaped by the same resonators so both source components
  // carry the identity cues.
  std::vector<double> samples(static_cast<std::size_t>(n), 0.0);
  const std::array<double, 3> formant_gain = {1.0, 0.55, 0.32};
  int cursor = 0;
  for (int e = 0; e < elements; ++e) {
    const int len = e + 1 == elements ? n - cursor : element_len;
    if (len <= 0) break;
    std::array<Resonator, 3> voiced_filters = {
        Resonator(who.formants_hz[0], 55.0 + 0.035 * who.formants_hz[0], sr),
        Resonator(who.formants_hz[1], 55.0 + 0.035 * who.formants_hz[1], sr),
        Resonator(who.formants_hz[2], 55.0 + 0.035 * who.formants_hz[2], sr)};
    std::array<Resonator, 3> noise_filters = voiced_filters;

    double phase = rng.uniform01();
    double period_scale = 1.0;
    const int fade = std::min(static_cast<int>(std::lround(0.02 * sr)), len / 4);
    for (int t = 0; t < len; ++t) {
      const double tau = static_cast<double>(t) / len;
      const double f0 = who.base_f0_hz * contour_multiplier(what.contour, tau);
      phase += f0 * period_scale / sr;
      double pulse = 0.0;
      if (phase >= 1.0) {
        phase -= std::floor(phase);
        pulse = 1.0;
        period_scale = 1.0 + who.jitter * rng.normal();
      }
      double voiced = 0.0;
      double aspirated = 0.0;
      const double noise = rng.normal() * 0.25;
      for (int f = 0; f < 3; ++f) {
        voiced += formant_gain[static_cast<std::size_t>(f)] *
                  voiced_filters[static_cast<std::size_t>(f)].step(pulse);
        aspirated += formant_gain[static_cast<std::size_t>(f)] *
                     noise_filters[static_cast<std::size_t>(f)].step(noise);
      }
      double env = 1.0;
      if (t < fade) env = 0.5 - 0.5 * std::cos(kPi * t / fade);
      if (len - 1 - t < fade) env = std::min(env, 0.5 - 0.5 * std::cos(kPi * (len - 1 - t) / fade));
      samples[static_cast<std::size_t>(cursor + t)] =
          env * ((1.0 - what.noise_mix) * voiced + what.noise_mix * aspirated);
    }
    cursor += len + gap_len;
    if (cursor >= n) break;
  }

  // Normalize to a fixed RMS so level carries no identity information.
  double rms = 0.0;
  for (double s : samples) rms += s * s;
  rms = std::sqrt(rms / n);
  const double target_rms = 0.12;
  const double scale = rms > 1e-12 ? target_rms / rms : 0.0;

  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w.samples[static_cast<std::size_t>(i)] =
        static_cast<float>(std::clamp(samples[static_cast<std::size_t>(i)] * scale, -0.99, 0.99));
  }
  return w;
}

SynthResult synthesize_corpus(const SynthSpec& spec, std::uint64_t seed,
                              const std::filesystem::path& out_dir) {
  validate_spec(spec);
  int total = 0;
  for (const auto& row : spec.snippets_per_cell) {
    for (int c : row) total += c;
  }
  if (total == 0) throw std::runtime_error("empty corpus: all cell counts are zero");

  std::vector<IdentityProfile> identities = spec.identities;
  if (identities.empty()) {
    identities = derive_identity_profiles(static_cast<int>(spec.individual_ids.size()),
                                          spec.sample_rate_hz, derive_seed(seed, "identities"));
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "audio", ec);
  if (ec || !std::filesystem::is_directory(out_dir / "audio")) {
    throw std::runtime_error("cannot create output directory: " + (out_dir / "audio").string());
  }

  SynthResult result;
  for (std::size_t i = 0; i < spec.individual_ids.size(); ++i) {
    for (std::size_t c = 0; c < spec.call_types.size(); ++c) {
      IdentityProfile cell_identity = identities[i];
      if (spec.null_identity) {
        // Negative control: fresh cues per cell, so nothing ties an
        // individual's call types together.
        auto redrawn = derive_identity_profiles(
            1, spec.sample_rate_hz,
            derive_seed(seed, "null/" + spec.individual_ids[i] + "/" + spec.call_types[c].name));
        cell_identity = redrawn.front();
        // The ladder rung is meaningless for a single redraw; spread F0 too.
        Rng rng(derive_seed(seed, "null-f0/" + spec.individual_ids[i] + "/" +
                                      spec.call_types[c].name));
        cell_identity.base_f0_hz = 95.0 * std::pow(310.0 / 95.0, rng.uniform01());
      }
      result.cell_profiles.push_back(
          {spec.individual_ids[i], spec.call_types[c].name, cell_identity});
      const int count = spec.snippets_per_cell[i][c];
      for (int k = 0; k < count; ++k) {
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "%03d", k);
        const std::string snippet_id =
            spec.individual_ids[i] + "_" + spec.call_types[c].name + "_" + suffix;
        const Waveform w = synthesize_snippet(cell_identity, spec.call_types[c],
                                              spec.sample_rate_hz,
                                              derive_seed(seed, "snippet/" + snippet_id));
        const std::string rel_path = "audio/" + snippet_id + ".wav";
        write_wav(out_dir / rel_path, w);
        CallRecord rec;
        rec.snippet_id = snippet_id;
        rec.individual_id = spec.individual_ids[i];
        rec.call_type = spec.call_types[c].name;
        rec.audio_path = rel_path;
        rec.duration_s = static_cast<double>(w.samples.size()) / spec.sample_rate_hz;
        result.manifest.records.push_back(std::move(rec));
      }
    }
  }

  save_manifest(out_dir / "manifest.csv", result.manifest);

  CsvTable profiles;
  profiles.header = {"individual_id", "call_type", "base_f0_hz", "formant1_hz",
                     "formant2_hz",   "formant3_hz", "jitter"};
  for (const auto& cp : result.cell_profiles) {
    profiles.rows.push_back({cp.individual_id, cp.call_type, format_double(cp.profile.base_f0_hz),
                             format_double(cp.profile.formants_hz[0]),
                             format_double(cp.profile.formants_hz[1]),
                             format_double(cp.profile.formants_hz[2]),
                             format_double(cp.profile.jitter)});
  }
  write_csv(out_dir / "profiles.csv", profiles);
  return result;
}

}  // namespace voiceprint
