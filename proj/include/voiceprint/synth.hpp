// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "voiceprint/audio.hpp"
#include "voiceprint/dataset.hpp"

namespace voiceprint {

// F0 trajectory over a voiced element.
enum class ContourShape { flat, rising, peaked };

// Per-call-type properties, constant across individuals.
struct CallTypeProfile {
  std::string name;
  ContourShape contour = ContourShape::flat;
  double duration_min_s = 0.6;
  double duration_max_s = 1.2;
  double noise_mix = 0.25;  // 0 = fully voiced, 1 = fully aspirated
  int element_count = 1;    // voiced elements per snippet, separated by gaps
};

// Per-individual voice cues: glottal source rate plus vocal-tract resonances.
struct IdentityProfile {
  double base_f0_hz = 150.0;
  std::array<double, 3> formants_hz = {600.0, 1400.0, 2800.0};
  double jitter = 0.01;  // fractional period perturbation
};

struct SynthSpec {
  std::vector<std::string> individual_ids;
  std::vector<CallTypeProfile> call_types;
  // One profile per individual. Empty = derive well-separated profiles
  // from the seed.
  std::vector<IdentityProfile> identities;
  // individuals x call types.
  std::vector<std::vector<int>> snippets_per_cell;
  int sample_rate_hz = 44100;
  // Negative control: identity cues are re-drawn independently per
  // (individual, call type) cell, so no cross-call-type voice print exists.
  bool null_identity = false;
};

// The three stock call types used by the demo corpora.
std::vector<CallTypeProfile> default_call_types();

// Uniform cell counts, ids ind00..indNN.
SynthSpec uniform_synth_spec(int n_individuals, int snippets_per_cell);

// 3 individuals x 3 call types with the demo cell counts
// (30/29/13, 30/20/17, 33/12/11) = 195 snippets.
SynthSpec demo_synth_spec();

// Well-separated identity profiles derived deterministically from a seed.
std::vector<IdentityProfile> derive_identity_profiles(int n_individuals, int sample_rate_hz,
                                                      std::uint64_t seed);

// The exact identity profile used for one (individual, call type) cell;
// constant across call types unless null_identity is set.
struct CellIdentity {
  std::string individual_id;
  std::string call_type;
  IdentityProfile profile;
};

struct SynthResult {
  Manifest manifest;
  std::vector<CellIdentity> cell_profiles;
};

// Writes one WAV per requested snippet under out_dir/audio/, plus
// manifest.csv and profiles.csv in out_dir. Fully deterministic in
// (spec, seed).
SynthResult synthesize_corpus(const SynthSpec& spec, std::uint64_t seed,
                              const std::filesystem::path& out_dir);

// Renders a single snippet; exposed for tests.
Waveform synthesize_snippet(const IdentityProfile& who, const CallTypeProfile& what,
                            int sample_rate_hz, std::uint64_t seed);

}  // namespace voiceprint
