// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace voiceprint {

// One labeled call snippet.
struct CallRecord {
  std::string snippet_id;
  std::string individual_id;
  std::string call_type;
  std::string audio_path;
  double duration_s = 0.0;
};

struct Manifest {
  std::vector<CallRecord> records;
};

// CSV columns: snippet_id,individual_id,call_type,audio_path,duration_s
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Rejects empty manifests, duplicate snippet ids, empty fields and
// non-positive durations.
void validate_manifest(const Manifest& manifest);

// Resolves a record's audio path relative to the manifest's directory.
std::filesystem::path resolve_audio_path(const std::filesystem::path& manifest_path,
                                         const std::string& audio_path);

// Individuals and call types in first-appearance order.
struct CellCounts {
  std::vector<std::string> individuals;
  std::vector<std::string> call_types;
  std::vector<std::vector<int>> counts;  // individuals x call_types
  std::vector<int> row_totals;
  std::vector<int> col_totals;
  int total = 0;
};

CellCounts counts_by_cell(const Manifest& manifest);

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  bool stratify_by_individual = true;
};

// Shared core of every split in the project. Returns sorted index lists;
// train gets floor(fraction * n) entries (per class when stratified).
std::pair<std::vector<int>, std::vector<int>> partition_indices(
    const std::vector<std::string>& class_labels, double train_fraction,
    std::uint64_t seed, bool stratified);

std::pair<Manifest, Manifest> partition(const Manifest& manifest, const SplitSpec& spec);

}  // namespace voiceprint
