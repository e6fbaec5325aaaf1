// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "voiceprint/csv.hpp"
#include "voiceprint/rng.hpp"

namespace voiceprint {

namespace {
const std::vector<std::string> kManifestHeader = {
    "snippet_id", "individual_id", "call_type", "audio_path", "duration_s"};
}

Manifest load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("manifest not found: " + path.string());
  }
  const CsvTable table = read_csv(path);
  if (table.header != kManifestHeader) {
    throw std::runtime_error("manifest has wrong header: " + path.string());
  }
  if (table.rows.empty()) {
    throw std::runtime_error("empty manifest: " + path.string());
  }
  Manifest manifest;
  manifest.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    CallRecord rec;
    rec.snippet_id = row[0];
    rec.individual_id = row[1];
    rec.call_type = row[2];
    rec.audio_path = row[3];
    rec.duration_s = parse_double(row[4], "duration_s");
    manifest.records.push_back(std::move(rec));
  }
  validate_manifest(manifest);
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  validate_manifest(manifest);
  CsvTable table;
  table.header = kManifestHeader;
  for (const auto& rec : manifest.records) {
    table.rows.push_back({rec.snippet_id, rec.individual_id, rec.call_type, rec.audio_path,
                          format_double(rec.duration_s)});
  }
  write_csv(path, table);
}

void validate_manifest(const Manifest& manifest) {
  if (manifest.records.empty()) {
    throw std::runtime_error("empty manifest");
  }
  std::unordered_set<std::string> seen;
  seen.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    if (rec.snippet_id.empty() || rec.individual_id.empty() || rec.call_type.empty()) {
      throw std::runtime_error("manifest record with empty field (snippet '" + rec.snippet_id +
                               "')");
    }
    if (!(rec.duration_s > 0.0)) {
      throw std::runtime_error("non-positive duration for snippet '" + rec.snippet_id + "'");
    }
    if (!seen.insert(rec.snippet_id).second) {
      throw std::runtime_error("duplicate snippet_id '" + rec.snippet_id + "'");
    }
  }
}

std::filesystem::path resolve_audio_path(const std::filesystem::path& manifest_path,
                                         const std::string& audio_path) {
  std::filesystem::path p(audio_path);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

CellCounts counts_by_cell(const Manifest& manifest) {
  validate_manifest(manifest);
  CellCounts cc;
  std::unordered_map<std::string, int> ind_index;
  std::unordered_map<std::string, int> ct_index;
  for (const auto& rec : manifest.records) {
    if (ind_index.emplace(rec.individual_id, static_cast<int>(cc.individuals.size())).second) {
      cc.individuals.push_back(rec.individual_id);
    }
    if (ct_index.emplace(rec.call_type, static_cast<int>(cc.call_types.size())).second) {
      cc.call_types.push_back(rec.call_type);
    }
  }
  cc.counts.assign(cc.individuals.size(), std::vector<int>(cc.call_types.size(), 0));
  for (const auto& rec : manifest.records) {
    ++cc.counts[static_cast<std::size_t>(ind_index[rec.individual_id])]
               [static_cast<std::size_t>(ct_index[rec.call_type])];
  }
  cc.row_totals.assign(cc.individuals.size(), 0);
  cc.col_totals.assign(cc.call_types.size(), 0);
  for (std::size_t i = 0; i < cc.individuals.size(); ++i) {
    for (std::size_t j = 0; j < cc.call_types.size(); ++j) {
      cc.row_totals[i] += cc.counts[i][j];
      cc.col_totals[j] += cc.counts[i][j];
      cc.total += cc.counts[i][j];
    }
  }
  return cc;
}

std::pair<std::vector<int>, std::vector<int>> partition_indices(
    const std::vector<std::string>& class_labels, double train_fraction,
    std::uint64_t seed, bool stratified) {
  const int n = static_cast<int>(class_labels.size());
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::runtime_error("partition: train_fraction must be in (0, 1)");
  }
  if (n < 2) {
    throw std::runtime_error("partition: need at least 2 records");
  }

  Rng rng(seed);
  std::vector<int> train;
  std::vector<int> test;

  if (!stratified) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    const int k = static_cast<int>(std::floor(train_fraction * n));
    train.assign(order.begin(), order.begin() + k);
    test.assign(order.begin() + k, order.end());
  } else {
    // Classes are visited in first-appearance order so one engine gives a
    // reproducible stream.
    std::vector<std::string> class_order;
    std::unordered_map<std::string, std::vector<int>> members;
    for (int i = 0; i < n; ++i) {
      auto [it, inserted] = members.try_emplace(class_labels[static_cast<std::size_t>(i)]);
      if (inserted) class_order.push_back(class_labels[static_cast<std::size_t>(i)]);
      it->second.push_back(i);
    }
    for (const auto& cls : class_order) {
      auto& idx = members[cls];
      rng.shuffle(idx);
      const int k = static_cast<int>(std::floor(train_fraction * static_cast<double>(idx.size())));
      if (k == 0) {
        throw std::runtime_error("stratified split impossible: class '" + cls +
                                 "' would have an empty train set");
      }
      train.insert(train.end(), idx.begin(), idx.begin() + k);
      test.insert(test.end(), idx.begin() + k, idx.end());
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<Manifest, Manifest> partition(const Manifest& manifest, const SplitSpec& spec) {
  validate_manifest(manifest);
  std::vector<std::string> labels;
  labels.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) labels.push_back(rec.individual_id);
  auto [train_idx, test_idx] =
      partition_indices(labels, spec.train_fraction, spec.seed, spec.stratify_by_individual);
  Manifest train, test;
  for (int i : train_idx) train.records.push_back(manifest.records[static_cast<std::size_t>(i)]);
  for (int i : test_idx) test.records.push_back(manifest.records[static_cast<std::size_t>(i)]);
  return {std::move(train), std::move(test)};
}

}  // namespace voiceprint
