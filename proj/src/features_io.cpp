// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/features_io.hpp"

#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "voiceprint/csv.hpp"

namespace voiceprint {

void save_features_csv(const std::filesystem::path& path, const FeatureTable& table) {
  const int n = static_cast<int>(table.X.rows());
  const int d = static_cast<int>(table.X.cols());
  if (static_cast<int>(table.snippet_ids.size()) != n ||
      static_cast<int>(table.individual_ids.size()) != n ||
      static_cast<int>(table.call_types.size()) != n) {
    throw std::runtime_error("feature table: metadata rows != matrix rows");
  }
  CsvTable csv;
  csv.header = {"snippet_id", "individual_id", "call_type"};
  for (int j = 0; j < d; ++j) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "f%03d", j);
    csv.header.emplace_back(buf);
  }
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row = {table.snippet_ids[static_cast<std::size_t>(i)],
                                    table.individual_ids[static_cast<std::size_t>(i)],
                                    table.call_types[static_cast<std::size_t>(i)]};
    for (int j = 0; j < d; ++j) row.push_back(format_double(table.X(i, j)));
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);
}

FeatureTable load_features_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  if (csv.header.size() < 4 || csv.header[0] != "snippet_id" ||
      csv.header[1] != "individual_id" || csv.header[2] != "call_type") {
    throw std::runtime_error("feature CSV has wrong header: " + path.string());
  }
  if (csv.rows.empty()) {
    throw std::runtime_error("feature CSV has no rows: " + path.string());
  }
  const int d = static_cast<int>(csv.header.size()) - 3;
  FeatureTable table;
  table.X.resize(static_cast<Eigen::Index>(csv.rows.size()), d);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    table.snippet_ids.push_back(row[0]);
    table.individual_ids.push_back(row[1]);
    table.call_types.push_back(row[2]);
    for (int j = 0; j < d; ++j) {
      table.X(static_cast<Eigen::Index>(i), j) =
          parse_double(row[static_cast<std::size_t>(j) + 3], "feature value");
    }
  }
  return table;
}

ClassMap class_map(const std::vector<std::string>& ids) {
  ClassMap map;
  std::unordered_map<std::string, int> index;
  for (const auto& id : ids) {
    auto [it, inserted] = index.emplace(id, static_cast<int>(map.classes.size()));
    if (inserted) map.classes.push_back(id);
    map.labels.push_back(it->second);
  }
  return map;
}

}  // namespace voiceprint
