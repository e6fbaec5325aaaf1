// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace voiceprint {

// Shortest decimal string that round-trips the double exactly. Used for every
// numeric value we serialize, so reruns produce byte-identical files.
std::string format_double(double value);

// Splits one CSV line on commas. Fields in this project never contain commas,
// quotes or newlines, so no quoting layer is needed.
std::vector<std::string> split_csv_line(std::string_view line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a whole CSV file. Throws on a missing file or ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

// Writes header + rows; creates parent directories as needed.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Parses a double, rejecting trailing garbage.
double parse_double(const std::string& text, const std::string& what);

}  // namespace voiceprint
