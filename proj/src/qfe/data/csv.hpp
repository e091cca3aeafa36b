// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal RFC 4180 CSV: comma separator, double-quote quoting, header row.
// An unquoted empty cell is a null.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfe {

using CsvCell = std::optional<std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  // Index of a header column, or npos.
  std::size_t column(std::string_view name) const;
};

// Throws FormatError on ragged rows or unterminated quotes.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

std::string format_csv(const CsvTable& t);
void write_csv(const std::string& path, const CsvTable& t);

}  // namespace qfe
