// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/data/csv.hpp"

#include "qfe/common/bytes.hpp"
#include "qfe/common/error.hpp"

namespace qfe {
namespace {

std::vector<std::vector<CsvCell>> tokenize(std::string_view s) {
  std::vector<std::vector<CsvCell>> rows;
  std::vector<CsvCell> row;
  std::string cell;
  bool quoted = false;    // cell started with a quote
  bool in_quotes = false;
  bool any = false;       // current row has content
  std::size_t line = 1;

  auto end_cell = [&] {
    if (quoted || !cell.empty()) {
      row.emplace_back(std::move(cell));
    } else {
      row.emplace_back(std::nullopt);
    }
    cell.clear();
    quoted = false;
  };
  auto end_row = [&] {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
    any = false;
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty()) throw FormatError("csv line " + std::to_string(line) + ": stray quote");
        quoted = in_quotes = any = true;
        break;
      case ',':
        end_cell();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !cell.empty() || !row.empty()) end_row();
        ++line;
        break;
      default:
        cell.push_back(c);
        any = true;
    }
  }
  if (in_quotes) throw FormatError("csv: unterminated quoted field");
  if (any || !cell.empty() || !row.empty()) end_row();
  return rows;
}

std::string quote(const std::string& v) {
  bool needs = v.empty() || v.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::string::npos;
}

CsvTable parse_csv(std::string_view text) {
  auto rows = tokenize(text);
  if (rows.empty()) throw FormatError("csv: missing header row");
  CsvTable t;
  for (auto& h : rows[0]) {
    if (!h) throw FormatError("csv: empty header cell");
    t.header.push_back(*h);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != t.header.size()) {
      throw FormatError("csv row " + std::to_string(r) + ": expected " + std::to_string(t.header.size()) +
                        " cells, got " + std::to_string(rows[r].size()));
    }
    t.rows.push_back(std::move(rows[r]));
  }
  return t;
}

CsvTable read_csv(const std::string& path) {
  Bytes b = read_file(path);
  return parse_csv(std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
}

std::string format_csv(const CsvTable& t) {
  std::string out;
  auto emit = [&](const std::vector<CsvCell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      if (cells[i]) out += quote(*cells[i]);
    }
    out.push_back('\n');
  };
  std::vector<CsvCell> h(t.header.begin(), t.header.end());
  emit(h);
  for (const auto& r : t.rows) emit(r);
  return out;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::string s = format_csv(t);
  write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace qfe
