// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/data/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <set>

#include "qfe/common/error.hpp"

namespace qfe {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Parses exactly `width` digits at s[pos].
std::optional<int> digits(const std::string& s, std::size_t pos, std::size_t width) {
  if (pos + width > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

double scaled(double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }

}  // namespace

const char* column_kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::kNumeric:
      return "numeric";
    case ColumnKind::kCategorical:
      return "categorical";
    case ColumnKind::kTimestamp:
      return "timestamp";
  }
  return "?";
}

ColumnKind parse_column_kind(const std::string& s) {
  if (s == "numeric") return ColumnKind::kNumeric;
  if (s == "categorical") return ColumnKind::kCategorical;
  if (s == "timestamp") return ColumnKind::kTimestamp;
  throw FormatError("unknown column kind '" + s + "'");
}

std::optional<double> parse_number(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  const char* b = s.data();
  if (*b == '+') ++b;
  double v = 0;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> parse_timestamp(const std::string& raw) {
  using namespace std::chrono;
  std::string s = trim(raw);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = digits(s, 0, 4), mo = digits(s, 5, 2), d = digits(s, 8, 2);
  if (!y || !mo || !d) return std::nullopt;
  year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  long secs = 0;
  if (s.size() > 10) {
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto h = digits(s, 11, 2), mi = digits(s, 14, 2), se = digits(s, 17, 2);
    if (s.size() < 19 || s[13] != ':' || s[16] != ':' || !h || !mi || !se) return std::nullopt;
    if (*h > 23 || *mi > 59 || *se > 60) return std::nullopt;
    std::string rest = s.substr(19);
    if (!(rest.empty() || rest == "Z")) return std::nullopt;
    secs = *h * 3600L + *mi * 60L + *se;
  }
  return static_cast<double>(sys_days(ymd).time_since_epoch().count()) * 86400.0 + static_cast<double>(secs);
}

std::optional<int> parse_label(const std::string& cell) {
  std::string s = lower(trim(cell));
  if (s == "1" || s == "1.0" || s == "true" || s == "yes" || s == "default") return 1;
  if (s == "0" || s == "0.0" || s == "false" || s == "no" || s == "non-default" || s == "nondefault") return 0;
  return std::nullopt;
}

RawDataset RawDataset::from_csv(const CsvTable& t, const std::string& label_column) {
  RawDataset ds;
  ds.label_column = label_column;
  const std::size_t li = t.column(label_column);
  if (li == std::string::npos) throw FormatError("dataset has no label column '" + label_column + "'");
  for (const auto& row : t.rows) ds.labels.push_back(row[li]);
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == li) continue;
    RawColumn col;
    col.name = t.header[c];
    bool numeric = true, timestamp = true;
    for (const auto& row : t.rows) {
      col.cells.push_back(row[c]);
      if (!row[c]) continue;
      if (numeric && !parse_number(*row[c])) numeric = false;
      if (timestamp && !parse_timestamp(*row[c])) timestamp = false;
    }
    col.kind = numeric ? ColumnKind::kNumeric : timestamp ? ColumnKind::kTimestamp : ColumnKind::kCategorical;
    ds.columns.push_back(std::move(col));
  }
  return ds;
}

std::size_t FeatureTransform::output_dim() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.kind == ColumnKind::kCategorical ? c.levels.size() : 1;
  return n;
}

std::vector<std::string> FeatureTransform::feature_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::kCategorical) {
      for (const auto& l : c.levels) out.push_back(c.name + "=" + l);
    } else {
      out.push_back(c.name);
    }
  }
  return out;
}

std::vector<double> FeatureTransform::apply(const std::vector<std::string>& header,
                                            const std::vector<CsvCell>& row) const {
  std::vector<double> out;
  out.reserve(output_dim());
  for (const auto& c : columns) {
    auto it = std::find(header.begin(), header.end(), c.name);
    if (it == header.end()) throw FormatError("record is missing column '" + c.name + "'");
    const CsvCell& cell = row.at(static_cast<std::size_t>(it - header.begin()));
    if (!cell) throw FormatError("record has a null in column '" + c.name + "'");
    switch (c.kind) {
      case ColumnKind::kNumeric:
      case ColumnKind::kTimestamp: {
        auto v = c.kind == ColumnKind::kNumeric ? parse_number(*cell) : parse_timestamp(*cell);
        if (!v) throw FormatError("column '" + c.name + "': cannot parse '" + *cell + "'");
        out.push_back(scaled(*v, c.min, c.max));
        break;
      }
      case ColumnKind::kCategorical:
        for (const auto& l : c.levels) out.push_back(*cell == l ? 1.0 : 0.0);
        break;
    }
  }
  return out;
}

RealMatrix CleanDataset::one_hot_labels() const {
  RealMatrix m(labels.size(), 2);
  for (std::size_t i = 0; i < labels.size(); ++i) m(i, static_cast<std::size_t>(labels[i])) = 1.0;
  return m;
}

CleanDataset preprocess(const RawDataset& raw, const CleaningPolicy& policy) {
  const std::size_t nrows = raw.rows();
  for (const auto& c : raw.columns) {
    if (c.cells.size() != nrows) throw FormatError("dataset is not rectangular: column '" + c.name + "'");
  }

  // (a) null-heavy columns, then rows with any remaining null.
  std::vector<const RawColumn*> cols;
  for (const auto& c : raw.columns) {
    std::size_t nulls = std::count_if(c.cells.begin(), c.cells.end(), [](const CsvCell& v) { return !v; });
    double frac = nrows ? static_cast<double>(nulls) / static_cast<double>(nrows) : 1.0;
    if (frac <= policy.null_column_threshold) cols.push_back(&c);
  }
  std::vector<std::size_t> keep;
  std::vector<int> labels_all(nrows, -1);
  for (std::size_t r = 0; r < nrows; ++r) {
    if (!raw.labels[r]) continue;
    auto lab = parse_label(*raw.labels[r]);
    if (!lab) throw FormatError("row " + std::to_string(r) + ": unrecognized label '" + *raw.labels[r] + "'");
    labels_all[r] = *lab;
    bool ok = std::all_of(cols.begin(), cols.end(), [&](const RawColumn* c) { return c->cells[r].has_value(); });
    if (ok) keep.push_back(r);
  }

  // Parse numeric and timestamp cells once.
  std::vector<std::vector<double>> values(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c]->kind == ColumnKind::kCategorical) continue;
    values[c].assign(nrows, 0.0);
    for (std::size_t r : keep) {
      const std::string& cell = *cols[c]->cells[r];
      auto v = cols[c]->kind == ColumnKind::kNumeric ? parse_number(cell) : parse_timestamp(cell);
      if (!v) throw FormatError("column '" + cols[c]->name + "': cannot parse '" + cell + "'");
      values[c][r] = *v;
    }
  }

  // (b) outliers on numeric features.
  if (!keep.empty()) {
    std::vector<bool> drop(nrows, false);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c]->kind != ColumnKind::kNumeric) continue;
      double mean = 0.0;
      for (std::size_t r : keep) mean += values[c][r];
      mean /= static_cast<double>(keep.size());
      double var = 0.0;
      for (std::size_t r : keep) var += (values[c][r] - mean) * (values[c][r] - mean);
      double sd = std::sqrt(var / static_cast<double>(keep.size()));
      if (sd == 0.0) continue;
      for (std::size_t r : keep) {
        if (std::abs(values[c][r] - mean) > policy.outlier_sigma * sd) drop[r] = true;
      }
    }
    std::erase_if(keep, [&](std::size_t r) { return drop[r]; });
  }
  if (keep.empty()) throw DegenerateDatasetError("no rows survive cleaning");

  // (c)-(e) timestamps are already epochs; scale and expand.
  CleanDataset out;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    ColumnTransform t;
    t.name = cols[c]->name;
    t.kind = cols[c]->kind;
    if (t.kind == ColumnKind::kCategorical) {
      std::set<std::string> levels;
      for (std::size_t r : keep) levels.insert(*cols[c]->cells[r]);
      t.levels.assign(levels.begin(), levels.end());
    } else {
      t.min = t.max = values[c][keep.front()];
      for (std::size_t r : keep) {
        t.min = std::min(t.min, values[c][r]);
        t.max = std::max(t.max, values[c][r]);
      }
    }
    out.transform.columns.push_back(std::move(t));
  }
  const std::size_t n = out.transform.output_dim();
  if (n == 0) throw DegenerateDatasetError("no feature columns survive cleaning");

  out.features = RealMatrix(keep.size(), n);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const std::size_t r = keep[i];
    std::size_t f = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& t = out.transform.columns[c];
      if (t.kind == ColumnKind::kCategorical) {
        for (const auto& l : t.levels) out.features(i, f++) = (*cols[c]->cells[r] == l) ? 1.0 : 0.0;
      } else {
        out.features(i, f++) = scaled(values[c][r], t.min, t.max);
      }
    }
    out.labels.push_back(labels_all[r]);
  }
  out.feature_names = out.transform.feature_names();
  return out;
}

}  // namespace qfe
