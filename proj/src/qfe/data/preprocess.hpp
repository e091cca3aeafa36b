// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Dataset cleaning: null handling, outlier removal, timestamp conversion,
// min-max scaling and one-hot expansion of categorical columns.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfe/common/matrix.hpp"
#include "qfe/data/csv.hpp"

namespace qfe {

enum class ColumnKind { kNumeric, kCategorical, kTimestamp };

const char* column_kind_name(ColumnKind k);
ColumnKind parse_column_kind(const std::string& s);

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<CsvCell> cells;
};

struct RawDataset {
  std::vector<RawColumn> columns;
  std::vector<CsvCell> labels;  // raw label cells, same length as every column
  std::string label_column;

  std::size_t rows() const { return labels.size(); }

  // Splits off label_column and infers each remaining column's kind:
  // numeric if every non-null cell parses as a number, timestamp if every
  // non-null cell is an ISO-8601 date or date-time, categorical otherwise.
  static RawDataset from_csv(const CsvTable& t, const std::string& label_column);
};

struct CleaningPolicy {
  std::string label_column = "default";
  double null_column_threshold = 0.5;  // drop columns with a larger null fraction
  double outlier_sigma = 3.0;          // drop rows beyond this many std devs
};

// How one source column maps to output features. Kept so that records
// scored later go through exactly the training-time transformation.
struct ColumnTransform {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  double min = 0.0;                 // numeric and timestamp
  double max = 0.0;
  std::vector<std::string> levels;  // categorical, sorted
};

struct FeatureTransform {
  std::vector<ColumnTransform> columns;

  std::size_t output_dim() const;
  std::vector<std::string> feature_names() const;
  // Maps one record (header-aligned cells) to scaled features. Values are
  // not clipped; unseen categorical levels map to all-zero indicators.
  // Throws FormatError on nulls or unparseable cells.
  std::vector<double> apply(const std::vector<std::string>& header, const std::vector<CsvCell>& row) const;
};

struct CleanDataset {
  RealMatrix features;             // rows x n
  std::vector<int> labels;         // class index per row, 0 or 1
  std::vector<std::string> feature_names;
  FeatureTransform transform;

  std::size_t rows() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
  RealMatrix one_hot_labels() const;  // rows x 2
};

// Throws DegenerateDatasetError if no rows or no features survive.
CleanDataset preprocess(const RawDataset& raw, const CleaningPolicy& policy = {});

// Class index for a label cell: 1/0, true/false, yes/no, default/non-default.
std::optional<int> parse_label(const std::string& cell);

std::optional<double> parse_number(const std::string& s);
// Seconds since the Unix epoch, UTC.
std::optional<double> parse_timestamp(const std::string& s);

}  // namespace qfe
