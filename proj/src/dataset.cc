// Copyright 2026 The shufflesum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shufflesum/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>

#include "absl/strings/ascii.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"

namespace shufflesum {
namespace {

std::optional<double> ParseCell(absl::string_view cell) {
  cell = absl::StripAsciiWhitespace(cell);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

DatasetMatrix::DatasetMatrix(int rows, int cols, std::vector<double> values,
                             std::vector<std::string> provenance)
    : rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      provenance_(std::move(provenance)) {}

bool DatasetMatrix::InUnitRange() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

absl::StatusOr<Normalization> ParseNormalization(const std::string& name) {
  if (name == "clamp") return Normalization::kClamp;
  if (name == "minmax") return Normalization::kMinMax;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown normalization '%s' (clamp|minmax)", name));
}

absl::StatusOr<DatasetMatrix> IngestCsv(const std::string& path,
                                        const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrFormat("cannot open dataset '%s'", path));
  }
  std::vector<double> values;
  int cols = -1;
  int rows = 0;
  int line_number = 0;
  bool header_skipped = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(view, ',');
    std::vector<double> parsed;
    parsed.reserve(cells.size());
    std::optional<size_t> bad_cell;
    for (size_t c = 0; c < cells.size(); ++c) {
      std::optional<double> v = ParseCell(cells[c]);
      if (!v) {
        if (!bad_cell) bad_cell = c;
        continue;
      }
      parsed.push_back(*v);
    }
    if (bad_cell) {
      if (rows == 0 && !header_skipped && parsed.empty()) {
        header_skipped = true;
        continue;
      }
      return absl::DataLossError(absl::StrFormat(
          "%s:%d: column %d: cannot parse '%s' as a number", path, line_number,
          *bad_cell + 1, cells[*bad_cell]));
    }
    if (cols < 0) {
      cols = static_cast<int>(parsed.size());
    } else if (static_cast<int>(parsed.size()) != cols) {
      return absl::DataLossError(absl::StrFormat(
          "%s:%d: expected %d columns, found %d", path, line_number, cols,
          parsed.size()));
    }
    if (options.drop_label) parsed.pop_back();
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("dataset '%s' has no data rows", path));
  }
  if (options.drop_label) --cols;
  if (cols < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("dataset '%s' has no feature columns", path));
  }

  std::vector<std::string> provenance;
  provenance.push_back(absl::StrFormat("source %s: %d rows x %d columns%s%s",
                                       path, rows, cols,
                                       header_skipped ? ", header skipped" : "",
                                       options.drop_label ? ", label dropped" : ""));
  if (options.normalize == Normalization::kMinMax) {
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double min_v = *lo;
    const double range = *hi - *lo;
    for (double& v : values) v = range > 0.0 ? (v - min_v) / range : 0.0;
    provenance.push_back(absl::StrFormat("min-max normalized from [%g, %g]",
                                         min_v, min_v + range));
  } else {
    int64_t clamped = 0;
    for (double& v : values) {
      if (v < 0.0 || v > 1.0) {
        v = std::clamp(v, 0.0, 1.0);
        ++clamped;
      }
    }
    if (clamped > 0) {
      provenance.push_back(
          absl::StrFormat("clamped %d values into [0, 1]", clamped));
    }
  }
  DatasetMatrix data(rows, cols, std::move(values), std::move(provenance));
  if (options.target_rows > 0 || options.target_cols > 0) {
    return Reshape(data,
                   options.target_rows > 0 ? options.target_rows : data.rows(),
                   options.target_cols > 0 ? options.target_cols : data.cols());
  }
  return data;
}

DatasetMatrix Reshape(const DatasetMatrix& data, int rows, int cols) {
  if (rows == data.rows() && cols == data.cols()) return data;
  std::vector<double> values(static_cast<size_t>(rows) * cols, 0.0);
  const int copy_cols = std::min(cols, data.cols());
  for (int i = 0; i < rows; ++i) {
    std::span<const double> src = data.row(i % data.rows());
    std::copy_n(src.begin(), copy_cols,
                values.begin() + static_cast<size_t>(i) * cols);
  }
  std::vector<std::string> provenance = data.provenance();
  if (rows > data.rows()) {
    provenance.push_back(absl::StrFormat(
        "rows recycled cyclically from %d to %d", data.rows(), rows));
  } else if (rows < data.rows()) {
    provenance.push_back(
        absl::StrFormat("rows truncated from %d to %d", data.rows(), rows));
  }
  if (cols > data.cols()) {
    provenance.push_back(absl::StrFormat("columns zero-padded from %d to %d",
                                         data.cols(), cols));
  } else if (cols < data.cols()) {
    provenance.push_back(absl::StrFormat("columns truncated from %d to %d",
                                         data.cols(), cols));
  }
  return DatasetMatrix(rows, cols, std::move(values), std::move(provenance));
}

DatasetMatrix SyntheticHeartbeats(int rows, int cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> beat_length(60, 179);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<double> values(static_cast<size_t>(rows) * cols, 0.0);
  for (int i = 0; i < rows; ++i) {
    const double length = beat_length(rng);
    const double baseline = 0.03 + 0.17 * unit(rng);
    const double r_decay = 1.5 + 2.0 * unit(rng);
    const double t_amp = 0.1 + 0.35 * unit(rng);
    const double t_pos = length * (0.3 + 0.2 * unit(rng));
    const double t_width = 5.0 + 8.0 * unit(rng);
    const double next_r = 0.6 + 0.4 * unit(rng);
    double* row = values.data() + static_cast<size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) {
      // Always draw the noise so every row consumes the same stream length.
      const double jitter = noise(rng);
      const double x = static_cast<double>(j);
      if (x > length + 2.0) continue;
      const double r = std::exp(-x / r_decay);
      const double tz = (x - t_pos) / t_width;
      const double nz = (x - length) / 1.5;
      const double v = baseline * (1.0 - r) + r +
                       t_amp * std::exp(-0.5 * tz * tz) +
                       next_r * std::exp(-0.5 * nz * nz) + jitter;
      row[j] = std::clamp(v, 0.0, 1.0);
    }
  }
  return DatasetMatrix(
      rows, cols, std::move(values),
      {absl::StrFormat("synthetic heartbeats: %d rows x %d columns, seed %d",
                       rows, cols, seed)});
}

}  // namespace shufflesum
