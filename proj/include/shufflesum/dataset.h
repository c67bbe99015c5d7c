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

// Dataset ingestion: CSV parsing, normalization into [0, 1], reshaping to
// the requested (n, d), plus a deterministic synthetic heartbeat generator
// used when no dataset file is supplied.

#ifndef SHUFFLESUM_DATASET_H_
#define SHUFFLESUM_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace shufflesum {

// Row-major matrix of user vectors with a log of every transformation
// applied on the way in.
class DatasetMatrix {
 public:
  DatasetMatrix() = default;
  DatasetMatrix(int rows, int cols, std::vector<double> values,
                std::vector<std::string> provenance = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::span<const double> row(int i) const {
    return {values_.data() + static_cast<size_t>(i) * cols_,
            static_cast<size_t>(cols_)};
  }
  std::span<const double> values() const { return values_; }
  const std::vector<std::string>& provenance() const { return provenance_; }
  void AddProvenance(std::string note) { provenance_.push_back(std::move(note)); }

  // True when every entry lies in [0, 1].
  bool InUnitRange() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
  std::vector<std::string> provenance_;
};

enum class Normalization { kClamp, kMinMax };

absl::StatusOr<Normalization> ParseNormalization(const std::string& name);

struct IngestOptions {
  bool drop_label = false;  // drop the trailing column
  Normalization normalize = Normalization::kClamp;
  int target_rows = 0;  // 0 keeps the file's row count
  int target_cols = 0;  // 0 keeps the file's column count
};

// Reads comma-separated reals. A first line with no numeric cell is treated
// as a header. DataLoss on an unparseable cell or ragged row (with the
// 1-based row and column), NotFound when the file cannot be opened,
// InvalidArgument on an empty file.
absl::StatusOr<DatasetMatrix> IngestCsv(const std::string& path,
                                        const IngestOptions& options);

// Rows are truncated or recycled cyclically to reach `rows`; columns are
// truncated or zero-padded to reach `cols`.
DatasetMatrix Reshape(const DatasetMatrix& data, int rows, int cols);

// Heartbeat-shaped rows in [0, 1]: a decaying R peak at the start, a low
// baseline, a T-wave bump, the next R peak, then zero padding. Mirrors the
// layout of per-beat normalized ECG segments.
DatasetMatrix SyntheticHeartbeats(int rows, int cols, uint64_t seed);

}  // namespace shufflesum

#endif  // SHUFFLESUM_DATASET_H_
