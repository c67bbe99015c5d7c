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

#include "shufflesum/shuffle_analyze.h"

#include <algorithm>

#include "absl/strings/str_format.h"

namespace shufflesum {

ShuffledBatch Shuffle(std::vector<Message> messages, Rng& rng) {
  std::shuffle(messages.begin(), messages.end(), rng);
  return ShuffledBatch{std::move(messages)};
}

absl::StatusOr<std::vector<CoordinateAggregate>> Aggregate(
    const ShuffledBatch& batch, const ProtocolParams& params) {
  if (absl::Status s = ValidateParams(params); !s.ok()) return s;
  // Integer totals keep the aggregate independent of message order.
  std::vector<int64_t> totals(params.d, 0);
  std::vector<int64_t> counts(params.d, 0);
  for (size_t m = 0; m < batch.messages.size(); ++m) {
    const Message& message = batch.messages[m];
    if (static_cast<int>(message.entries.size()) != params.t) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "malformed message %d: %d entries, expected t=%d", m,
          message.entries.size(), params.t));
    }
    for (size_t j = 0; j < message.entries.size(); ++j) {
      const MessageEntry& entry = message.entries[j];
      if (entry.coordinate < 0 || entry.coordinate >= params.d) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "malformed message %d: coordinate %d outside [0, %d)", m,
            entry.coordinate, params.d));
      }
      if (entry.value < 0 || entry.value > params.k) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "malformed message %d: value %d outside {0, ..., %d}", m,
            entry.value, params.k));
      }
      for (size_t i = 0; i < j; ++i) {
        if (message.entries[i].coordinate == entry.coordinate) {
          return absl::InvalidArgumentError(absl::StrFormat(
              "malformed message %d: coordinate %d repeated", m,
              entry.coordinate));
        }
      }
      totals[entry.coordinate] += entry.value;
      ++counts[entry.coordinate];
    }
  }
  std::vector<CoordinateAggregate> out(params.d);
  for (int l = 0; l < params.d; ++l) {
    out[l].coordinate = l;
    out[l].sum = static_cast<double>(totals[l]) / params.k;
    out[l].count = counts[l];
  }
  return out;
}

absl::StatusOr<double> Debias(const CoordinateAggregate& aggregate,
                              double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in [0, 1]");
  }
  if (gamma == 1.0) {
    return absl::FailedPreconditionError(
        "infeasible parameters: gamma = 1 leaves nothing to debias");
  }
  return (aggregate.sum - 0.5 * gamma * static_cast<double>(aggregate.count)) /
         (1.0 - gamma);
}

absl::StatusOr<EstimateVector> Analyze(const ShuffledBatch& batch,
                                       const ProtocolParams& params) {
  absl::StatusOr<std::vector<CoordinateAggregate>> aggregates =
      Aggregate(batch, params);
  if (!aggregates.ok()) return aggregates.status();
  EstimateVector est;
  est.values.reserve(params.d);
  est.counts.reserve(params.d);
  for (const CoordinateAggregate& agg : *aggregates) {
    absl::StatusOr<double> z = Debias(agg, params.gamma);
    if (!z.ok()) return z.status();
    est.values.push_back(*z);
    est.counts.push_back(agg.count);
  }
  return est;
}

std::vector<std::optional<double>> EstimateAverage(const EstimateVector& est) {
  std::vector<std::optional<double>> out(est.values.size());
  for (size_t l = 0; l < est.values.size(); ++l) {
    if (est.counts[l] > 0) {
      out[l] = est.values[l] / static_cast<double>(est.counts[l]);
    }
  }
  return out;
}

}  // namespace shufflesum
