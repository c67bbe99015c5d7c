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

// Trusted shuffler simulation and the analyzer that turns a shuffled batch of
// messages into debiased per-coordinate sum estimates.

#ifndef SHUFFLESUM_SHUFFLE_ANALYZE_H_
#define SHUFFLESUM_SHUFFLE_ANALYZE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflesum/params.h"
#include "shufflesum/randomizer.h"

namespace shufflesum {

// Messages in a uniformly random order with no user attribution.
struct ShuffledBatch {
  std::vector<Message> messages;
};

ShuffledBatch Shuffle(std::vector<Message> messages, Rng& rng);

// What the analyzer sees for one coordinate: the sum of received y / k and
// the number of received values.
struct CoordinateAggregate {
  int coordinate = 0;
  double sum = 0.0;
  int64_t count = 0;
};

// Per-coordinate aggregation. Coordinates nobody reported come back as
// (sum 0, count 0). InvalidArgument on messages that do not conform to
// `params` (wrong length, repeated or out-of-range coordinates, values
// outside {0, ..., k}).
absl::StatusOr<std::vector<CoordinateAggregate>> Aggregate(
    const ShuffledBatch& batch, const ProtocolParams& params);

// (sum - (gamma / 2) count) / (1 - gamma). The uniform blanket over
// {0, ..., k} has mean exactly k / 2, so gamma / 2 per received value is the
// exact expected blanket contribution after dividing by k.
absl::StatusOr<double> Debias(const CoordinateAggregate& aggregate,
                              double gamma);

struct EstimateVector {
  std::vector<double> values;   // debiased sum estimates, length d
  std::vector<int64_t> counts;  // received values per coordinate
};

absl::StatusOr<EstimateVector> Analyze(const ShuffledBatch& batch,
                                       const ProtocolParams& params);

// Per-coordinate mean estimate values[l] / counts[l]. Coordinates with no
// received values are std::nullopt rather than an imputed 0.
std::vector<std::optional<double>> EstimateAverage(const EstimateVector& est);

}  // namespace shufflesum

#endif  // SHUFFLESUM_SHUFFLE_ANALYZE_H_
