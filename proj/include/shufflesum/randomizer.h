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

// Local randomizer: generalized randomized response and the per-user vector
// encoder (coordinate sampling, stochastic fixed-point rounding, and a
// randomized response per reported coordinate).

#ifndef SHUFFLESUM_RANDOMIZER_H_
#define SHUFFLESUM_RANDOMIZER_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflesum/params.h"

namespace shufflesum {

// All randomness flows through an explicitly passed engine so that runs are
// reproducible from a seed.
using Rng = std::mt19937_64;

// Derives an independent engine seed from a master seed and a path of stream
// indices (for example point index and trial index) through std::seed_seq.
uint64_t DeriveSeed(uint64_t master_seed, std::span<const uint64_t> path);

// One reported coordinate. `coordinate` is zero-based, in [0, d).
struct MessageEntry {
  int coordinate = 0;
  int value = 0;

  friend bool operator==(const MessageEntry&, const MessageEntry&) = default;
  friend auto operator<=>(const MessageEntry&, const MessageEntry&) = default;
};

// A single user's submission: t entries with distinct coordinates and values
// in {0, ..., k}. Coordinates travel in the clear; the shuffler only hides
// which user sent the message.
struct Message {
  std::vector<MessageEntry> entries;

  friend bool operator==(const Message&, const Message&) = default;
  friend auto operator<=>(const Message&, const Message&) = default;
};

// floor(x k) + Bernoulli(x k - floor(x k)). Unbiased: E[result] = x k.
absl::StatusOr<int> EncodeFixedPoint(double x, int k, Rng& rng);

// Returns `value` with probability 1 - gamma, otherwise a uniform draw from
// {0, ..., domain_size - 1}.
absl::StatusOr<int> RandomizedResponse(int value, int domain_size, double gamma,
                                       Rng& rng);

// Samples `count` distinct indices uniformly from [0, population) (Floyd's
// algorithm). Order of the result is unspecified.
std::vector<int> SampleWithoutReplacement(int population, int count, Rng& rng);

// The full local randomizer for one user's vector `x` (length d, entries in
// [0, 1]). Randomized response runs over the k + 1 symbols {0, ..., k}.
absl::StatusOr<Message> RandomizeVector(std::span<const double> x,
                                        const ProtocolParams& params, Rng& rng);

}  // namespace shufflesum

#endif  // SHUFFLESUM_RANDOMIZER_H_
