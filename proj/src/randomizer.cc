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

#include "shufflesum/randomizer.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace shufflesum {

uint64_t DeriveSeed(uint64_t master_seed, std::span<const uint64_t> path) {
  std::vector<uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&words](uint64_t v) {
    words.push_back(static_cast<uint32_t>(v));
    words.push_back(static_cast<uint32_t>(v >> 32));
  };
  push(master_seed);
  for (uint64_t p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<uint64_t>(out[1]) << 32) | out[0];
}

absl::StatusOr<int> EncodeFixedPoint(double x, int k, Rng& rng) {
  if (!(x >= 0.0 && x <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("coordinate value %g outside [0, 1]", x));
  }
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  const double scaled = x * k;
  const double base = std::floor(scaled);
  const double frac = scaled - base;
  int encoded = static_cast<int>(base);
  if (frac > 0.0) {
    std::bernoulli_distribution round_up(frac);
    if (round_up(rng)) ++encoded;
  }
  return encoded;
}

absl::StatusOr<int> RandomizedResponse(int value, int domain_size, double gamma,
                                       Rng& rng) {
  if (domain_size < 1) {
    return absl::InvalidArgumentError("domain size must be >= 1");
  }
  if (value < 0 || value >= domain_size) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "value %d outside domain {0, ..., %d}", value, domain_size - 1));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in [0, 1]");
  }
  std::bernoulli_distribution blanket(gamma);
  if (!blanket(rng)) return value;
  std::uniform_int_distribution<int> uniform(0, domain_size - 1);
  return uniform(rng);
}

std::vector<int> SampleWithoutReplacement(int population, int count, Rng& rng) {
  std::vector<int> picked;
  picked.reserve(count);
  for (int j = population - count; j < population; ++j) {
    std::uniform_int_distribution<int> draw(0, j);
    const int candidate = draw(rng);
    if (std::find(picked.begin(), picked.end(), candidate) == picked.end()) {
      picked.push_back(candidate);
    } else {
      picked.push_back(j);
    }
  }
  return picked;
}

absl::StatusOr<Message> RandomizeVector(std::span<const double> x,
                                        const ProtocolParams& params,
                                        Rng& rng) {
  if (absl::Status s = ValidateParams(params); !s.ok()) return s;
  if (static_cast<int>(x.size()) != params.d) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "input vector has length %d, expected d=%d", x.size(), params.d));
  }
  Message message;
  message.entries.reserve(params.t);
  for (int coordinate : SampleWithoutReplacement(params.d, params.t, rng)) {
    absl::StatusOr<int> encoded = EncodeFixedPoint(x[coordinate], params.k, rng);
    if (!encoded.ok()) return encoded.status();
    absl::StatusOr<int> reported =
        RandomizedResponse(*encoded, params.k + 1, params.gamma, rng);
    if (!reported.ok()) return reported.status();
    message.entries.push_back({coordinate, *reported});
  }
  return message;
}

}  // namespace shufflesum
