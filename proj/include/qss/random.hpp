// Copyright 2026 The qss Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qss {

/**
 * @brief Seeded pseudo-random stream.
 *
 * Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
 * derives integers and reals from the raw 64-bit words with our own
 * arithmetic, so draws are identical across standard library vendors.
 */
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Uniform real in [0, 1) with 53 bits of resolution.
    double uniform_real() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform_real() < p; }

    /// Standard normal variate (Box-Muller, one value per call).
    double normal();

  private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a of a label.
std::uint64_t label_hash(std::string_view label);

/// Seed of trial `trial` under `master_seed`: mix64(master_seed + trial).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial);

/// Seed of the stream owned by `party_label` inside a run seeded with `run_seed`:
/// mix64(run_seed ^ label_hash(party_label)).
std::uint64_t party_seed(std::uint64_t run_seed, std::string_view party_label);

} // namespace qss
