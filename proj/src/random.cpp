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
#include "qss/random.hpp"

#include "qss/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qss {

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "uniform_index: empty range");
    }
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x = engine_();
    while (x > limit) {
        x = engine_();
    }
    return x % n;
}

double RandomStream::normal() {
    double u1 = uniform_real();
    while (u1 <= 0.0) {
        u1 = uniform_real();
    }
    const double u2 = uniform_real();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t label_hash(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
    return mix64(master_seed + trial);
}

std::uint64_t party_seed(std::uint64_t run_seed, std::string_view party_label) {
    return mix64(run_seed ^ label_hash(party_label));
}

} // namespace qss
