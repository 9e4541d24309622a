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
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qss {

inline constexpr int kTranscriptSchemaVersion = 1;

enum class StepTag {
    Prepare,
    Encrypt,
    Transfer,
    Disclose,
    Check,
    Encode,
    Decode,
    Auth,
    // teleportation-based sharing
    PairCheck,
    Teleport,
    Reconstruct,
};

std::string_view to_string(StepTag tag);

using PayloadValue = std::variant<std::int64_t, double, bool, std::string>;
using Payload = std::vector<std::pair<std::string, PayloadValue>>;

struct Event {
    std::uint64_t seq = 0;
    StepTag step = StepTag::Prepare;
    std::string party;
    int photon_position = -1; ///< -1 when the event concerns a whole batch
    Payload payload;
};

/// Ordered event log of one run. A disabled transcript drops events but
/// still counts them, so seq numbers do not depend on recording.
class Transcript {
  public:
    explicit Transcript(bool enabled = true) : enabled_(enabled) {}

    void add(StepTag step, std::string party, int photon_position, Payload payload);

    [[nodiscard]] bool enabled() const noexcept { return enabled_; }
    [[nodiscard]] const std::vector<Event> &events() const noexcept { return events_; }
    [[nodiscard]] std::uint64_t event_count() const noexcept { return next_seq_; }

    /// Maps a party label (or a string holding labels) to the caller's naming.
    using Relabel = std::function<std::string(const std::string &)>;

    /// Appends the events of `other` (renumbered to follow ours), tagging
    /// each with `scope` in its payload. `relabel`, when set, rewrites the
    /// party and every string payload value.
    void append(const Transcript &other, const std::string &scope, const Relabel &relabel = {});

    /// One JSON object per line, each carrying `trial`.
    [[nodiscard]] std::string to_jsonl(std::uint64_t trial) const;

    /// First line of every transcript file, newline included.
    static std::string header_line();

  private:
    bool enabled_;
    std::uint64_t next_seq_ = 0;
    std::vector<Event> events_;
};

} // namespace qss
