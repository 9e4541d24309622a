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
#include "qss/transcript.hpp"

#include <json.hpp>

namespace qss {

using ojson = nlohmann::ordered_json;

std::string_view to_string(StepTag tag) {
    switch (tag) {
    case StepTag::Prepare:
        return "prepare";
    case StepTag::Encrypt:
        return "encrypt";
    case StepTag::Transfer:
        return "transfer";
    case StepTag::Disclose:
        return "disclose";
    case StepTag::Check:
        return "check";
    case StepTag::Encode:
        return "encode";
    case StepTag::Decode:
        return "decode";
    case StepTag::Auth:
        return "auth";
    case StepTag::PairCheck:
        return "pair_check";
    case StepTag::Teleport:
        return "teleport";
    case StepTag::Reconstruct:
        return "reconstruct";
    }
    return "?";
}

void Transcript::add(StepTag step, std::string party, int photon_position, Payload payload) {
    const std::uint64_t seq = next_seq_++;
    if (!enabled_) {
        return;
    }
    events_.push_back(Event{seq, step, std::move(party), photon_position, std::move(payload)});
}

void Transcript::append(const Transcript &other, const std::string &scope,
                        const Relabel &relabel) {
    for (const auto &e : other.events_) {
        Payload p = e.payload;
        if (relabel) {
            for (auto &[key, value] : p) {
                if (auto *text = std::get_if<std::string>(&value)) {
                    *text = relabel(*text);
                }
            }
        }
        p.emplace_back("scope", scope);
        add(e.step, relabel ? relabel(e.party) : e.party, e.photon_position, std::move(p));
    }
    if (!other.enabled_) {
        next_seq_ += other.next_seq_;
    }
}

std::string Transcript::to_jsonl(std::uint64_t trial) const {
    std::string out;
    for (const auto &e : events_) {
        ojson line;
        line["trial"] = trial;
        line["seq"] = e.seq;
        line["step"] = std::string(to_string(e.step));
        line["party"] = e.party;
        if (e.photon_position >= 0) {
            line["photon"] = e.photon_position;
        } else {
            line["photon"] = nullptr;
        }
        ojson payload = ojson::object();
        for (const auto &[key, value] : e.payload) {
            std::visit([&](const auto &v) { payload[key] = v; }, value);
        }
        line["payload"] = std::move(payload);
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::string Transcript::header_line() {
    ojson h;
    h["schema"] = "qss-transcript";
    h["version"] = kTranscriptSchemaVersion;
    h["fields"] = {"trial", "seq", "step", "party", "photon", "payload"};
    return h.dump() + "\n";
}

} // namespace qss
