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
#include "qss/types.hpp"

#include "qss/error.hpp"

#include <array>
#include <charconv>

namespace qss {

std::string PartyId::label() const {
    if (is_alice()) {
        return "alice";
    }
    return "r" + std::to_string(index_);
}

std::string PartyId::display_name() const {
    static constexpr std::array<const char *, 6> names{"Bob",   "Charlie", "Dick",
                                                       "Emily", "Frank",   "Gina"};
    if (is_alice()) {
        return "Alice";
    }
    if (index_ >= 0 && static_cast<std::size_t>(index_) < names.size()) {
        return names[static_cast<std::size_t>(index_)];
    }
    return "Receiver " + std::to_string(index_);
}

std::optional<PartyId> PartyId::parse(const std::string &text) {
    if (text == "alice") {
        return alice();
    }
    if (text.size() < 2 || text[0] != 'r') {
        return std::nullopt;
    }
    int index = 0;
    const char *first = text.data() + 1;
    const char *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, index);
    if (ec != std::errc{} || ptr != last || index < 0) {
        return std::nullopt;
    }
    return receiver(index);
}

Coalition full_coalition(int num_receivers) {
    Coalition c;
    for (int i = 0; i < num_receivers; ++i) {
        c.insert(i);
    }
    return c;
}

std::string_view to_string(Phase phase) {
    switch (phase) {
    case Phase::Distribution:
        return "distribution";
    case Phase::Return:
        return "return";
    case Phase::Teleport:
        return "teleport";
    }
    return "?";
}

std::string to_string(const Segment &segment) {
    return segment.from.label() + "->" + segment.to.label() + "/" +
           std::string(to_string(segment.phase));
}

std::string_view to_string(BasisStrategy strategy) {
    switch (strategy) {
    case BasisStrategy::UniformRandom:
        return "uniform";
    case BasisStrategy::AlwaysRectilinear:
        return "rectilinear";
    case BasisStrategy::AlwaysDiagonal:
        return "diagonal";
    }
    return "?";
}

std::optional<Segment> attacked_segment(const AttackModel &model) {
    if (const auto *ir = std::get_if<InterceptResend>(&model)) {
        return ir->segment;
    }
    if (const auto *dr = std::get_if<DishonestReceiver>(&model)) {
        return dr->segment;
    }
    return std::nullopt;
}

BitString parse_bits(const std::string &text) {
    BitString bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw Error(ErrorCode::InvalidArgument,
                        std::string("bit string may only contain 0 and 1, found '") + c + "'");
        }
        bits.push_back(c - '0');
    }
    return bits;
}

std::string format_bits(const BitString &bits) {
    std::string s;
    s.reserve(bits.size());
    for (int b : bits) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

} // namespace qss
