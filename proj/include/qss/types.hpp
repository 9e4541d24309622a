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
/**
 * @file
 * Protocol vocabulary shared by the engine, the adversaries and the harness.
 *
 * Receivers are numbered 0..num_receivers-1 along the photon chain:
 * receiver 0 (Bob) prepares the batch, receivers 1..num_receivers-1 each
 * apply one encryption pass, and the last one (Zach) hands the batch to
 * Alice. A three-party run (Alice, Bob, Charlie) has num_receivers = 2.
 */
#pragma once

#include "qss/qstate.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace qss {

class PartyId {
  public:
    enum class Kind { Alice, Receiver };

    static constexpr PartyId alice() { return PartyId(Kind::Alice, -1); }
    static constexpr PartyId receiver(int index) { return PartyId(Kind::Receiver, index); }

    [[nodiscard]] constexpr Kind kind() const { return kind_; }
    [[nodiscard]] constexpr bool is_alice() const { return kind_ == Kind::Alice; }
    [[nodiscard]] constexpr bool is_receiver() const { return kind_ == Kind::Receiver; }
    /// Receiver index; -1 for Alice.
    [[nodiscard]] constexpr int index() const { return index_; }

    /// "alice" or "r<k>"; stable, used in transcripts, configs and seed derivation.
    [[nodiscard]] std::string label() const;
    /// Bob, Charlie, Dick, ... for the first receivers, then "Receiver k".
    [[nodiscard]] std::string display_name() const;

    /// Inverse of label(); nullopt on malformed input.
    static std::optional<PartyId> parse(const std::string &text);

    constexpr auto operator<=>(const PartyId &) const = default;

  private:
    constexpr PartyId(Kind kind, int index) : kind_(kind), index_(index) {}
    Kind kind_;
    int index_;
};

/// Set of receiver indices that pool their secrets. Bob contributes the
/// initial labels, every other receiver his own encryption choices.
using Coalition = std::set<int>;

Coalition full_coalition(int num_receivers);

enum class PhotonRole { Unassigned, Check, Message };

struct AppliedOp {
    PartyId party;
    UnitaryKind kind;
};

struct PhotonRecord {
    int position = 0;
    StateLabel initial_label = StateLabel::H;
    std::vector<AppliedOp> ops_applied;
    PureState current = state_of_label(StateLabel::H);
    PhotonRole role = PhotonRole::Unassigned;
    std::optional<int> encoded_bit;
};

/// Which leg of the run a channel segment belongs to. Distribution covers the
/// receiver chain and the hop to Alice, Return covers Alice -> final holder,
/// Teleport is Bob -> Alice for the travelling half of the EPR pairs.
enum class Phase { Distribution, Return, Teleport };

struct Segment {
    PartyId from = PartyId::alice();
    PartyId to = PartyId::alice();
    Phase phase = Phase::Distribution;

    bool operator==(const Segment &) const = default;
};

std::string to_string(const Segment &segment);
std::string_view to_string(Phase phase);

enum class BasisStrategy { UniformRandom, AlwaysRectilinear, AlwaysDiagonal };

std::string_view to_string(BasisStrategy strategy);

struct NoAttack {};

struct InterceptResend {
    Segment segment;
    BasisStrategy basis_strategy = BasisStrategy::UniformRandom;
};

/// A receiver who intercepts a segment he is not an endpoint of, using his
/// own secret: Bob measures in the basis of the label he prepared, an
/// encryptor strips his own pass (when it has already been applied), measures
/// in a uniformly random basis and puts his pass back.
struct DishonestReceiver {
    PartyId party = PartyId::receiver(0);
    Segment segment;
};

using AttackModel = std::variant<NoAttack, InterceptResend, DishonestReceiver>;

/// Segment targeted by a model; nullopt for NoAttack.
std::optional<Segment> attacked_segment(const AttackModel &model);

struct EveRecord {
    int position = 0;
    Basis measured_basis = Basis::Rectilinear;
    StateLabel observed_label = StateLabel::H;
    /// Label of the state resent (the collapsed eigenstate, before any reapplied pass).
    StateLabel resent_label = StateLabel::H;
    /// Pass a dishonest receiver removed before measuring (and put back after).
    std::optional<UnitaryKind> stripped_op;
};

using BitString = std::vector<int>;

/// "0110" -> {0,1,1,0}; throws on any other character.
BitString parse_bits(const std::string &text);
std::string format_bits(const BitString &bits);

} // namespace qss
