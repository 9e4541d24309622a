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
 * Channel adversaries and the exact enumeration oracles for their effect.
 *
 * The oracles walk every branch of a run (initial label, every receiver's
 * encryption choice, Alice's bit, the attacker's basis draw and each
 * measurement outcome) and weight it with its exact probability. Nothing is
 * sampled.
 */
#pragma once

#include "qss/random.hpp"
#include "qss/types.hpp"

#include <span>
#include <vector>

namespace qss {

/// What the oracles need to know about a run.
struct ProtocolShape {
    int num_receivers = 2;
    int final_holder = 1; ///< receiver Alice sends the encoded batch to
    bool with_teleport = false; ///< the Bob -> Alice pair segment exists
};

/// Channel segments traversed by a run of the given shape, in traversal order.
std::vector<Segment> traversed_segments(const ProtocolShape &shape);

/// Throws Error(InvalidArgument) unless the model targets a traversed segment
/// and a dishonest party is a receiver that is not an endpoint of it.
void validate_attack(const AttackModel &model, const ProtocolShape &shape);

/**
 * Runs the adversary against the photons crossing `transit`.
 *
 * A dishonest receiver only reads his own secret from the records: the
 * initial label if he is Bob, otherwise his own entry in ops_applied.
 * NoAttack leaves the photons untouched and returns no records.
 */
std::vector<EveRecord> apply_attack(const AttackModel &model, const Segment &transit,
                                    std::span<PhotonRecord> photons, RandomStream &rng);

/**
 * Exact error probability the attack induces on one photon of the phase it
 * targets: a check photon for Distribution segments, an authenticated message
 * bit for the Return segment (Alice's bit uniform), a sampled EPR pair for
 * the Teleport segment. Zero for NoAttack.
 */
double predicted_detection_rate(const AttackModel &model, const ProtocolShape &shape);

/// Secrets an attacker holds, as the coalition whose knowledge they equal.
/// Eve knows nothing; a dishonest receiver knows his own secret.
Coalition attacker_knowledge(const AttackModel &model);

/**
 * Maximum-likelihood guess of Alice's bit from one intercepted photon on the
 * Return segment, given the observation and the secrets in `knowledge` for
 * that photon. Unknown labels and passes are marginalized with uniform
 * priors; ties resolve to 0.
 */
int eve_guess(const EveRecord &record, const PhotonRecord &truth, const Coalition &knowledge,
              int num_receivers);

/**
 * Fraction of intercepted message photons whose bit the attacker guesses
 * right with eve_guess. `photons` is indexed by position. Throws on empty
 * records.
 */
double eve_accuracy(std::span<const EveRecord> records, std::span<const PhotonRecord> photons,
                    const AttackModel &model, int num_receivers);

/// Same as above with explicitly chosen attacker knowledge.
double eve_accuracy(std::span<const EveRecord> records, std::span<const PhotonRecord> photons,
                    const Coalition &knowledge, int num_receivers);

/// Exact expected eve_accuracy for a Return-segment attack with uniform message bits.
double predicted_eve_accuracy(const AttackModel &model, const ProtocolShape &shape);

} // namespace qss
