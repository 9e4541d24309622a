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
 * Sharing an unknown qubit: Alice teleports it to Bob over a Phi+ pair and,
 * instead of announcing her Bell outcome, shares its two bits with the other
 * receivers through the classical sharing protocol. Bob can only undo the
 * teleportation when every receiver cooperates.
 *
 * Qubit order in the teleportation state: 0 = Alice's unknown qubit (u),
 * 1 = Bob's kept half (h), 2 = the travelling half (t).
 */
#pragma once

#include "qss/qsscm.hpp"

#include <array>
#include <optional>

namespace qss {

class UnknownQubit {
  public:
    /// Requires |alpha|^2 + |beta|^2 = 1 within 1e-9.
    UnknownQubit(Amplitude alpha, Amplitude beta);

    /// Haar-random state.
    static UnknownQubit random(RandomStream &rng);

    [[nodiscard]] Amplitude alpha() const { return alpha_; }
    [[nodiscard]] Amplitude beta() const { return beta_; }
    [[nodiscard]] PureState state() const { return PureState{alpha_, beta_}; }

  private:
    Amplitude alpha_;
    Amplitude beta_;
};

struct Teleportation {
    BellOutcome outcome;
    PureState pre_correction; ///< Bob's qubit before any correction
};

/// Bell measurement of (u, t) on input x Phi+(h, t).
Teleportation teleport(const UnknownQubit &input, RandomStream &rng);

/// Same, over an arbitrary (possibly disturbed) 2-qubit (h, t) pair state.
Teleportation teleport_through(const UnknownQubit &input, const PureState &pair,
                               RandomStream &rng);

/// Bob's qubit for a given outcome, written out directly from the expansion
/// of input x Phi+ in the Bell basis of (u, t).
PureState branch_state(const UnknownQubit &input, BellOutcome outcome);

/// Phi+ -> I, Psi+ -> u1, Phi- -> u2, Psi- -> u3.
Unitary2 correction_for(BellOutcome outcome);

using OutcomeBits = std::array<int, 2>;

/// Phi+ -> 00, Psi+ -> 01, Phi- -> 10, Psi- -> 11.
OutcomeBits outcome_bits(BellOutcome outcome);
BellOutcome bits_outcome(OutcomeBits bits);

struct PairCheckResult {
    int sampled = 0;
    int mismatches = 0;
    double error_rate = 0.0;
    bool abort = false;
    /// (h, t) state of every pair after transit; sampled ones are consumed.
    std::vector<PureState> pairs;
    std::vector<int> sampled_positions;
    std::vector<EveRecord> eve_records;
};

/**
 * Bob sends the t halves of `num_pairs` Phi+ pairs to Alice. On a random
 * floor(sample_fraction * num_pairs) subset both halves are measured in a
 * common random basis; Phi+ agrees in both bases, so any disagreement is
 * disturbance. Only InterceptResend on the Teleport segment acts here.
 */
PairCheckResult pair_distribution_check(int num_pairs, double sample_fraction,
                                        double error_threshold, const AttackModel &attack,
                                        RandomStream &rng, RandomStream &eve_rng);

enum class SsqiStatus { Completed, PairCheckAborted, SharingAborted };

std::string_view to_string(SsqiStatus status);

struct SsqiOutcome {
    SsqiStatus status = SsqiStatus::Completed;
    BellOutcome bell_outcome = BellOutcome::PhiPlus;
    OutcomeBits outcome_bits{0, 0};
    PairCheckResult pair_check;
    /// The sharing run that carried the outcome bits (receivers renumbered from 0 = Charlie).
    std::optional<ProtocolOutcome> sharing;
    std::optional<BellOutcome> decoded_outcome;
    /// Absent when Bob is not in the coalition or the run aborted.
    std::optional<PureState> reconstructed;
    std::optional<double> fidelity;
    Transcript transcript;
};

/**
 * Full sharing round. The Bell outcome bits go to receivers 1..n-1 through
 * run_protocol; Bob (receiver 0) applies the decoded correction when the
 * coalition is complete and a uniformly random one when it is a proper
 * coalition containing him. Requires at least 3 receivers.
 */
SsqiOutcome run_ssqi(const ProtocolConfig &cfg, const UnknownQubit &input,
                     const Coalition &coalition, const AttackModel &attack);

/// Exact mean fidelity over Haar-random inputs for a coalition, or nullopt
/// when Bob is not in it.
std::optional<double> predicted_coalition_fidelity(const Coalition &coalition, int num_receivers);

/// Configuration of the classical sharing run inside a round: receivers
/// 1..n-1 renumbered to 0..n-2 and a seed derived from cfg.master_seed.
ProtocolConfig sharing_config(const ProtocolConfig &cfg);

/// Maps an attack given in round numbering onto the sharing run. Teleport
/// attacks map to NoAttack; attacks involving Bob elsewhere are rejected.
AttackModel sharing_attack(const AttackModel &attack);

/// Exact detection rate of an attack on a round: on the pair check for the
/// Teleport segment, otherwise on the sharing run.
double predicted_round_detection_rate(const ProtocolConfig &cfg, const AttackModel &attack);

} // namespace qss
