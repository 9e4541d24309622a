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
 * Secret sharing of classical bits over a chain of single photons.
 *
 * Bob prepares the batch, every further receiver applies one of {I, U, U_H}
 * per photon, Alice spot-checks a random subset against the receivers'
 * disclosures, encodes her bits with I/U on the rest and sends them to the
 * final holder. Only the pooled secrets of all receivers decode the bits.
 */
#pragma once

#include "qss/adversary.hpp"
#include "qss/random.hpp"
#include "qss/transcript.hpp"
#include "qss/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace qss {

struct ProtocolConfig {
    int num_receivers = 2;
    int batch_size = 1000;
    double check_fraction = 0.2;
    /// Check error rate above which Alice aborts.
    double error_threshold = 0.05;
    double auth_fraction = 0.1;
    /// Announced-bit mismatch rate above which authentication fails. Kept
    /// apart from error_threshold so the check can be relaxed on its own.
    double auth_threshold = 0.05;
    std::uint64_t master_seed = 0;
    /// Receiver that gets the encoded batch; defaults to the last one.
    std::optional<int> final_holder;
    bool record_transcript = true;

    /// Throws Error(Config) naming the offending field.
    void validate() const;

    [[nodiscard]] int check_count() const;
    [[nodiscard]] int message_capacity() const { return batch_size - check_count(); }
    [[nodiscard]] int final_holder_index() const {
        return final_holder.value_or(num_receivers - 1);
    }
    [[nodiscard]] ProtocolShape shape() const;
};

/// Secrets pooled for one photon: Bob's initial label and the encryption
/// choice of each listed receiver.
struct PooledKnowledge {
    std::optional<StateLabel> initial_label;
    std::map<int, UnitaryKind> ops;
};

/// Extracts the secrets of `coalition` from a photon's history.
PooledKnowledge pool_knowledge(const PhotonRecord &photon, const Coalition &coalition);

std::vector<PhotonRecord> prepare_batch(int n, RandomStream &rng);

/// Applies `kind` for `party` to one photon and logs it in ops_applied.
void encrypt_photon(PhotonRecord &photon, PartyId party, UnitaryKind kind);

/// One uniformly drawn op from {I, U, U_H} per photon. The preparer may not encrypt.
void encrypt_pass(std::span<PhotonRecord> photons, PartyId party, RandomStream &rng);

/// Uniform k-subset of 0..n-1 without replacement, returned sorted.
std::vector<int> sample_subset(int n, int k, RandomStream &rng);

/// floor(fraction * n) sorted positions; throws if that is zero or fraction is outside (0,1).
std::vector<int> select_check_positions(int n, double fraction, RandomStream &rng);

/// Uniform random permutation of the receivers (Fisher-Yates).
std::vector<PartyId> disclosure_order(std::vector<PartyId> receivers, RandomStream &rng);

struct CheckResult {
    std::vector<StateLabel> outcomes;
    int errors = 0;
    double error_rate = 0.0;
};

/**
 * Alice's check: undo each disclosed pass (adjoint, reverse chain order),
 * measure in the basis of the disclosed label, count mismatches. Throws
 * Error(Protocol) when a disclosure is missing.
 */
CheckResult run_check(std::span<const PhotonRecord> photons,
                      std::span<const PooledKnowledge> disclosures, int num_receivers,
                      RandomStream &rng);

/// Bit 0 -> I, bit 1 -> U on each photon; records encoded_bit.
void encode_message(std::span<PhotonRecord> photons, const BitString &bits);

/// Decoding with every receiver's secret. Throws Error(Protocol) on an incomplete pool.
BitString decode_collaborative(std::span<const PhotonRecord> photons,
                               std::span<const PooledKnowledge> pool, int num_receivers,
                               RandomStream &rng);

enum class GuessStrategy {
    /// Unknown passes are taken as I; an unknown label is guessed uniformly.
    AssumeIdentity,
};

/// Best-effort decoding from an incomplete pool, for security statistics.
BitString decode_partial(std::span<const PhotonRecord> photons,
                         std::span<const PooledKnowledge> partial, int num_receivers,
                         GuessStrategy strategy, RandomStream &rng);

struct Announcement {
    std::vector<int> positions; ///< indices into the message
    BitString bits;
};

struct AuthResult {
    bool passed = true;
    int mismatches = 0;
    double mismatch_rate = 0.0;
};

/// Compares announced bits against decoded ones; passes iff rate <= threshold.
AuthResult authenticate(const BitString &decoded, const Announcement &announced,
                        double auth_threshold);

enum class RunStatus { Completed, Aborted };

struct ProtocolOutcome {
    RunStatus status = RunStatus::Completed;
    double check_error_rate = 0.0;
    int check_photons = 0;
    int check_errors = 0;
    /// Empty when aborted.
    BitString decoded_bits;
    int auth_announced = 0;
    int auth_mismatches = 0;
    double auth_mismatch_rate = 0.0;
    bool auth_passed = false;
    std::vector<EveRecord> eve_records;
    /// Final photon histories, indexed by position.
    std::vector<PhotonRecord> photons;
    Transcript transcript;

    [[nodiscard]] bool aborted() const { return status == RunStatus::Aborted; }
};

/**
 * Runs the whole protocol. Every party draws from its own stream derived
 * from cfg.master_seed and its label (see party_seed), so an adversary
 * never shifts the honest parties' draws.
 */
ProtocolOutcome run_protocol(const ProtocolConfig &cfg, const BitString &message,
                             const AttackModel &attack);

ProtocolOutcome run_protocol(const ProtocolConfig &cfg, const BitString &message);

/// Stream labels used by run_protocol.
inline constexpr const char *kAdversaryStream = "eve";
inline constexpr const char *kDecodeStream = "decode";

} // namespace qss
