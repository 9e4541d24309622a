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
#include "qss/ssqi.hpp"

#include "qss/error.hpp"

#include <cmath>
#include <regex>
#include <string>

namespace qss {

namespace {

constexpr std::pair<int, int> kBellPair{0, 2}; // (u, t)
constexpr int kBobQubit = 1;                   // h in the 3-qubit state, 0 in the pair

constexpr const char *kSharingStream = "sharing";
constexpr const char *kBobStream = "r0";

PartyId shift_down(PartyId p) {
    if (p.is_alice()) {
        return p;
    }
    if (p.index() == 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "Bob takes no part in the classical sharing run of a round");
    }
    return PartyId::receiver(p.index() - 1);
}

Segment shift_down(const Segment &s) { return Segment{shift_down(s.from), shift_down(s.to), s.phase}; }

/// Rewrites receiver labels of the sharing run (r0 = Charlie) to round labels.
std::string shift_up_labels(const std::string &text) {
    static const std::regex receiver(R"(\br(\d+)\b)");
    std::string out;
    auto last = text.cbegin();
    for (std::sregex_iterator it(text.begin(), text.end(), receiver), end; it != end; ++it) {
        out.append(last, text.cbegin() + it->position());
        out += "r" + std::to_string(std::stoi((*it)[1].str()) + 1);
        last = text.cbegin() + it->position() + it->length();
    }
    out.append(last, text.cend());
    return out;
}

} // namespace

UnknownQubit::UnknownQubit(Amplitude alpha, Amplitude beta) : alpha_(alpha), beta_(beta) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
        throw Error(ErrorCode::InvalidArgument, "unknown qubit is not normalized");
    }
}

UnknownQubit UnknownQubit::random(RandomStream &rng) {
    // Normalized complex Gaussian vector is Haar-distributed.
    const Amplitude a{rng.normal(), rng.normal()};
    const Amplitude b{rng.normal(), rng.normal()};
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return UnknownQubit(a / n, b / n);
}

Teleportation teleport_through(const UnknownQubit &input, const PureState &pair,
                               RandomStream &rng) {
    if (pair.num_qubits() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "teleport: pair state must have 2 qubits");
    }
    const PureState whole = tensor(input.state(), pair);
    auto m = bell_measure(whole, kBellPair, rng);
    return {m.outcome, m.remaining};
}

Teleportation teleport(const UnknownQubit &input, RandomStream &rng) {
    return teleport_through(input, bell_state(BellOutcome::PhiPlus), rng);
}

PureState branch_state(const UnknownQubit &input, BellOutcome outcome) {
    const Amplitude a = input.alpha();
    const Amplitude b = input.beta();
    switch (outcome) {
    case BellOutcome::PhiPlus:
        return PureState{a, b}; // a|H> + b|V>
    case BellOutcome::PsiPlus:
        return PureState{b, a}; // a|V> + b|H>
    case BellOutcome::PhiMinus:
        return PureState{a, -b}; // a|H> - b|V>
    case BellOutcome::PsiMinus:
        return PureState{-b, a}; // a|V> - b|H>
    }
    throw Error(ErrorCode::InvalidArgument, "unknown Bell outcome");
}

Unitary2 correction_for(BellOutcome outcome) {
    switch (outcome) {
    case BellOutcome::PhiPlus:
        return make_unitary(UnitaryKind::Id);
    case BellOutcome::PsiPlus:
        return make_unitary(UnitaryKind::Corr1);
    case BellOutcome::PhiMinus:
        return make_unitary(UnitaryKind::Corr2);
    case BellOutcome::PsiMinus:
        return make_unitary(UnitaryKind::Corr3);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown Bell outcome");
}

OutcomeBits outcome_bits(BellOutcome outcome) {
    switch (outcome) {
    case BellOutcome::PhiPlus:
        return {0, 0};
    case BellOutcome::PsiPlus:
        return {0, 1};
    case BellOutcome::PhiMinus:
        return {1, 0};
    case BellOutcome::PsiMinus:
        return {1, 1};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown Bell outcome");
}

BellOutcome bits_outcome(OutcomeBits bits) {
    if ((bits[0] != 0 && bits[0] != 1) || (bits[1] != 0 && bits[1] != 1)) {
        throw Error(ErrorCode::InvalidArgument, "outcome bits must be 0 or 1");
    }
    return kAllBellOutcomes[static_cast<std::size_t>(bits[0] * 2 + bits[1])];
}

std::string_view to_string(SsqiStatus status) {
    switch (status) {
    case SsqiStatus::Completed:
        return "completed";
    case SsqiStatus::PairCheckAborted:
        return "pair_check_aborted";
    case SsqiStatus::SharingAborted:
        return "sharing_aborted";
    }
    return "?";
}

PairCheckResult pair_distribution_check(int num_pairs, double sample_fraction,
                                        double error_threshold, const AttackModel &attack,
                                        RandomStream &rng, RandomStream &eve_rng) {
    if (num_pairs <= 0) {
        throw Error(ErrorCode::InvalidArgument, "pair_distribution_check: no pairs");
    }
    if (!(sample_fraction > 0.0 && sample_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "pair_distribution_check: sample fraction must be in (0,1)");
    }
    const int k = static_cast<int>(std::floor(sample_fraction * num_pairs));
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "pair_distribution_check: empty sample");
    }

    const Segment teleport_seg{PartyId::receiver(0), PartyId::alice(), Phase::Teleport};
    const auto target = attacked_segment(attack);
    const bool attacked = target && *target == teleport_seg;
    if (attacked && !std::holds_alternative<InterceptResend>(attack)) {
        throw Error(ErrorCode::InvalidArgument,
                    "only intercept-resend is modelled on the teleport segment");
    }

    PairCheckResult r;
    r.pairs.assign(static_cast<std::size_t>(num_pairs), bell_state(BellOutcome::PhiPlus));
    if (attacked) {
        const auto strategy = std::get<InterceptResend>(attack).basis_strategy;
        for (int i = 0; i < num_pairs; ++i) {
            Basis b = Basis::Rectilinear;
            if (strategy == BasisStrategy::UniformRandom) {
                b = eve_rng.uniform_index(2) == 0 ? Basis::Rectilinear : Basis::Diagonal;
            } else if (strategy == BasisStrategy::AlwaysDiagonal) {
                b = Basis::Diagonal;
            }
            auto m = measure_qubit(r.pairs[static_cast<std::size_t>(i)], 1, b, eve_rng);
            r.pairs[static_cast<std::size_t>(i)] = m.collapsed;
            r.eve_records.push_back(EveRecord{i, b, m.outcome, m.outcome, std::nullopt});
        }
    }

    r.sampled_positions = sample_subset(num_pairs, k, rng);
    for (int pos : r.sampled_positions) {
        const Basis common = rng.uniform_index(2) == 0 ? Basis::Rectilinear : Basis::Diagonal;
        const auto &pair = r.pairs[static_cast<std::size_t>(pos)];
        auto bob = measure_qubit(pair, 0, common, rng);
        auto alice = measure_qubit(bob.collapsed, 1, common, rng);
        if (bob.outcome != alice.outcome) {
            ++r.mismatches;
        }
    }
    r.sampled = k;
    r.error_rate = static_cast<double>(r.mismatches) / static_cast<double>(k);
    r.abort = r.error_rate > error_threshold;
    return r;
}

ProtocolConfig sharing_config(const ProtocolConfig &cfg) {
    ProtocolConfig sub = cfg;
    sub.num_receivers = cfg.num_receivers - 1;
    sub.master_seed = party_seed(cfg.master_seed, kSharingStream);
    if (cfg.final_holder) {
        if (*cfg.final_holder == 0) {
            throw Error(ErrorCode::Config, "final_holder: Bob cannot hold the shared outcome bits");
        }
        sub.final_holder = *cfg.final_holder - 1;
    }
    return sub;
}

AttackModel sharing_attack(const AttackModel &attack) {
    const auto target = attacked_segment(attack);
    if (!target || target->phase == Phase::Teleport) {
        return NoAttack{};
    }
    if (const auto *ir = std::get_if<InterceptResend>(&attack)) {
        return InterceptResend{shift_down(ir->segment), ir->basis_strategy};
    }
    const auto &dr = std::get<DishonestReceiver>(attack);
    return DishonestReceiver{shift_down(dr.party), shift_down(dr.segment)};
}

double predicted_round_detection_rate(const ProtocolConfig &cfg, const AttackModel &attack) {
    const auto target = attacked_segment(attack);
    if (target && target->phase == Phase::Teleport) {
        return predicted_detection_rate(attack, ProtocolShape{2, 1, true});
    }
    return predicted_detection_rate(sharing_attack(attack), sharing_config(cfg).shape());
}

SsqiOutcome run_ssqi(const ProtocolConfig &cfg, const UnknownQubit &input,
                     const Coalition &coalition, const AttackModel &attack) {
    cfg.validate();
    if (cfg.num_receivers < 3) {
        throw Error(ErrorCode::Config, "receivers: sharing a qubit needs at least 3 receivers");
    }
    for (int r : coalition) {
        if (r < 0 || r >= cfg.num_receivers) {
            throw Error(ErrorCode::Config, "coalition: receiver " + std::to_string(r) +
                                               " is not part of this run");
        }
    }
    const ProtocolConfig sub_cfg = sharing_config(cfg);
    if (sub_cfg.message_capacity() < 2) {
        throw Error(ErrorCode::Config, "batch_size: too small to carry the 2 outcome bits");
    }
    const AttackModel sub_attack = sharing_attack(attack);
    if (const auto target = attacked_segment(attack); target && target->phase == Phase::Teleport) {
        validate_attack(attack, ProtocolShape{2, 1, true});
    } else {
        validate_attack(sub_attack, sub_cfg.shape());
    }

    RandomStream alice_rng(party_seed(cfg.master_seed, PartyId::alice().label()));
    RandomStream eve_rng(party_seed(cfg.master_seed, kAdversaryStream));
    RandomStream bob_rng(party_seed(cfg.master_seed, kBobStream));

    SsqiOutcome out;
    out.transcript = Transcript(cfg.record_transcript);
    auto &log = out.transcript;

    out.pair_check = pair_distribution_check(cfg.batch_size, cfg.check_fraction,
                                             cfg.error_threshold, attack, alice_rng, eve_rng);
    log.add(StepTag::PairCheck, PartyId::alice().label(), -1,
            {{"pairs", static_cast<std::int64_t>(cfg.batch_size)},
             {"sampled", static_cast<std::int64_t>(out.pair_check.sampled)},
             {"mismatches", static_cast<std::int64_t>(out.pair_check.mismatches)},
             {"rate", out.pair_check.error_rate},
             {"aborted", out.pair_check.abort}});
    if (out.pair_check.abort) {
        out.status = SsqiStatus::PairCheckAborted;
        return out;
    }

    // Teleport through the first pair that was not consumed by the check.
    std::size_t used = 0;
    for (int pos : out.pair_check.sampled_positions) {
        if (static_cast<std::size_t>(pos) != used) {
            break;
        }
        ++used;
    }
    const auto tele = teleport_through(input, out.pair_check.pairs[used], alice_rng);
    out.bell_outcome = tele.outcome;
    out.outcome_bits = outcome_bits(tele.outcome);
    log.add(StepTag::Teleport, PartyId::alice().label(), static_cast<int>(used),
            {{"outcome", std::string(to_string(tele.outcome))},
             {"bits", format_bits({out.outcome_bits[0], out.outcome_bits[1]})}});

    ProtocolOutcome sharing =
        run_protocol(sub_cfg, BitString{out.outcome_bits[0], out.outcome_bits[1]}, sub_attack);
    log.append(sharing.transcript, "sharing", shift_up_labels);
    const bool aborted = sharing.aborted();
    if (!aborted) {
        out.decoded_outcome = bits_outcome({sharing.decoded_bits[0], sharing.decoded_bits[1]});
    }
    out.sharing = std::move(sharing);
    if (aborted) {
        out.status = SsqiStatus::SharingAborted;
        return out;
    }

    if (!coalition.contains(0)) {
        log.add(StepTag::Reconstruct, PartyId::receiver(0).label(), -1,
                {{"applicable", false}});
        return out;
    }
    BellOutcome applied = *out.decoded_outcome;
    const bool complete = coalition == full_coalition(cfg.num_receivers);
    if (!complete) {
        applied = kAllBellOutcomes[bob_rng.uniform_index(kAllBellOutcomes.size())];
    }
    out.reconstructed = apply1(correction_for(applied), tele.pre_correction);
    out.fidelity = overlap_probability(input.state(), *out.reconstructed);
    log.add(StepTag::Reconstruct, PartyId::receiver(0).label(), -1,
            {{"applicable", true},
             {"complete", complete},
             {"correction", std::string(to_string(applied))},
             {"fidelity", *out.fidelity}});
    return out;
}

std::optional<double> predicted_coalition_fidelity(const Coalition &coalition, int num_receivers) {
    if (!coalition.contains(0)) {
        return std::nullopt;
    }
    if (coalition == full_coalition(num_receivers)) {
        return 1.0;
    }
    // Bob holds B_k psi and applies C_j with j uniform. Over Haar psi,
    // E|<psi|A|psi>|^2 = (tr(A^dagger A) + |tr A|^2) / 6 for a 2x2 unitary A.
    auto branch_op = [](BellOutcome k) {
        const UnknownQubit e0(1.0, 0.0);
        const UnknownQubit e1(0.0, 1.0);
        const PureState c0 = branch_state(e0, k);
        const PureState c1 = branch_state(e1, k);
        Unitary2::Matrix m{};
        m[0][0] = c0[0];
        m[1][0] = c0[1];
        m[0][1] = c1[0];
        m[1][1] = c1[1];
        return Unitary2(m);
    };
    double sum = 0.0;
    for (BellOutcome k : kAllBellOutcomes) {
        for (BellOutcome j : kAllBellOutcomes) {
            const Unitary2 a = correction_for(j) * branch_op(k);
            const double tr = std::norm(a(0, 0) + a(1, 1));
            sum += (2.0 + tr) / 6.0;
        }
    }
    return sum / 16.0;
}

} // namespace qss
