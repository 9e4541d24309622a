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
#include "qss/qsscm.hpp"

#include "qss/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qss {

namespace {

Error config_error(const std::string &field, const std::string &why) {
    return Error(ErrorCode::Config, field + ": " + why);
}

PureState undo_known(PureState s, const PooledKnowledge &k) {
    for (auto it = k.ops.rbegin(); it != k.ops.rend(); ++it) {
        s = apply1(make_unitary(it->second).adjoint(), s);
    }
    return s;
}

void require_complete(const PooledKnowledge &k, int num_receivers, const char *op) {
    if (!k.initial_label) {
        throw Error(ErrorCode::Protocol, std::string(op) + ": initial label not disclosed");
    }
    for (int r = 1; r < num_receivers; ++r) {
        if (!k.ops.contains(r)) {
            throw Error(ErrorCode::Protocol, std::string(op) + ": encryption of " +
                                                 PartyId::receiver(r).label() +
                                                 " not disclosed");
        }
    }
}

int bit_from_outcome(StateLabel reference, StateLabel outcome) {
    return outcome == reference ? 0 : 1;
}

} // namespace

// ----------------------------------------------------------- ProtocolConfig

int ProtocolConfig::check_count() const {
    return static_cast<int>(std::floor(check_fraction * static_cast<double>(batch_size)));
}

ProtocolShape ProtocolConfig::shape() const {
    return ProtocolShape{num_receivers, final_holder_index(), false};
}

void ProtocolConfig::validate() const {
    if (num_receivers < 2) {
        throw config_error("receivers", "at least 2 receivers are required");
    }
    if (batch_size <= 0) {
        throw config_error("batch_size", "must be positive");
    }
    if (!(check_fraction > 0.0 && check_fraction < 1.0)) {
        throw config_error("check_fraction", "must lie in (0, 1)");
    }
    if (!(error_threshold >= 0.0 && error_threshold <= 1.0)) {
        throw config_error("error_threshold", "must lie in [0, 1]");
    }
    if (!(auth_fraction > 0.0 && auth_fraction < 1.0)) {
        throw config_error("auth_fraction", "must lie in (0, 1)");
    }
    if (!(auth_threshold >= 0.0 && auth_threshold <= 1.0)) {
        throw config_error("auth_threshold", "must lie in [0, 1]");
    }
    if (check_count() < 1) {
        throw config_error("check_fraction", "selects no check photons for this batch_size");
    }
    if (final_holder && (*final_holder < 0 || *final_holder >= num_receivers)) {
        throw config_error("final_holder", "must name a receiver 0.." +
                                               std::to_string(num_receivers - 1));
    }
}

// -------------------------------------------------------------- operations

PooledKnowledge pool_knowledge(const PhotonRecord &photon, const Coalition &coalition) {
    PooledKnowledge k;
    if (coalition.contains(0)) {
        k.initial_label = photon.initial_label;
    }
    for (const auto &op : photon.ops_applied) {
        if (op.party.is_receiver() && op.party.index() > 0 && coalition.contains(op.party.index())) {
            k.ops[op.party.index()] = op.kind;
        }
    }
    return k;
}

std::vector<PhotonRecord> prepare_batch(int n, RandomStream &rng) {
    if (n <= 0) {
        throw Error(ErrorCode::InvalidArgument, "prepare_batch: batch size must be positive");
    }
    std::vector<PhotonRecord> photons(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto &p = photons[static_cast<std::size_t>(i)];
        p.position = i;
        p.initial_label = kAllLabels[rng.uniform_index(kAllLabels.size())];
        p.current = state_of_label(p.initial_label);
    }
    return photons;
}

void encrypt_photon(PhotonRecord &photon, PartyId party, UnitaryKind kind) {
    photon.current = apply1(make_unitary(kind), photon.current);
    photon.ops_applied.push_back({party, kind});
}

void encrypt_pass(std::span<PhotonRecord> photons, PartyId party, RandomStream &rng) {
    if (!party.is_receiver() || party.index() == 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "encrypt_pass: only receivers after the preparer encrypt");
    }
    for (auto &p : photons) {
        encrypt_photon(p, party, kEncryptionOps[rng.uniform_index(kEncryptionOps.size())]);
    }
}

std::vector<int> sample_subset(int n, int k, RandomStream &rng) {
    if (k < 0 || k > n) {
        throw Error(ErrorCode::InvalidArgument, "sample_subset: k out of range");
    }
    // Partial Fisher-Yates over 0..n-1.
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<int> select_check_positions(int n, double fraction, RandomStream &rng) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "select_check_positions: fraction must be in (0,1)");
    }
    const int k = static_cast<int>(std::floor(fraction * static_cast<double>(n)));
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "select_check_positions: empty check subset");
    }
    return sample_subset(n, k, rng);
}

std::vector<PartyId> disclosure_order(std::vector<PartyId> receivers, RandomStream &rng) {
    if (receivers.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "disclosure_order: need at least 2 receivers");
    }
    for (std::size_t i = receivers.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_index(i + 1));
        std::swap(receivers[i], receivers[j]);
    }
    return receivers;
}

CheckResult run_check(std::span<const PhotonRecord> photons,
                      std::span<const PooledKnowledge> disclosures, int num_receivers,
                      RandomStream &rng) {
    if (photons.size() != disclosures.size()) {
        throw Error(ErrorCode::Protocol, "run_check: one disclosure per check photon required");
    }
    if (photons.empty()) {
        throw Error(ErrorCode::InvalidArgument, "run_check: empty check subset");
    }
    CheckResult result;
    result.outcomes.reserve(photons.size());
    for (std::size_t i = 0; i < photons.size(); ++i) {
        const auto &k = disclosures[i];
        require_complete(k, num_receivers, "run_check");
        const PureState s = undo_known(photons[i].current, k);
        const auto m = measure_in_basis(s, basis_of(*k.initial_label), rng);
        result.outcomes.push_back(m.outcome);
        if (m.outcome != *k.initial_label) {
            ++result.errors;
        }
    }
    result.error_rate = static_cast<double>(result.errors) / static_cast<double>(photons.size());
    return result;
}

void encode_message(std::span<PhotonRecord> photons, const BitString &bits) {
    if (photons.size() != bits.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "encode_message: " + std::to_string(bits.size()) + " bits for " +
                        std::to_string(photons.size()) + " photons");
    }
    const Unitary2 flip = make_unitary(UnitaryKind::Flip);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0 && bits[i] != 1) {
            throw Error(ErrorCode::InvalidArgument, "encode_message: bits must be 0 or 1");
        }
        if (bits[i]) {
            photons[i].current = apply1(flip, photons[i].current);
        }
        photons[i].encoded_bit = bits[i];
    }
}

BitString decode_collaborative(std::span<const PhotonRecord> photons,
                               std::span<const PooledKnowledge> pool, int num_receivers,
                               RandomStream &rng) {
    if (photons.size() != pool.size()) {
        throw Error(ErrorCode::Protocol, "decode_collaborative: pool does not cover every photon");
    }
    BitString bits;
    bits.reserve(photons.size());
    for (std::size_t i = 0; i < photons.size(); ++i) {
        require_complete(pool[i], num_receivers, "decode_collaborative");
        const StateLabel ref = *pool[i].initial_label;
        const auto m = measure_in_basis(undo_known(photons[i].current, pool[i]), basis_of(ref), rng);
        bits.push_back(bit_from_outcome(ref, m.outcome));
    }
    return bits;
}

BitString decode_partial(std::span<const PhotonRecord> photons,
                         std::span<const PooledKnowledge> partial, int /*num_receivers*/,
                         GuessStrategy strategy, RandomStream &rng) {
    if (photons.size() != partial.size()) {
        throw Error(ErrorCode::Protocol, "decode_partial: knowledge does not cover every photon");
    }
    if (strategy != GuessStrategy::AssumeIdentity) {
        throw Error(ErrorCode::InvalidArgument, "decode_partial: unknown strategy");
    }
    BitString bits;
    bits.reserve(photons.size());
    for (std::size_t i = 0; i < photons.size(); ++i) {
        const auto &k = partial[i];
        // Always draw the label guess so the stream advances the same way for every coalition.
        const StateLabel guess = kAllLabels[rng.uniform_index(kAllLabels.size())];
        const StateLabel ref = k.initial_label.value_or(guess);
        const auto m = measure_in_basis(undo_known(photons[i].current, k), basis_of(ref), rng);
        bits.push_back(bit_from_outcome(ref, m.outcome));
    }
    return bits;
}

AuthResult authenticate(const BitString &decoded, const Announcement &announced,
                        double auth_threshold) {
    if (announced.positions.empty()) {
        throw Error(ErrorCode::InvalidArgument, "authenticate: nothing announced");
    }
    if (announced.positions.size() != announced.bits.size()) {
        throw Error(ErrorCode::InvalidArgument, "authenticate: positions and bits differ in length");
    }
    AuthResult r;
    for (std::size_t i = 0; i < announced.positions.size(); ++i) {
        const int pos = announced.positions[i];
        if (pos < 0 || static_cast<std::size_t>(pos) >= decoded.size()) {
            throw Error(ErrorCode::InvalidArgument,
                        "authenticate: position " + std::to_string(pos) + " out of range");
        }
        if (decoded[static_cast<std::size_t>(pos)] != announced.bits[i]) {
            ++r.mismatches;
        }
    }
    r.mismatch_rate =
        static_cast<double>(r.mismatches) / static_cast<double>(announced.positions.size());
    r.passed = r.mismatch_rate <= auth_threshold;
    return r;
}

// ------------------------------------------------------------ run_protocol

namespace {

class ProtocolRun {
  public:
    ProtocolRun(const ProtocolConfig &cfg, const BitString &message, const AttackModel &attack)
        : cfg_(cfg), message_(message), attack_(attack), target_(attacked_segment(attack)),
          alice_rng_(party_seed(cfg.master_seed, PartyId::alice().label())),
          eve_rng_(party_seed(cfg.master_seed, kAdversaryStream)),
          decode_rng_(party_seed(cfg.master_seed, kDecodeStream)) {
        out_.transcript = Transcript(cfg.record_transcript);
        for (int r = 0; r < cfg.num_receivers; ++r) {
            receiver_rng_.emplace_back(party_seed(cfg.master_seed, PartyId::receiver(r).label()));
        }
    }

    ProtocolOutcome run() {
        distribute();
        if (!check()) {
            out_.status = RunStatus::Aborted;
            out_.photons = std::move(photons_);
            return std::move(out_);
        }
        encode_and_return();
        decode();
        authenticate_step();
        out_.status = RunStatus::Completed;
        out_.photons = std::move(photons_);
        return std::move(out_);
    }

  private:
    Transcript &log() { return out_.transcript; }

    void transfer(const Segment &seg, std::span<PhotonRecord> batch) {
        log().add(StepTag::Transfer, seg.from.label(), -1,
                  {{"from", seg.from.label()},
                   {"to", seg.to.label()},
                   {"phase", std::string(to_string(seg.phase))},
                   {"count", static_cast<std::int64_t>(batch.size())}});
        if (!target_ || !(*target_ == seg)) {
            return;
        }
        const auto records = apply_attack(attack_, seg, batch, eve_rng_);
        const std::string who = std::holds_alternative<DishonestReceiver>(attack_)
                                    ? std::get<DishonestReceiver>(attack_).party.label()
                                    : std::string(kAdversaryStream);
        for (const auto &r : records) {
            Payload p{{"intercept", to_string(seg)},
                      {"basis", std::string(to_string(r.measured_basis))},
                      {"observed", std::string(to_string(r.observed_label))}};
            if (r.stripped_op) {
                p.emplace_back("stripped", std::string(to_string(*r.stripped_op)));
            }
            log().add(StepTag::Transfer, who, r.position, std::move(p));
        }
        out_.eve_records.insert(out_.eve_records.end(), records.begin(), records.end());
    }

    void distribute() {
        const int n = cfg_.num_receivers;
        photons_ = prepare_batch(cfg_.batch_size, receiver_rng_[0]);
        for (const auto &p : photons_) {
            log().add(StepTag::Prepare, PartyId::receiver(0).label(), p.position,
                      {{"label", std::string(to_string(p.initial_label))}});
        }
        for (int i = 0; i < n; ++i) {
            const PartyId from = PartyId::receiver(i);
            if (i >= 1) {
                encrypt_pass(photons_, from, receiver_rng_[static_cast<std::size_t>(i)]);
                for (const auto &p : photons_) {
                    log().add(StepTag::Encrypt, from.label(), p.position,
                              {{"op", std::string(to_string(p.ops_applied.back().kind))}});
                }
            }
            const PartyId to = (i + 1 < n) ? PartyId::receiver(i + 1) : PartyId::alice();
            transfer(Segment{from, to, Phase::Distribution}, photons_);
        }
    }

    // Returns false when the run aborts.
    bool check() {
        const int n = cfg_.num_receivers;
        check_positions_ = select_check_positions(cfg_.batch_size, cfg_.check_fraction, alice_rng_);
        log().add(StepTag::Check, PartyId::alice().label(), -1,
                  {{"selected", static_cast<std::int64_t>(check_positions_.size())}});

        std::vector<PartyId> receivers;
        for (int r = 0; r < n; ++r) {
            receivers.push_back(PartyId::receiver(r));
        }
        const Coalition everyone = full_coalition(n);

        std::vector<PhotonRecord> checked;
        std::vector<PooledKnowledge> disclosed;
        for (int pos : check_positions_) {
            auto &photon = photons_[static_cast<std::size_t>(pos)];
            photon.role = PhotonRole::Check;
            const auto order = disclosure_order(receivers, alice_rng_);
            const PooledKnowledge truth = pool_knowledge(photon, everyone);
            PooledKnowledge k;
            for (std::size_t rank = 0; rank < order.size(); ++rank) {
                const int r = order[rank].index();
                Payload p{{"rank", static_cast<std::int64_t>(rank)}};
                if (r == 0) {
                    k.initial_label = truth.initial_label;
                    p.emplace_back("label", std::string(to_string(*k.initial_label)));
                } else {
                    k.ops[r] = truth.ops.at(r);
                    p.emplace_back("op", std::string(to_string(k.ops[r])));
                }
                log().add(StepTag::Disclose, order[rank].label(), pos, std::move(p));
            }
            checked.push_back(photon);
            disclosed.push_back(std::move(k));
        }

        const CheckResult res = run_check(checked, disclosed, n, alice_rng_);
        for (std::size_t i = 0; i < checked.size(); ++i) {
            log().add(StepTag::Check, PartyId::alice().label(), checked[i].position,
                      {{"basis", std::string(to_string(basis_of(*disclosed[i].initial_label)))},
                       {"outcome", std::string(to_string(res.outcomes[i]))},
                       {"error", res.outcomes[i] != *disclosed[i].initial_label}});
        }
        out_.check_photons = static_cast<int>(checked.size());
        out_.check_errors = res.errors;
        out_.check_error_rate = res.error_rate;
        const bool abort = res.error_rate > cfg_.error_threshold;
        log().add(StepTag::Check, PartyId::alice().label(), -1,
                  {{"errors", static_cast<std::int64_t>(res.errors)},
                   {"rate", res.error_rate},
                   {"threshold", cfg_.error_threshold},
                   {"aborted", abort}});
        return !abort;
    }

    void encode_and_return() {
        std::vector<int> stored;
        std::size_t c = 0;
        for (int pos = 0; pos < cfg_.batch_size; ++pos) {
            if (c < check_positions_.size() && check_positions_[c] == pos) {
                ++c;
                continue;
            }
            stored.push_back(pos);
        }
        stored.resize(message_.size());
        message_positions_ = stored;

        for (int pos : message_positions_) {
            auto &p = photons_[static_cast<std::size_t>(pos)];
            p.role = PhotonRole::Message;
            message_photons_.push_back(std::move(p));
        }
        encode_message(message_photons_, message_);
        for (const auto &p : message_photons_) {
            log().add(StepTag::Encode, PartyId::alice().label(), p.position,
                      {{"bit", static_cast<std::int64_t>(*p.encoded_bit)}});
        }
        transfer(Segment{PartyId::alice(), PartyId::receiver(cfg_.final_holder_index()),
                         Phase::Return},
                 message_photons_);
    }

    void decode() {
        const Coalition everyone = full_coalition(cfg_.num_receivers);
        std::vector<PooledKnowledge> pool;
        pool.reserve(message_photons_.size());
        for (const auto &p : message_photons_) {
            pool.push_back(pool_knowledge(p, everyone));
        }
        out_.decoded_bits =
            decode_collaborative(message_photons_, pool, cfg_.num_receivers, decode_rng_);
        const std::string holder = PartyId::receiver(cfg_.final_holder_index()).label();
        for (std::size_t i = 0; i < message_photons_.size(); ++i) {
            log().add(StepTag::Decode, holder, message_photons_[i].position,
                      {{"bit", static_cast<std::int64_t>(out_.decoded_bits[i])}});
        }
        for (auto &p : message_photons_) {
            photons_[static_cast<std::size_t>(p.position)] = std::move(p);
        }
        message_photons_.clear();
    }

    void authenticate_step() {
        const int len = static_cast<int>(message_.size());
        const int count =
            static_cast<int>(std::floor(cfg_.auth_fraction * static_cast<double>(len)));
        out_.auth_announced = count;
        if (count == 0) {
            // Too short a message to reveal any part of it.
            out_.auth_passed = true;
            log().add(StepTag::Auth, PartyId::alice().label(), -1,
                      {{"announced", std::int64_t{0}}, {"skipped", true}});
            return;
        }
        Announcement a;
        a.positions = sample_subset(len, count, alice_rng_);
        for (int pos : a.positions) {
            a.bits.push_back(message_[static_cast<std::size_t>(pos)]);
        }
        const AuthResult r = authenticate(out_.decoded_bits, a, cfg_.auth_threshold);
        out_.auth_mismatches = r.mismatches;
        out_.auth_mismatch_rate = r.mismatch_rate;
        out_.auth_passed = r.passed;
        log().add(StepTag::Auth, PartyId::alice().label(), -1,
                  {{"announced", static_cast<std::int64_t>(count)},
                   {"mismatches", static_cast<std::int64_t>(r.mismatches)},
                   {"rate", r.mismatch_rate},
                   {"passed", r.passed}});
    }

    const ProtocolConfig &cfg_;
    const BitString &message_;
    const AttackModel &attack_;
    std::optional<Segment> target_;
    RandomStream alice_rng_;
    RandomStream eve_rng_;
    RandomStream decode_rng_;
    std::vector<RandomStream> receiver_rng_;

    std::vector<PhotonRecord> photons_;
    std::vector<int> check_positions_;
    std::vector<int> message_positions_;
    std::vector<PhotonRecord> message_photons_;
    ProtocolOutcome out_;
};

} // namespace

ProtocolOutcome run_protocol(const ProtocolConfig &cfg, const BitString &message,
                             const AttackModel &attack) {
    cfg.validate();
    if (static_cast<int>(message.size()) > cfg.message_capacity()) {
        throw Error(ErrorCode::Config, "message: " + std::to_string(message.size()) +
                                           " bits do not fit in " +
                                           std::to_string(cfg.message_capacity()) +
                                           " message photons");
    }
    for (int b : message) {
        if (b != 0 && b != 1) {
            throw Error(ErrorCode::Config, "message: bits must be 0 or 1");
        }
    }
    validate_attack(attack, cfg.shape());
    return ProtocolRun(cfg, message, attack).run();
}

ProtocolOutcome run_protocol(const ProtocolConfig &cfg, const BitString &message) {
    return run_protocol(cfg, message, NoAttack{});
}

} // namespace qss
