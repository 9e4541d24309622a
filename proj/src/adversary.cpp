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
#include "qss/adversary.hpp"

#include "qss/error.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace qss {

namespace {

struct Observation {
    Basis basis = Basis::Rectilinear;
    StateLabel outcome = StateLabel::H;
    std::optional<UnitaryKind> stripped;
};

struct Branch {
    double weight;
    PureState state;
    std::optional<Observation> seen;
};

std::vector<std::pair<Basis, double>> basis_distribution(BasisStrategy strategy) {
    switch (strategy) {
    case BasisStrategy::UniformRandom:
        return {{Basis::Rectilinear, 0.5}, {Basis::Diagonal, 0.5}};
    case BasisStrategy::AlwaysRectilinear:
        return {{Basis::Rectilinear, 1.0}};
    case BasisStrategy::AlwaysDiagonal:
        return {{Basis::Diagonal, 1.0}};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown basis strategy");
}

Basis draw_basis(BasisStrategy strategy, RandomStream &rng) {
    switch (strategy) {
    case BasisStrategy::UniformRandom:
        return rng.uniform_index(2) == 0 ? Basis::Rectilinear : Basis::Diagonal;
    case BasisStrategy::AlwaysRectilinear:
        return Basis::Rectilinear;
    case BasisStrategy::AlwaysDiagonal:
        return Basis::Diagonal;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown basis strategy");
}

std::optional<UnitaryKind> op_of(const PhotonRecord &photon, PartyId party) {
    for (const auto &op : photon.ops_applied) {
        if (op.party == party) {
            return op.kind;
        }
    }
    return std::nullopt;
}

// Encryption pass of each receiver (index 0 unused: Bob does not encrypt).
using OpTuple = std::vector<UnitaryKind>;

// Calls fn(ops) for every tuple in {I,U,U_H}^(num_receivers-1), in odometer order.
template <typename Fn> void for_each_op_tuple(int num_receivers, Fn &&fn) {
    OpTuple ops(static_cast<std::size_t>(num_receivers), UnitaryKind::Id);
    std::vector<std::size_t> digit(ops.size(), 0);
    while (true) {
        for (std::size_t k = 1; k < ops.size(); ++k) {
            ops[k] = kEncryptionOps[digit[k]];
        }
        fn(ops);
        std::size_t k = 1;
        while (k < digit.size() && ++digit[k] == kEncryptionOps.size()) {
            digit[k] = 0;
            ++k;
        }
        if (k >= digit.size()) {
            return;
        }
    }
}

double tuple_weight(int num_receivers) {
    double w = 1.0;
    for (int k = 1; k < num_receivers; ++k) {
        w /= 3.0;
    }
    return w;
}

PureState undo_chain(PureState s, const OpTuple &ops) {
    for (std::size_t k = ops.size(); k-- > 1;) {
        s = apply1(make_unitary(ops[k]).adjoint(), s);
    }
    return s;
}

// Branches after the attacker acts on every branch of `in`. Receivers
// 1..applied_upto have already applied their passes.
std::vector<Branch> attack_branches(const std::vector<Branch> &in, const AttackModel &model,
                                    StateLabel label, const OpTuple &ops, int applied_upto) {
    std::vector<std::pair<Basis, double>> bases;
    std::optional<UnitaryKind> strip;
    if (const auto *ir = std::get_if<InterceptResend>(&model)) {
        bases = basis_distribution(ir->basis_strategy);
    } else if (const auto *dr = std::get_if<DishonestReceiver>(&model)) {
        const int k = dr->party.index();
        if (k == 0) {
            bases = {{basis_of(label), 1.0}};
        } else {
            bases = basis_distribution(BasisStrategy::UniformRandom);
            if (k <= applied_upto) {
                strip = ops[static_cast<std::size_t>(k)];
            }
        }
    } else {
        return in;
    }

    std::vector<Branch> out;
    for (const auto &b : in) {
        const PureState seen = strip ? apply1(make_unitary(*strip).adjoint(), b.state) : b.state;
        for (const auto &[basis, pb] : bases) {
            for (StateLabel outcome : labels_of(basis)) {
                const double p = outcome_probability(seen, outcome);
                if (p <= 0.0) {
                    continue;
                }
                PureState resent = state_of_label(outcome);
                if (strip) {
                    resent = apply1(make_unitary(*strip), resent);
                }
                out.push_back(Branch{b.weight * pb * p, resent, Observation{basis, outcome, strip}});
            }
        }
    }
    return out;
}

// Walks the distribution chain for one (label, ops) and returns the branches
// arriving at Alice.
std::vector<Branch> walk_distribution(const AttackModel &model, const Segment &target,
                                      const std::vector<Segment> &hops, StateLabel label,
                                      const OpTuple &ops, double weight) {
    std::vector<Branch> branches{Branch{weight, state_of_label(label), std::nullopt}};
    for (std::size_t i = 0; i < hops.size(); ++i) {
        if (i >= 1) {
            const Unitary2 u = make_unitary(ops[i]);
            for (auto &b : branches) {
                b.state = apply1(u, b.state);
            }
        }
        if (hops[i] == target) {
            branches = attack_branches(branches, model, label, ops, static_cast<int>(i));
        }
    }
    return branches;
}

std::vector<Segment> distribution_hops(int num_receivers) {
    std::vector<Segment> hops;
    for (int i = 0; i < num_receivers; ++i) {
        const PartyId to = (i + 1 < num_receivers) ? PartyId::receiver(i + 1) : PartyId::alice();
        hops.push_back(Segment{PartyId::receiver(i), to, Phase::Distribution});
    }
    return hops;
}

// Calls fn(label, ops, bit, branch) for every terminal branch of a run whose
// Return segment is attacked, after the attacker and before decoding.
template <typename Fn>
void for_each_return_branch(const AttackModel &model, const ProtocolShape &shape, Fn &&fn) {
    const Segment target = *attacked_segment(model);
    const auto hops = distribution_hops(shape.num_receivers);
    const Unitary2 flip = make_unitary(UnitaryKind::Flip);
    const double w0 = 0.25 * tuple_weight(shape.num_receivers);
    for (StateLabel label : kAllLabels) {
        for_each_op_tuple(shape.num_receivers, [&](const OpTuple &ops) {
            const auto arriving = walk_distribution(model, target, hops, label, ops, w0);
            for (int bit = 0; bit < 2; ++bit) {
                std::vector<Branch> encoded;
                for (const auto &b : arriving) {
                    encoded.push_back(
                        Branch{b.weight * 0.5, bit ? apply1(flip, b.state) : b.state, std::nullopt});
                }
                for (const auto &b : attack_branches(encoded, model, label, ops,
                                                     shape.num_receivers - 1)) {
                    fn(label, ops, bit, b);
                }
            }
        });
    }
}

double teleport_detection_rate(BasisStrategy strategy) {
    // Eve measures the travelling half (qubit 1) of Phi+, then both halves are
    // measured in a common uniformly chosen basis.
    const PureState pair = bell_state(BellOutcome::PhiPlus);
    double mismatch = 0.0;
    for (const auto &[eve_basis, pe] : basis_distribution(strategy)) {
        for (StateLabel e : labels_of(eve_basis)) {
            const PureState ev = state_of_label(e);
            std::array<Amplitude, 2> rest{};
            for (int x = 0; x < 2; ++x) {
                rest[x] = std::conj(ev[0]) * pair[2 * x] + std::conj(ev[1]) * pair[2 * x + 1];
            }
            const double p_eve = std::norm(rest[0]) + std::norm(rest[1]);
            if (p_eve <= 0.0) {
                continue;
            }
            const PureState post = tensor(PureState::normalized(rest), ev);
            for (Basis common : {Basis::Rectilinear, Basis::Diagonal}) {
                for (StateLabel a : labels_of(common)) {
                    for (StateLabel b : labels_of(common)) {
                        if (a == b) {
                            continue;
                        }
                        const double p = overlap_probability(
                            tensor(state_of_label(a), state_of_label(b)), post);
                        mismatch += pe * p_eve * 0.5 * p;
                    }
                }
            }
        }
    }
    return mismatch;
}

} // namespace

std::vector<Segment> traversed_segments(const ProtocolShape &shape) {
    std::vector<Segment> segs;
    if (shape.with_teleport) {
        segs.push_back(Segment{PartyId::receiver(0), PartyId::alice(), Phase::Teleport});
    }
    for (const auto &hop : distribution_hops(shape.num_receivers)) {
        segs.push_back(hop);
    }
    segs.push_back(Segment{PartyId::alice(), PartyId::receiver(shape.final_holder), Phase::Return});
    return segs;
}

void validate_attack(const AttackModel &model, const ProtocolShape &shape) {
    const auto target = attacked_segment(model);
    if (!target) {
        return;
    }
    const auto segs = traversed_segments(shape);
    if (std::find(segs.begin(), segs.end(), *target) == segs.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    "attack segment " + to_string(*target) + " is not traversed in this run");
    }
    if (const auto *dr = std::get_if<DishonestReceiver>(&model)) {
        const PartyId p = dr->party;
        if (!p.is_receiver() || p.index() >= shape.num_receivers) {
            throw Error(ErrorCode::InvalidArgument,
                        "dishonest party " + p.label() + " is not a receiver of this run");
        }
        if (p == target->from || p == target->to) {
            throw Error(ErrorCode::InvalidArgument,
                        "dishonest party " + p.label() + " is an endpoint of " +
                            to_string(*target));
        }
        if (target->phase == Phase::Teleport) {
            throw Error(ErrorCode::InvalidArgument,
                        "dishonest receivers are not modelled on the teleport segment");
        }
    }
}

std::vector<EveRecord> apply_attack(const AttackModel &model, const Segment &transit,
                                    std::span<PhotonRecord> photons, RandomStream &rng) {
    const auto target = attacked_segment(model);
    if (!target) {
        return {};
    }
    if (!(*target == transit)) {
        throw Error(ErrorCode::InvalidArgument, "attack targets " + to_string(*target) +
                                                    " but photons are crossing " +
                                                    to_string(transit));
    }

    std::vector<EveRecord> records;
    records.reserve(photons.size());
    for (auto &photon : photons) {
        EveRecord rec;
        rec.position = photon.position;
        PureState seen = photon.current;
        if (const auto *ir = std::get_if<InterceptResend>(&model)) {
            rec.measured_basis = draw_basis(ir->basis_strategy, rng);
        } else {
            const auto &dr = std::get<DishonestReceiver>(model);
            if (dr.party.index() == 0) {
                rec.measured_basis = basis_of(photon.initial_label);
            } else {
                rec.stripped_op = op_of(photon, dr.party);
                if (rec.stripped_op) {
                    seen = apply1(make_unitary(*rec.stripped_op).adjoint(), seen);
                }
                rec.measured_basis = draw_basis(BasisStrategy::UniformRandom, rng);
            }
        }
        auto m = measure_in_basis(seen, rec.measured_basis, rng);
        rec.observed_label = m.outcome;
        rec.resent_label = m.outcome;
        photon.current = rec.stripped_op ? apply1(make_unitary(*rec.stripped_op), m.collapsed)
                                         : m.collapsed;
        records.push_back(rec);
    }
    return records;
}

double predicted_detection_rate(const AttackModel &model, const ProtocolShape &shape) {
    const auto target = attacked_segment(model);
    if (!target) {
        return 0.0;
    }
    validate_attack(model, shape);

    if (target->phase == Phase::Teleport) {
        return teleport_detection_rate(std::get<InterceptResend>(model).basis_strategy);
    }

    double err = 0.0;
    if (target->phase == Phase::Return) {
        for_each_return_branch(model, shape,
                               [&](StateLabel label, const OpTuple &ops, int bit, const Branch &b) {
                                   const PureState s = undo_chain(b.state, ops);
                                   const StateLabel expect = bit ? flipped(label) : label;
                                   err += b.weight * (1.0 - outcome_probability(s, expect));
                               });
        return err;
    }

    const auto hops = distribution_hops(shape.num_receivers);
    const double w0 = 0.25 * tuple_weight(shape.num_receivers);
    for (StateLabel label : kAllLabels) {
        for_each_op_tuple(shape.num_receivers, [&](const OpTuple &ops) {
            for (const auto &b : walk_distribution(model, *target, hops, label, ops, w0)) {
                const PureState s = undo_chain(b.state, ops);
                err += b.weight * (1.0 - outcome_probability(s, label));
            }
        });
    }
    return err;
}

Coalition attacker_knowledge(const AttackModel &model) {
    if (const auto *dr = std::get_if<DishonestReceiver>(&model)) {
        return {dr->party.index()};
    }
    return {};
}

int eve_guess(const EveRecord &record, const PhotonRecord &truth, const Coalition &knowledge,
              int num_receivers) {
    const Unitary2 flip = make_unitary(UnitaryKind::Flip);
    std::array<double, 2> likelihood{0.0, 0.0};

    for (StateLabel label : kAllLabels) {
        if (knowledge.contains(0) && label != truth.initial_label) {
            continue;
        }
        for_each_op_tuple(num_receivers, [&](const OpTuple &ops) {
            for (int k = 1; k < num_receivers; ++k) {
                if (knowledge.contains(k) &&
                    op_of(truth, PartyId::receiver(k)) != ops[static_cast<std::size_t>(k)]) {
                    return;
                }
            }
            PureState s = state_of_label(label);
            for (std::size_t k = 1; k < ops.size(); ++k) {
                s = apply1(make_unitary(ops[k]), s);
            }
            for (int bit = 0; bit < 2; ++bit) {
                PureState wire = bit ? apply1(flip, s) : s;
                if (record.stripped_op) {
                    wire = apply1(make_unitary(*record.stripped_op).adjoint(), wire);
                }
                likelihood[static_cast<std::size_t>(bit)] +=
                    outcome_probability(wire, record.observed_label);
            }
        });
    }
    return likelihood[1] > likelihood[0] + 1e-12 ? 1 : 0;
}

namespace {

// eve_guess depends only on the observation and the known secrets; memoize on those.
class GuessCache {
  public:
    GuessCache(Coalition knowledge, int num_receivers)
        : knowledge_(std::move(knowledge)), num_receivers_(num_receivers) {}

    int guess(const EveRecord &rec, const PhotonRecord &truth) {
        std::vector<int> known_ops;
        for (int k : knowledge_) {
            if (k > 0) {
                const auto op = op_of(truth, PartyId::receiver(k));
                known_ops.push_back(op ? static_cast<int>(*op) : -1);
            }
        }
        Key key{static_cast<int>(rec.measured_basis), static_cast<int>(rec.observed_label),
                rec.stripped_op ? static_cast<int>(*rec.stripped_op) : -1,
                knowledge_.contains(0) ? static_cast<int>(truth.initial_label) : -1,
                std::move(known_ops)};
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(std::move(key), eve_guess(rec, truth, knowledge_, num_receivers_))
                     .first;
        }
        return it->second;
    }

  private:
    using Key = std::tuple<int, int, int, int, std::vector<int>>;
    Coalition knowledge_;
    int num_receivers_;
    std::map<Key, int> cache_;
};

} // namespace

double eve_accuracy(std::span<const EveRecord> records, std::span<const PhotonRecord> photons,
                    const Coalition &knowledge, int num_receivers) {
    if (records.empty()) {
        throw Error(ErrorCode::InvalidArgument, "eve_accuracy: no intercepted photons");
    }
    GuessCache cache(knowledge, num_receivers);
    int correct = 0;
    for (const auto &rec : records) {
        if (rec.position < 0 || static_cast<std::size_t>(rec.position) >= photons.size()) {
            throw Error(ErrorCode::InvalidArgument, "eve_accuracy: record position out of range");
        }
        const PhotonRecord &truth = photons[static_cast<std::size_t>(rec.position)];
        if (!truth.encoded_bit) {
            throw Error(ErrorCode::InvalidArgument,
                        "eve_accuracy: intercepted photon carries no message bit");
        }
        correct += (cache.guess(rec, truth) == *truth.encoded_bit) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

double eve_accuracy(std::span<const EveRecord> records, std::span<const PhotonRecord> photons,
                    const AttackModel &model, int num_receivers) {
    return eve_accuracy(records, photons, attacker_knowledge(model), num_receivers);
}

double predicted_eve_accuracy(const AttackModel &model, const ProtocolShape &shape) {
    const auto target = attacked_segment(model);
    if (!target || target->phase != Phase::Return) {
        throw Error(ErrorCode::InvalidArgument,
                    "eve accuracy is defined for attacks on the return segment only");
    }
    validate_attack(model, shape);
    GuessCache cache(attacker_knowledge(model), shape.num_receivers);

    double acc = 0.0;
    for_each_return_branch(model, shape,
                           [&](StateLabel label, const OpTuple &ops, int bit, const Branch &b) {
                               PhotonRecord truth;
                               truth.initial_label = label;
                               for (int k = 1; k < shape.num_receivers; ++k) {
                                   truth.ops_applied.push_back(
                                       {PartyId::receiver(k), ops[static_cast<std::size_t>(k)]});
                               }
                               EveRecord rec;
                               rec.measured_basis = b.seen->basis;
                               rec.observed_label = b.seen->outcome;
                               rec.stripped_op = b.seen->stripped;
                               if (cache.guess(rec, truth) == bit) {
                                   acc += b.weight;
                               }
                           });
    return acc;
}

} // namespace qss
