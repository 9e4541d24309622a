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
#include "qss/error.hpp"
#include "qss/ssqi.hpp"

#include "reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

using namespace qss;

PartyId R(int i) { return PartyId::receiver(i); }
const Segment kTeleportHop{R(0), PartyId::alice(), Phase::Teleport};

UnknownQubit random_input(std::mt19937_64 &gen) {
    const auto a = ref::random_qubit(gen);
    return UnknownQubit(a[0], a[1]);
}

ProtocolConfig round_config(int receivers, int batch, std::uint64_t seed) {
    ProtocolConfig c;
    c.num_receivers = receivers;
    c.batch_size = batch;
    c.master_seed = seed;
    c.record_transcript = false;
    return c;
}

// ---------------------------------------------------------- UnknownQubit

TEST(UnknownQubit, RequiresUnitNorm) {
    EXPECT_THROW(UnknownQubit(1.0, 1.0), Error);
    EXPECT_NO_THROW(UnknownQubit(0.6, Amplitude(0.0, 0.8)));
}

TEST(UnknownQubit, RandomInputsAreHaarDistributed) {
    RandomStream rng(1);
    const int n = 20000;
    double m2 = 0.0;
    double m4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto q = UnknownQubit::random(rng);
        const double p = std::norm(q.alpha());
        EXPECT_NEAR(p + std::norm(q.beta()), 1.0, 1e-12);
        m2 += p;
        m4 += p * p;
    }
    // |alpha|^2 is uniform on [0, 1] for Haar states: mean 1/2, second moment 1/3.
    EXPECT_NEAR(m2 / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(m4 / n, 1.0 / 3.0, 3.0 * std::sqrt((1.0 / 5.0 - 1.0 / 9.0) / n));
}

// --------------------------------------------------------------- branches

TEST(BranchState, NamedBranches) {
    const Amplitude a(0.6, 0.0);
    const Amplitude b(0.0, 0.8);
    const UnknownQubit in(a, b);
    EXPECT_TRUE(equal_up_to_phase(branch_state(in, BellOutcome::PhiPlus), PureState{a, b}, 1e-12));
    EXPECT_TRUE(equal_up_to_phase(branch_state(in, BellOutcome::PsiPlus), PureState{b, a}, 1e-12));
    EXPECT_TRUE(equal_up_to_phase(branch_state(in, BellOutcome::PhiMinus), PureState{a, -b}, 1e-12));
    EXPECT_TRUE(equal_up_to_phase(branch_state(in, BellOutcome::PsiMinus), PureState{-b, a}, 1e-12));
}

// The direct table against both the 3-qubit projection and the plain
// 8-amplitude expansion.
TEST(BranchState, MatchesFullBellMeasurement) {
    std::mt19937_64 gen(2);
    for (int i = 0; i < 500; ++i) {
        const UnknownQubit in = random_input(gen);
        const PureState full = tensor(in.state(), bell_state(BellOutcome::PhiPlus));
        for (int k = 0; k < 4; ++k) {
            const BellOutcome o = kAllBellOutcomes[static_cast<std::size_t>(k)];
            const PureState direct = branch_state(in, o);
            EXPECT_TRUE(equal_up_to_phase(direct, bell_project(full, {0, 2}, o).remaining, 1e-12));
            EXPECT_TRUE(equal_up_to_phase(
                direct, PureState::normalized(ref::teleport_branch(in.alpha(), in.beta(), k)), 1e-12));
        }
    }
}

TEST(Teleport, PreCorrectionIsTheSampledBranch) {
    RandomStream rng(3);
    std::mt19937_64 gen(3);
    for (int i = 0; i < 1000; ++i) {
        const UnknownQubit in = random_input(gen);
        const auto t = teleport(in, rng);
        EXPECT_TRUE(equal_up_to_phase(t.pre_correction, branch_state(in, t.outcome), 1e-12));
    }
}

TEST(Teleport, OutcomesUniform) {
    RandomStream rng(4);
    std::mt19937_64 gen(4);
    std::array<int, 4> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        ++counts[static_cast<std::size_t>(teleport(random_input(gen), rng).outcome)];
    }
    for (int c : counts) {
        EXPECT_NEAR(static_cast<double>(c) / n, 0.25, ref::three_sigma(0.25, n));
    }
}

TEST(Teleport, ThroughRejectsWrongPairSize) {
    RandomStream rng(5);
    EXPECT_THROW(teleport_through(UnknownQubit(1.0, 0.0), state_of_label(StateLabel::H), rng), Error);
}

// ------------------------------------------------------------ corrections

TEST(CorrectionFor, Table) {
    EXPECT_LT(correction_for(BellOutcome::PhiPlus).distance(make_unitary(UnitaryKind::Id)), 1e-15);
    EXPECT_LT(correction_for(BellOutcome::PsiPlus).distance(make_unitary(UnitaryKind::Corr1)), 1e-15);
    EXPECT_LT(correction_for(BellOutcome::PhiMinus).distance(make_unitary(UnitaryKind::Corr2)), 1e-15);
    EXPECT_LT(correction_for(BellOutcome::PsiMinus).distance(make_unitary(UnitaryKind::Corr3)), 1e-15);
}

TEST(CorrectionFor, RestoresEveryBranch) {
    std::mt19937_64 gen(6);
    for (int i = 0; i < 1000; ++i) {
        const UnknownQubit in = random_input(gen);
        for (BellOutcome o : kAllBellOutcomes) {
            EXPECT_TRUE(equal_up_to_phase(apply1(correction_for(o), branch_state(in, o)), in.state(),
                                          1e-9));
        }
    }
}

TEST(OutcomeBits, BijectionAndConvention) {
    EXPECT_EQ(outcome_bits(BellOutcome::PhiPlus), (OutcomeBits{0, 0}));
    EXPECT_EQ(outcome_bits(BellOutcome::PsiPlus), (OutcomeBits{0, 1}));
    EXPECT_EQ(outcome_bits(BellOutcome::PhiMinus), (OutcomeBits{1, 0}));
    EXPECT_EQ(outcome_bits(BellOutcome::PsiMinus), (OutcomeBits{1, 1}));
    for (BellOutcome o : kAllBellOutcomes) {
        EXPECT_EQ(bits_outcome(outcome_bits(o)), o);
    }
    EXPECT_THROW(bits_outcome({2, 0}), Error);
}

// -------------------------------------------------------------- pair check

TEST(PairCheck, HonestPairsAgree) {
    RandomStream rng(7);
    RandomStream eve(8);
    const auto r = pair_distribution_check(5000, 0.4, 0.05, NoAttack{}, rng, eve);
    EXPECT_EQ(r.sampled, 2000);
    EXPECT_EQ(r.mismatches, 0);
    EXPECT_FALSE(r.abort);
    EXPECT_TRUE(r.eve_records.empty());
}

TEST(PairCheck, UniformEveOnTravellingHalf) {
    RandomStream rng(9);
    RandomStream eve(10);
    const auto r =
        pair_distribution_check(10000, 0.2, 0.05, InterceptResend{kTeleportHop}, rng, eve);
    const double p = ref::pair_check_error_uniform_eve();
    EXPECT_NEAR(p, 0.25, 1e-12);
    EXPECT_NEAR(r.error_rate, p, ref::three_sigma(p, r.sampled));
    EXPECT_NEAR(r.error_rate, p, 0.03);
    EXPECT_TRUE(r.abort);
    EXPECT_EQ(r.eve_records.size(), 10000U);
}

TEST(PairCheck, BadArgumentsRejected) {
    RandomStream rng(11);
    RandomStream eve(12);
    EXPECT_THROW(pair_distribution_check(4, 0.2, 0.05, NoAttack{}, rng, eve), Error);
    EXPECT_THROW(pair_distribution_check(0, 0.2, 0.05, NoAttack{}, rng, eve), Error);
    EXPECT_THROW(pair_distribution_check(100, 1.0, 0.05, NoAttack{}, rng, eve), Error);
    EXPECT_THROW(
        pair_distribution_check(100, 0.2, 0.05, DishonestReceiver{R(1), kTeleportHop}, rng, eve),
        Error);
}

TEST(PairCheck, OtherSegmentsLeavePairsAlone) {
    RandomStream rng(13);
    RandomStream eve(14);
    const Segment chain{R(1), R(2), Phase::Distribution};
    const auto r = pair_distribution_check(1000, 0.5, 0.05, InterceptResend{chain}, rng, eve);
    EXPECT_EQ(r.mismatches, 0);
}

// ---------------------------------------------------------------- rounds

TEST(RunSsqi, FullCoalitionReconstructsExactly) {
    std::mt19937_64 gen(15);
    for (int i = 0; i < 100; ++i) {
        const int receivers = 3 + i % 3;
        const auto cfg = round_config(receivers, 60, 100 + static_cast<std::uint64_t>(i));
        const UnknownQubit in = random_input(gen);
        const auto out = run_ssqi(cfg, in, full_coalition(receivers), NoAttack{});
        ASSERT_EQ(out.status, SsqiStatus::Completed);
        ASSERT_TRUE(out.decoded_outcome.has_value());
        EXPECT_EQ(*out.decoded_outcome, out.bell_outcome);
        EXPECT_EQ(out.outcome_bits, outcome_bits(out.bell_outcome));
        ASSERT_TRUE(out.fidelity.has_value());
        EXPECT_NEAR(*out.fidelity, 1.0, 1e-9);
        EXPECT_TRUE(equal_up_to_phase(*out.reconstructed, in.state(), 1e-9));
    }
}

TEST(RunSsqi, BobAloneGuessesTheCorrection) {
    const int trials = 10000;
    std::mt19937_64 gen(16);
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < trials; ++i) {
        const auto cfg = round_config(3, 40, 5000 + static_cast<std::uint64_t>(i));
        const auto out = run_ssqi(cfg, random_input(gen), Coalition{0}, NoAttack{});
        ASSERT_TRUE(out.fidelity.has_value());
        sum += *out.fidelity;
        sum2 += *out.fidelity * *out.fidelity;
    }
    const double mean = sum / trials;
    const double sd = std::sqrt((sum2 - trials * mean * mean) / (trials - 1));
    const double oracle = ref::random_correction_fidelity();
    EXPECT_LT(oracle, 1.0);
    EXPECT_NEAR(*predicted_coalition_fidelity(Coalition{0}, 3), oracle, 1e-12);
    EXPECT_NEAR(mean, oracle, 3.0 * sd / std::sqrt(trials));
    EXPECT_NEAR(mean, oracle, 0.02);
}

TEST(RunSsqi, CoalitionWithoutBobHasNoQubit) {
    const auto out = run_ssqi(round_config(4, 60, 17), UnknownQubit(1.0, 0.0), Coalition{1, 2, 3},
                              NoAttack{});
    EXPECT_EQ(out.status, SsqiStatus::Completed);
    EXPECT_FALSE(out.reconstructed.has_value());
    EXPECT_FALSE(out.fidelity.has_value());
    EXPECT_FALSE(predicted_coalition_fidelity(Coalition{1, 2, 3}, 4).has_value());
}

TEST(RunSsqi, ProperCoalitionsWithBobStayBelowOne) {
    for (const Coalition &c : {Coalition{0}, Coalition{0, 1}, Coalition{0, 2}, Coalition{0, 1, 2}}) {
        const auto f = predicted_coalition_fidelity(c, 4);
        ASSERT_TRUE(f.has_value());
        EXPECT_LT(*f, 1.0);
        EXPECT_NEAR(*f, ref::random_correction_fidelity(), 1e-12);
    }
    EXPECT_EQ(*predicted_coalition_fidelity(full_coalition(4), 4), 1.0);
}

TEST(RunSsqi, InvalidRoundsRejected) {
    const UnknownQubit in(1.0, 0.0);
    EXPECT_THROW(run_ssqi(round_config(2, 60, 1), in, {0, 1}, NoAttack{}), Error);
    EXPECT_THROW(run_ssqi(round_config(3, 60, 1), in, {0, 3}, NoAttack{}), Error);
    auto cfg = round_config(3, 60, 1);
    cfg.final_holder = 0;
    EXPECT_THROW(run_ssqi(cfg, in, {0, 1, 2}, NoAttack{}), Error);
    // Bob is not part of the classical sharing.
    EXPECT_THROW(run_ssqi(round_config(3, 60, 1), in, {0, 1, 2},
                          InterceptResend{Segment{R(0), R(1), Phase::Distribution}}),
                 Error);
}

TEST(RunSsqi, TeleportHopAttackAbortsAtPairCheck) {
    const auto out = run_ssqi(round_config(3, 2000, 18), UnknownQubit(1.0, 0.0), {0, 1, 2},
                              InterceptResend{kTeleportHop});
    EXPECT_EQ(out.status, SsqiStatus::PairCheckAborted);
    EXPECT_FALSE(out.sharing.has_value());
    EXPECT_FALSE(out.fidelity.has_value());
    EXPECT_NEAR(out.pair_check.error_rate, 0.25, ref::three_sigma(0.25, out.pair_check.sampled));
}

TEST(RunSsqi, SharingHopAttackAbortsTheSharing) {
    auto cfg = round_config(3, 4000, 19);
    const auto out = run_ssqi(cfg, UnknownQubit(1.0, 0.0), {0, 1, 2},
                              InterceptResend{Segment{R(1), R(2), Phase::Distribution}});
    EXPECT_EQ(out.status, SsqiStatus::SharingAborted);
    ASSERT_TRUE(out.sharing.has_value());
    EXPECT_NEAR(out.sharing->check_error_rate, 0.25,
                ref::three_sigma(0.25, out.sharing->check_photons));
}

TEST(SharingMaps, ReceiversShiftDown) {
    const auto cfg = round_config(4, 100, 20);
    const auto sub = sharing_config(cfg);
    EXPECT_EQ(sub.num_receivers, 3);
    EXPECT_NE(sub.master_seed, cfg.master_seed);
    const auto a = sharing_attack(DishonestReceiver{R(3), Segment{R(1), R(2), Phase::Distribution}});
    const auto *dr = std::get_if<DishonestReceiver>(&a);
    ASSERT_NE(dr, nullptr);
    EXPECT_EQ(dr->party, R(2));
    EXPECT_EQ(dr->segment, (Segment{R(0), R(1), Phase::Distribution}));
    EXPECT_TRUE(std::holds_alternative<NoAttack>(sharing_attack(InterceptResend{kTeleportHop})));
    EXPECT_THROW(sharing_attack(DishonestReceiver{R(0), Segment{R(1), R(2), Phase::Distribution}}),
                 Error);
}

TEST(PredictedRoundDetectionRate, PerLeg) {
    const auto cfg = round_config(4, 100, 21);
    EXPECT_NEAR(predicted_round_detection_rate(cfg, InterceptResend{kTeleportHop}), 0.25, 1e-12);
    EXPECT_NEAR(predicted_round_detection_rate(
                    cfg, InterceptResend{Segment{R(3), PartyId::alice(), Phase::Distribution}}),
                0.25, 1e-12);
    EXPECT_EQ(predicted_round_detection_rate(cfg, NoAttack{}), 0.0);
}

TEST(RunSsqi, TranscriptCoversEveryLeg) {
    auto cfg = round_config(3, 40, 22);
    cfg.record_transcript = true;
    const auto out = run_ssqi(cfg, UnknownQubit(1.0, 0.0), {0, 1, 2}, NoAttack{});
    const std::string text = out.transcript.to_jsonl(0);
    for (const char *step : {"\"pair_check\"", "\"teleport\"", "\"prepare\"", "\"decode\"",
                             "\"reconstruct\"", "\"sharing\""}) {
        EXPECT_NE(text.find(step), std::string::npos) << step;
    }
    // Sharing-run events use round labels: Charlie (r1) prepares, Bob only reconstructs.
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (line.find("\"scope\":\"sharing\"") != std::string::npos) {
            EXPECT_EQ(line.find("\"r0\""), std::string::npos) << line;
        }
        if (line.find("\"step\":\"prepare\"") != std::string::npos) {
            EXPECT_NE(line.find("\"party\":\"r1\""), std::string::npos) << line;
        }
    }
    const auto again = run_ssqi(cfg, UnknownQubit(1.0, 0.0), {0, 1, 2}, NoAttack{});
    EXPECT_EQ(again.transcript.to_jsonl(0), text);
}

} // namespace
