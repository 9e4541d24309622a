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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Statistical checks use a plain 3 sigma bound.
#include "qss/harness.hpp"
#include "qss/qsscm.hpp"
#include "qss/ssqi.hpp"

#include "reference.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace {

using namespace qss;

struct Verdict {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string &what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

PartyId R(int i) { return PartyId::receiver(i); }

// Every seed below derives from this one value and a fixed label.
constexpr std::uint64_t kMasterSeed = 2026;

std::uint64_t seed(const std::string &label) { return party_seed(kMasterSeed, label); }

BitString random_bits(std::size_t n, std::uint64_t seed) {
    RandomStream rng(seed);
    BitString b(n);
    for (auto &x : b) {
        x = static_cast<int>(rng.uniform_index(2));
    }
    return b;
}

ProtocolConfig config(int receivers, int batch, std::uint64_t seed) {
    ProtocolConfig c;
    c.num_receivers = receivers;
    c.batch_size = batch;
    c.master_seed = seed;
    c.record_transcript = false;
    return c;
}

bool within(double observed, double p, double count) {
    return std::abs(observed - p) <= ref::three_sigma(p, count);
}

// ----------------------------------------------------------------- AC1

Verdict honest_correctness() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    int runs = 0;
    for (int n = 2; n <= 6; ++n) {
        for (int s = 0; s < 20; ++s) {
            const std::string tag = "n=" + std::to_string(n) + " seed=" + std::to_string(s);
            const ProtocolConfig cfg = config(n, 2000, seed("ac1/" + tag));
            const BitString message =
                random_bits(static_cast<std::size_t>(cfg.message_capacity()), seed("ac1/msg/" + tag));
            const ProtocolOutcome out = run_protocol(cfg, message);
            v.require(!out.aborted(), tag + " aborted");
            v.require(out.check_error_rate == 0.0, tag + " check errors");
            v.require(out.decoded_bits == message, tag + " decoded message differs");
            v.require(out.auth_passed, tag + " authentication failed");
            ++runs;
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(secs < 10.0, fmt("took %.2f s", secs));
    if (v.ok) {
        v.detail = std::to_string(runs) + " runs, " + fmt("%.2f s", secs);
    }
    return v;
}

// ----------------------------------------------------------------- AC2

Verdict unitary_algebra() {
    Verdict v;
    const double r = 1.0 / std::sqrt(2.0);
    // Expected images, amplitudes in the {H, V} basis.
    struct Row {
        UnitaryKind op;
        StateLabel in;
        PureState out;
    };
    const Row table[] = {
        {UnitaryKind::Flip, StateLabel::H, PureState{0.0, -1.0}},
        {UnitaryKind::Flip, StateLabel::V, PureState{1.0, 0.0}},
        {UnitaryKind::Flip, StateLabel::UDiag, PureState{r, -r}},
        {UnitaryKind::Flip, StateLabel::DDiag, PureState{-r, -r}},
        {UnitaryKind::Hada, StateLabel::H, PureState{r, r}},
        {UnitaryKind::Hada, StateLabel::V, PureState{r, -r}},
        {UnitaryKind::Hada, StateLabel::UDiag, PureState{1.0, 0.0}},
        {UnitaryKind::Hada, StateLabel::DDiag, PureState{0.0, 1.0}},
    };
    for (const auto &row : table) {
        const PureState got = apply1(make_unitary(row.op), state_of_label(row.in));
        for (int i = 0; i < 2; ++i) {
            v.require(std::abs(got[i] - row.out[i]) < 1e-12,
                      std::string(to_string(row.op)) + " on " + std::string(to_string(row.in)));
        }
        // Same action through the independent real-arithmetic model.
        const int op = row.op == UnitaryKind::Flip ? 1 : 2;
        const auto img = ref::mul(ref::op_mat(op), ref::label_vec(static_cast<int>(row.in)));
        for (int i = 0; i < 2; ++i) {
            v.require(std::abs(img[static_cast<std::size_t>(i)] - row.out[i].real()) < 1e-12,
                      "reference disagrees on " + std::string(to_string(row.in)));
        }
    }
    // U_H = U * Hada mapped through the composite as well.
    const Unitary2 f = make_unitary(UnitaryKind::Flip);
    const Unitary2 h = make_unitary(UnitaryKind::Hada);
    for (UnitaryKind k : {UnitaryKind::Id, UnitaryKind::Flip, UnitaryKind::Hada, UnitaryKind::Corr1,
                          UnitaryKind::Corr2, UnitaryKind::Corr3}) {
        v.require(make_unitary(k).unitarity_defect() < 1e-12,
                  "not unitary: " + std::string(to_string(k)));
    }
    v.require((f * f).distance(-make_unitary(UnitaryKind::Id)) < 1e-12, "U^2 != -I");
    v.require((f * h).distance(-(h * f)) < 1e-12, "Flip and Hada commute");
    if (v.ok) {
        v.detail = "8 table identities, unitarity, U^2=-I, anticommutation";
    }
    return v;
}

// ----------------------------------------------------------------- AC3

Verdict intercept_resend() {
    Verdict v;
    const int batch = 25000; // 5000 check photons
    int segments = 0;
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
        const ProtocolConfig cfg = config(n, batch, seed("ac3/n" + std::to_string(n)));
        for (const Segment &seg : traversed_segments(cfg.shape())) {
            if (seg.phase != Phase::Distribution) {
                continue;
            }
            const InterceptResend attack{seg, BasisStrategy::UniformRandom};
            const double oracle = ref::distribution_error(
                n, seg.from.index(), ref::uniform_eve());
            const double pred = predicted_detection_rate(attack, cfg.shape());
            const ProtocolOutcome out = run_protocol(
                cfg, random_bits(static_cast<std::size_t>(cfg.message_capacity()), seed("ac3/msg")), attack);
            const std::string tag = "n=" + std::to_string(n) + " " + to_string(seg);
            v.require(std::abs(oracle - 0.25) < 1e-12 && std::abs(pred - oracle) < 1e-12,
                      tag + " oracle");
            v.require(out.check_photons >= 5000, tag + " too few check photons");
            v.require(within(out.check_error_rate, oracle, out.check_photons),
                      tag + fmt(" rate %.4f", out.check_error_rate));
            v.require(out.aborted(), tag + " did not abort");
            worst = std::max(worst, std::abs(out.check_error_rate - oracle));
            ++segments;
        }
    }
    // abort_fraction through the harness.
    RunSpec spec = parse_config("receivers: 3\nbatch_size: 25000\ntrials: 5\nseed: 3\n"
                                "attack: {type: intercept_resend, segment: {from: r1, to: r2}}\n");
    const StatsReport rep = run_trials(spec);
    v.require(rep.metrics.at("abort_fraction").mean == 1.0, "abort_fraction below 1");
    if (v.ok) {
        v.detail = std::to_string(segments) + " segments, max |rate-0.25| " + fmt("%.4f", worst) +
                   fmt(" (3 sigma %.4f), abort_fraction 1.0", ref::three_sigma(0.25, 5000));
    }
    return v;
}

// ----------------------------------------------------------------- AC4

Verdict dishonest_receiver() {
    Verdict v;
    // Bob, Charlie and Alice: Bob listens on the Charlie -> Alice hop.
    const ProtocolConfig cfg = config(2, 25000, seed("ac4"));
    const DishonestReceiver attack{R(0), Segment{R(1), PartyId::alice(), Phase::Distribution}};
    const double pred = predicted_detection_rate(attack, cfg.shape());
    const double oracle = ref::distribution_error(2, 1, ref::dishonest(0));
    const ProtocolOutcome out = run_protocol(
        cfg, random_bits(static_cast<std::size_t>(cfg.message_capacity()), seed("ac4/msg")), attack);
    v.require(std::abs(pred - oracle) < 1e-12, fmt("prediction %.6f vs oracle %.6f", pred, oracle));
    v.require(pred > 0.0, "prediction is 0");
    v.require(within(out.check_error_rate, pred, out.check_photons),
              fmt("rate %.4f vs %.4f", out.check_error_rate, pred));
    if (v.ok) {
        v.detail = fmt("rate %.4f, predicted %.4f, 3 sigma %.4f", out.check_error_rate, pred,
                       ref::three_sigma(pred, out.check_photons));
    }
    return v;
}

// ----------------------------------------------------------------- AC5

Verdict non_collaboration() {
    Verdict v;
    const int bits = 10000;
    int cases = 0;
    double max_oracle = 0.0;
    for (int n = 2; n <= 5; ++n) {
        const std::string tag_n = "ac5/n" + std::to_string(n);
        RandomStream rng(seed(tag_n));
        auto batch = prepare_batch(bits, rng);
        for (int r = 1; r < n; ++r) {
            encrypt_pass(batch, R(r), rng);
        }
        const BitString message = random_bits(bits, seed(tag_n + "/msg"));
        encode_message(batch, message);
        for (int r = 0; r < n; ++r) {
            std::vector<PooledKnowledge> partial;
            for (const auto &p : batch) {
                partial.push_back(pool_knowledge(p, Coalition{r}));
            }
            RandomStream guess_rng(seed(tag_n + "/r" + std::to_string(r)));
            const BitString guess =
                decode_partial(batch, partial, n, GuessStrategy::AssumeIdentity, guess_rng);
            int ok = 0;
            for (std::size_t i = 0; i < guess.size(); ++i) {
                ok += guess[i] == message[i] ? 1 : 0;
            }
            const double oracle = ref::partial_success(n, {r});
            const double rate = static_cast<double>(ok) / bits;
            const std::string tag = "n=" + std::to_string(n) + " {r" + std::to_string(r) + "}";
            v.require(oracle < 1.0, tag + " oracle reaches 1");
            v.require(std::abs(predicted_partial_success(n, {r}) - oracle) < 1e-12,
                      tag + " library oracle differs");
            v.require(within(rate, oracle, bits), tag + fmt(" rate %.4f vs %.4f", rate, oracle));
            max_oracle = std::max(max_oracle, oracle);
            ++cases;
        }
    }
    if (v.ok) {
        v.detail = std::to_string(cases) + " coalitions, max oracle " + fmt("%.4f", max_oracle);
    }
    return v;
}

// ----------------------------------------------------------------- AC6

Verdict teleport_exactness() {
    Verdict v;
    std::mt19937_64 gen(seed("ac6/inputs"));
    double worst = 0.0;
    for (BellOutcome k : kAllBellOutcomes) {
        for (int i = 0; i < 1000; ++i) {
            const auto a = ref::random_qubit(gen);
            const UnknownQubit in(a[0], a[1]);
            const PureState full = tensor(in.state(), bell_state(BellOutcome::PhiPlus));
            const PureState forced = bell_project(full, {0, 2}, k).remaining;
            const PureState fixed = apply1(correction_for(k), forced);
            const double fid = overlap_probability(in.state(), fixed);
            worst = std::max(worst, std::abs(1.0 - fid));
            v.require(std::abs(1.0 - fid) < 1e-9, "fidelity below 1 on " + std::string(to_string(k)));
            v.require(equal_up_to_phase(branch_state(in, k), forced, 1e-12),
                      "direct branch differs on " + std::string(to_string(k)));
            const PureState raw =
                PureState::normalized(ref::teleport_branch(a[0], a[1], static_cast<int>(k)));
            v.require(equal_up_to_phase(raw, forced, 1e-12),
                      "reference branch differs on " + std::string(to_string(k)));
        }
    }
    RandomStream rng(seed("ac6/outcomes"));
    std::array<int, 4> counts{};
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const auto a = ref::random_qubit(gen);
        ++counts[static_cast<std::size_t>(teleport(UnknownQubit(a[0], a[1]), rng).outcome)];
    }
    for (int c : counts) {
        v.require(within(static_cast<double>(c) / trials, 0.25, trials),
                  fmt("outcome frequency %.4f", static_cast<double>(c) / trials));
    }
    if (v.ok) {
        v.detail = fmt("max |1-F| %.1e, outcome counts ", worst) + std::to_string(counts[0]) + "/" +
                   std::to_string(counts[1]) + "/" + std::to_string(counts[2]) + "/" +
                   std::to_string(counts[3]);
    }
    return v;
}

// ----------------------------------------------------------------- AC7

Verdict ssqi_threshold() {
    Verdict v;
    std::mt19937_64 gen(seed("ac7/inputs"));
    for (int i = 0; i < 100; ++i) {
        const auto a = ref::random_qubit(gen);
        const auto out = run_ssqi(config(3, 60, trial_seed(seed("ac7/full"), static_cast<std::uint64_t>(i))),
                                  UnknownQubit(a[0], a[1]), full_coalition(3), NoAttack{});
        v.require(out.fidelity && std::abs(*out.fidelity - 1.0) < 1e-9,
                  "full coalition fidelity below 1");
    }
    const int trials = 10000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < trials; ++i) {
        const auto a = ref::random_qubit(gen);
        const auto out = run_ssqi(config(3, 40, trial_seed(seed("ac7/bob"), static_cast<std::uint64_t>(i))),
                                  UnknownQubit(a[0], a[1]), Coalition{0}, NoAttack{});
        if (!out.fidelity) {
            v.require(false, "Bob-only round without a fidelity");
            break;
        }
        sum += *out.fidelity;
        sum2 += *out.fidelity * *out.fidelity;
    }
    const double mean = sum / trials;
    const double sd = std::sqrt((sum2 - trials * mean * mean) / (trials - 1));
    const double oracle = ref::random_correction_fidelity();
    const auto lib = predicted_coalition_fidelity(Coalition{0}, 3);
    v.require(oracle < 1.0, "oracle reaches 1");
    v.require(lib && std::abs(*lib - oracle) < 1e-12, "library oracle differs");
    v.require(std::abs(mean - oracle) <= 3.0 * sd / std::sqrt(trials),
              fmt("Bob-only mean %.4f vs %.4f", mean, oracle));
    if (v.ok) {
        v.detail = fmt("full 1.0 x100, Bob-only mean %.4f vs oracle %.4f (3 sigma %.4f)", mean,
                       oracle, 3.0 * sd / std::sqrt(trials));
    }
    return v;
}

// ----------------------------------------------------------------- AC8

std::string slurp(const std::filesystem::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Verdict determinism() {
    Verdict v;
    const std::filesystem::path dir = QSS_TEST_TMP;
    std::filesystem::create_directories(dir);
    const char *configs[] = {
        "receivers: 5\nbatch_size: 2000\ntrials: 8\nthreads: 4\nseed: 81\n",
        "receivers: 3\nbatch_size: 25000\ntrials: 3\nthreads: 2\nseed: 82\n"
        "attack: {type: intercept_resend, segment: {from: r1, to: r2}}\n",
        "receivers: 2\nbatch_size: 25000\ntrials: 3\nseed: 83\n"
        "attack: {type: dishonest_receiver, party: Bob, segment: {from: r1, to: alice}}\n",
        "receivers: 3\nbatch_size: 2000\ntrials: 10\nseed: 84\n"
        "attack: {type: intercept_resend, segment: {from: alice, to: r2}}\n",
        "protocol: ssqi\nbatch_size: 60\ntrials: 50\nthreads: 3\nseed: 85\ncoalition: [Bob]\n",
    };
    int idx = 0;
    for (const char *text : configs) {
        RunSpec spec = parse_config(text, "acceptance");
        std::string files[2][2];
        for (int pass = 0; pass < 2; ++pass) {
            const auto stats = dir / ("ac8_" + std::to_string(idx) + "_" + std::to_string(pass) +
                                      "_stats.json");
            const auto trace = dir / ("ac8_" + std::to_string(idx) + "_" + std::to_string(pass) +
                                      "_trace.jsonl");
            // Same output names on both passes so the recorded config matches.
            spec.stats_path = "stats.json";
            spec.transcript_path = "trace.jsonl";
            write_outputs(run_trials(spec), stats.string(), trace.string());
            files[pass][0] = slurp(stats);
            files[pass][1] = slurp(trace);
        }
        v.require(!files[0][0].empty() && !files[0][1].empty(),
                  "config " + std::to_string(idx) + " wrote empty files");
        v.require(files[0][0] == files[1][0], "stats differ for config " + std::to_string(idx));
        v.require(files[0][1] == files[1][1],
                  "transcripts differ for config " + std::to_string(idx));
        ++idx;
    }
    if (v.ok) {
        v.detail = std::to_string(idx) + " configs, stats and transcripts byte-identical";
    }
    return v;
}

} // namespace

int main() {
    struct Criterion {
        const char *id;
        const char *name;
        std::function<Verdict()> run;
    };
    const Criterion criteria[] = {
        {"AC1", "honest correctness", honest_correctness},
        {"AC2", "unitary algebra", unitary_algebra},
        {"AC3", "intercept-resend detection", intercept_resend},
        {"AC4", "dishonest-receiver detection", dishonest_receiver},
        {"AC5", "non-collaboration bound", non_collaboration},
        {"AC6", "teleportation exactness", teleport_exactness},
        {"AC7", "qubit sharing threshold", ssqi_threshold},
        {"AC8", "determinism", determinism},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception &e) {
            v.ok = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %s  %s: %s\n", c.id, v.ok ? "PASS" : "FAIL", c.name, v.detail.c_str());
        std::fflush(stdout);
        failed += v.ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
                std::size(criteria));
    return failed == 0 ? 0 : 1;
}
