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
#include "qss/harness.hpp"

#include "qss/error.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace qss {

using json = nlohmann::ordered_json;

namespace {

constexpr const char *kMessageStream = "message";
constexpr const char *kInputStream = "input";
constexpr const char *kCoalitionStream = "coalition";

// ------------------------------------------------------------ YAML reading

struct Reader {
    std::string source;
    std::map<std::string, int> lines; // top-level key -> 1-based line

    [[nodiscard]] std::string at(const YAML::Node &node) const {
        const auto mark = node.Mark();
        if (mark.line < 0) {
            return source;
        }
        return source + ":" + std::to_string(mark.line + 1);
    }

    [[noreturn]] void fail(const YAML::Node &node, const std::string &field,
                           const std::string &why) const {
        throw Error(ErrorCode::Config, at(node) + ": " + field + ": " + why);
    }

    void check_keys(const YAML::Node &map, const std::string &prefix,
                    std::initializer_list<std::string_view> allowed) const {
        if (!map.IsMap()) {
            fail(map, prefix.empty() ? "config" : prefix, "expected a mapping");
        }
        for (const auto &kv : map) {
            const std::string key = kv.first.as<std::string>();
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(kv.first, prefix.empty() ? key : prefix + "." + key, "unknown key");
            }
        }
    }

    [[nodiscard]] std::string scalar(const YAML::Node &node, const std::string &field) const {
        if (!node.IsScalar()) {
            fail(node, field, "expected a scalar value");
        }
        return node.Scalar();
    }

    template <typename T>
    T number(const YAML::Node &node, const std::string &field, const char *what) const {
        const std::string text = scalar(node, field);
        T value{};
        const char *first = text.data();
        const char *last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || text.empty()) {
            fail(node, field, std::string("expected ") + what + ", got '" + text + "'");
        }
        return value;
    }

    int integer(const YAML::Node &n, const std::string &f) const {
        return number<int>(n, f, "an integer");
    }
    std::uint64_t unsigned64(const YAML::Node &n, const std::string &f) const {
        return number<std::uint64_t>(n, f, "a non-negative integer");
    }
    double real(const YAML::Node &n, const std::string &f) const {
        return number<double>(n, f, "a number");
    }
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::optional<PartyId> parse_party(const std::string &text) {
    const std::string t = lower(text);
    if (auto p = PartyId::parse(t)) {
        return p;
    }
    for (int i = 0; i < 6; ++i) {
        if (lower(PartyId::receiver(i).display_name()) == t) {
            return PartyId::receiver(i);
        }
    }
    return std::nullopt;
}

PartyId read_party(const Reader &rd, const YAML::Node &node, const std::string &field) {
    const auto p = parse_party(rd.scalar(node, field));
    if (!p) {
        rd.fail(node, field, "expected alice, r<k> or a receiver name, got '" + node.Scalar() + "'");
    }
    return *p;
}

Segment read_segment(const Reader &rd, const YAML::Node &node) {
    rd.check_keys(node, "attack.segment", {"from", "to", "phase"});
    if (!node["from"] || !node["to"]) {
        rd.fail(node, "attack.segment", "needs both 'from' and 'to'");
    }
    Segment s;
    s.from = read_party(rd, node["from"], "attack.segment.from");
    s.to = read_party(rd, node["to"], "attack.segment.to");
    if (const auto ph = node["phase"]) {
        const std::string v = rd.scalar(ph, "attack.segment.phase");
        if (v == "distribution") {
            s.phase = Phase::Distribution;
        } else if (v == "return") {
            s.phase = Phase::Return;
        } else if (v == "teleport") {
            s.phase = Phase::Teleport;
        } else {
            rd.fail(ph, "attack.segment.phase",
                    "expected distribution, return or teleport, got '" + v + "'");
        }
    } else {
        s.phase = s.from.is_alice() ? Phase::Return : Phase::Distribution;
    }
    return s;
}

AttackModel read_attack(const Reader &rd, const YAML::Node &node) {
    rd.check_keys(node, "attack", {"type", "segment", "basis", "party"});
    const std::string type = node["type"] ? rd.scalar(node["type"], "attack.type") : "none";
    if (type == "none") {
        for (const char *k : {"segment", "basis", "party"}) {
            if (node[k]) {
                rd.fail(node[k], std::string("attack.") + k, "not used when attack.type is none");
            }
        }
        return NoAttack{};
    }
    if (!node["segment"]) {
        rd.fail(node, "attack.segment", "required for attack type " + type);
    }
    const Segment seg = read_segment(rd, node["segment"]);
    if (type == "intercept_resend") {
        if (node["party"]) {
            rd.fail(node["party"], "attack.party", "only used by dishonest_receiver");
        }
        InterceptResend ir{seg, BasisStrategy::UniformRandom};
        if (const auto b = node["basis"]) {
            const std::string v = rd.scalar(b, "attack.basis");
            if (v == "uniform") {
                ir.basis_strategy = BasisStrategy::UniformRandom;
            } else if (v == "rectilinear") {
                ir.basis_strategy = BasisStrategy::AlwaysRectilinear;
            } else if (v == "diagonal") {
                ir.basis_strategy = BasisStrategy::AlwaysDiagonal;
            } else {
                rd.fail(b, "attack.basis", "expected uniform, rectilinear or diagonal, got '" + v + "'");
            }
        }
        return ir;
    }
    if (type == "dishonest_receiver") {
        if (node["basis"]) {
            rd.fail(node["basis"], "attack.basis", "only used by intercept_resend");
        }
        if (!node["party"]) {
            rd.fail(node, "attack.party", "required for dishonest_receiver");
        }
        return DishonestReceiver{read_party(rd, node["party"], "attack.party"), seg};
    }
    rd.fail(node["type"], "attack.type",
            "expected none, intercept_resend or dishonest_receiver, got '" + type + "'");
}

Amplitude read_amplitude(const Reader &rd, const YAML::Node &node, const std::string &field) {
    if (node.IsScalar()) {
        return {rd.real(node, field), 0.0};
    }
    if (!node.IsSequence() || node.size() != 2) {
        rd.fail(node, field, "expected a number or [re, im]");
    }
    return {rd.real(node[0], field), rd.real(node[1], field)};
}

MessageSpec read_message(const Reader &rd, const YAML::Node &node) {
    MessageSpec m;
    if (node.IsScalar()) {
        const std::string v = node.Scalar();
        if (v == "random") {
            return m;
        }
        try {
            m.bits = parse_bits(v);
        } catch (const Error &) {
            rd.fail(node, "message", "expected a bit string, 'random' or {random: k}");
        }
        if (m.bits.empty()) {
            rd.fail(node, "message", "empty bit string");
        }
        m.random = false;
        return m;
    }
    rd.check_keys(node, "message", {"random"});
    if (!node["random"]) {
        rd.fail(node, "message", "expected a bit string, 'random' or {random: k}");
    }
    m.random_length = rd.integer(node["random"], "message.random");
    return m;
}

QubitSpec read_qubit(const Reader &rd, const YAML::Node &node) {
    QubitSpec q;
    if (node.IsScalar()) {
        if (node.Scalar() != "random") {
            rd.fail(node, "qubit", "expected 'random' or {alpha, beta}");
        }
        return q;
    }
    rd.check_keys(node, "qubit", {"alpha", "beta"});
    if (!node["alpha"] || !node["beta"]) {
        rd.fail(node, "qubit", "needs both alpha and beta");
    }
    q.random = false;
    q.alpha = read_amplitude(rd, node["alpha"], "qubit.alpha");
    q.beta = read_amplitude(rd, node["beta"], "qubit.beta");
    return q;
}

std::optional<Coalition> read_coalition(const Reader &rd, const YAML::Node &node) {
    if (node.IsScalar()) {
        if (node.Scalar() != "all") {
            rd.fail(node, "coalition", "expected 'all' or a list of receivers");
        }
        return std::nullopt;
    }
    if (!node.IsSequence() || node.size() == 0) {
        rd.fail(node, "coalition", "expected 'all' or a non-empty list of receivers");
    }
    Coalition c;
    for (const auto &item : node) {
        const std::string text = rd.scalar(item, "coalition");
        int index = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
        if (ec == std::errc{} && ptr == text.data() + text.size()) {
            c.insert(index);
            continue;
        }
        const auto p = parse_party(text);
        if (!p || !p->is_receiver()) {
            rd.fail(item, "coalition", "'" + text + "' is not a receiver");
        }
        c.insert(p->index());
    }
    return c;
}

// ------------------------------------------------------------ JSON helpers

json party_json(PartyId p) { return p.label(); }

json segment_json(const Segment &s) {
    return json{{"from", party_json(s.from)},
                {"to", party_json(s.to)},
                {"phase", std::string(to_string(s.phase))}};
}

json attack_json(const AttackModel &attack) {
    return std::visit(
        [](const auto &m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NoAttack>) {
                return json{{"type", "none"}};
            } else if constexpr (std::is_same_v<T, InterceptResend>) {
                std::string basis;
                switch (m.basis_strategy) {
                case BasisStrategy::UniformRandom: basis = "uniform"; break;
                case BasisStrategy::AlwaysRectilinear: basis = "rectilinear"; break;
                case BasisStrategy::AlwaysDiagonal: basis = "diagonal"; break;
                }
                return json{{"type", "intercept_resend"},
                            {"segment", segment_json(m.segment)},
                            {"basis", basis}};
            } else {
                return json{{"type", "dishonest_receiver"},
                            {"segment", segment_json(m.segment)},
                            {"party", party_json(m.party)}};
            }
        },
        attack);
}

json amplitude_json(Amplitude a) { return json::array({a.real(), a.imag()}); }

json metric_json(const MetricSummary &m) {
    if (m.count == 0) {
        return json{{"count", 0}, {"mean", nullptr}, {"std", nullptr}, {"ci95", nullptr}};
    }
    return json{{"count", m.count},
                {"mean", m.mean},
                {"std", m.std_dev},
                {"ci95", json::array({m.ci95_low, m.ci95_high})}};
}

// ------------------------------------------------------------- run helpers

std::optional<Phase> attack_phase(const AttackModel &attack) {
    if (const auto seg = attacked_segment(attack)) {
        return seg->phase;
    }
    return std::nullopt;
}

BitString message_for(const RunSpec &spec, std::uint64_t run_seed) {
    if (!spec.message.random) {
        return spec.message.bits;
    }
    const int length = spec.message.random_length.value_or(spec.cfg.message_capacity());
    RandomStream rng(party_seed(run_seed, kMessageStream));
    BitString bits(static_cast<std::size_t>(length));
    for (auto &b : bits) {
        b = static_cast<int>(rng.uniform_index(2));
    }
    return bits;
}

double bit_error_rate(const BitString &sent, const BitString &got) {
    int wrong = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) {
        wrong += sent[i] != got[i] ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(sent.size());
}

/// Observations shared by a plain run and the sharing run inside a round.
void observe_sharing(TrialResult &r, const ProtocolOutcome &out, const BitString &sent,
                     const AttackModel &attack, int num_receivers) {
    r.check_error_rate = out.check_error_rate;
    if (out.aborted()) {
        r.aborted = true;
        return;
    }
    if (!out.auth_passed) {
        r.aborted = true;
    }
    if (out.auth_announced > 0) {
        r.auth_mismatch_rate = out.auth_mismatch_rate;
    }
    r.decode_error_rate = bit_error_rate(sent, out.decoded_bits);
    if (attack_phase(attack) == Phase::Return && !out.eve_records.empty()) {
        r.eve_accuracy = eve_accuracy(out.eve_records, out.photons, attack, num_receivers);
    }
}

double coalition_success(const ProtocolOutcome &out, const BitString &sent,
                         const Coalition &coalition, int num_receivers, std::uint64_t run_seed) {
    std::vector<PhotonRecord> message;
    std::vector<PooledKnowledge> partial;
    for (const auto &p : out.photons) {
        if (p.role == PhotonRole::Message) {
            message.push_back(p);
        }
    }
    std::sort(message.begin(), message.end(),
              [](const PhotonRecord &a, const PhotonRecord &b) { return a.position < b.position; });
    for (const auto &p : message) {
        partial.push_back(pool_knowledge(p, coalition));
    }
    RandomStream rng(party_seed(run_seed, kCoalitionStream));
    const BitString guess =
        decode_partial(message, partial, num_receivers, GuessStrategy::AssumeIdentity, rng);
    return 1.0 - bit_error_rate(sent, guess);
}

struct Prediction {
    std::string metric;
    double value;
};

std::vector<Prediction> predictions(const RunSpec &spec) {
    std::vector<Prediction> out;
    const auto phase = attack_phase(spec.attack);
    const Coalition coalition = spec.effective_coalition();
    if (spec.protocol == ProtocolKind::Qsscm) {
        const double det = predicted_detection_rate(spec.attack, spec.cfg.shape());
        if (!phase || *phase == Phase::Distribution) {
            out.push_back({"check_error_rate", det});
        }
        if (!phase) {
            out.push_back({"decode_error_rate", 0.0});
        } else if (*phase == Phase::Return) {
            out.push_back({"auth_mismatch_rate", det});
            out.push_back({"decode_error_rate", det});
            out.push_back({"eve_accuracy", predicted_eve_accuracy(spec.attack, spec.cfg.shape())});
        }
        if (coalition != full_coalition(spec.cfg.num_receivers) &&
            (!phase || *phase == Phase::Distribution)) {
            out.push_back({"coalition_decode_success",
                           predicted_partial_success(spec.cfg.num_receivers, coalition)});
        }
        return out;
    }
    const double det = predicted_round_detection_rate(spec.cfg, spec.attack);
    const ProtocolConfig sub = sharing_config(spec.cfg);
    if (phase == Phase::Teleport) {
        out.push_back({"pair_check_error_rate", det});
    } else {
        out.push_back({"pair_check_error_rate", 0.0});
        if (!phase || *phase == Phase::Distribution) {
            out.push_back({"check_error_rate", det});
        } else {
            out.push_back({"auth_mismatch_rate", det});
            out.push_back({"decode_error_rate", det});
            out.push_back({"eve_accuracy",
                           predicted_eve_accuracy(sharing_attack(spec.attack), sub.shape())});
        }
    }
    if (!phase && spec.qubit.random) {
        if (const auto f = predicted_coalition_fidelity(coalition, spec.cfg.num_receivers)) {
            out.push_back({"fidelity", *f});
        }
    }
    return out;
}

void write_file(const std::string &path, const std::string &contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    }
    f << contents;
    f.close();
    if (!f) {
        throw Error(ErrorCode::Io, "failed writing '" + path + "'");
    }
}

} // namespace

// ----------------------------------------------------------------- RunSpec

Coalition RunSpec::effective_coalition() const {
    return coalition.value_or(full_coalition(cfg.num_receivers));
}

void RunSpec::validate() const {
    cfg.validate();
    if (trials < 1) {
        throw Error(ErrorCode::Config, "trials: must be at least 1");
    }
    if (threads < 1) {
        throw Error(ErrorCode::Config, "threads: must be at least 1");
    }
    if (coalition) {
        for (int r : *coalition) {
            if (r < 0 || r >= cfg.num_receivers) {
                throw Error(ErrorCode::Config, "coalition: receiver " + std::to_string(r) +
                                                   " is not part of this run");
            }
        }
    }
    if (protocol == ProtocolKind::Qsscm) {
        if (!message.random) {
            if (static_cast<int>(message.bits.size()) > cfg.message_capacity()) {
                throw Error(ErrorCode::Config,
                            "message: " + std::to_string(message.bits.size()) +
                                " bits exceed the " + std::to_string(cfg.message_capacity()) +
                                " message photons of a batch");
            }
        } else if (message.random_length &&
                   (*message.random_length < 1 ||
                    *message.random_length > cfg.message_capacity())) {
            throw Error(ErrorCode::Config, "message: random length must lie in 1.." +
                                               std::to_string(cfg.message_capacity()));
        }
        try {
            validate_attack(attack, cfg.shape());
        } catch (const Error &e) {
            throw Error(ErrorCode::Config, std::string("attack: ") + e.what());
        }
        return;
    }
    if (!message.random || message.random_length) {
        throw Error(ErrorCode::Config, "message: a qubit round shares its own 2 outcome bits");
    }
    if (!qubit.random) {
        (void)UnknownQubit(qubit.alpha, qubit.beta); // normalization check
    }
    if (cfg.num_receivers < 3) {
        throw Error(ErrorCode::Config, "receivers: sharing a qubit needs at least 3 receivers");
    }
    const ProtocolConfig sub = sharing_config(cfg);
    if (sub.message_capacity() < 2) {
        throw Error(ErrorCode::Config, "batch_size: too small to carry the 2 outcome bits");
    }
    try {
        const auto phase = attack_phase(attack);
        if (phase == Phase::Teleport) {
            validate_attack(attack, ProtocolShape{2, 1, true});
        } else {
            validate_attack(sharing_attack(attack), sub.shape());
        }
    } catch (const Error &e) {
        throw Error(ErrorCode::Config, std::string("attack: ") + e.what());
    }
}

RunSpec parse_config(const std::string &text, const std::string &source_name) {
    Reader rd{source_name, {}};
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException &e) {
        throw Error(ErrorCode::Config, source_name + ":" + std::to_string(e.mark.line + 1) +
                                           ": malformed YAML: " + e.msg);
    }
    if (!root || root.IsNull()) {
        root = YAML::Node(YAML::NodeType::Map);
    }
    rd.check_keys(root, "",
                  {"protocol", "receivers", "batch_size", "check_fraction", "error_threshold",
                   "auth_fraction", "auth_threshold", "seed", "final_holder", "trials", "threads", "message",
                   "qubit", "coalition", "attack", "output"});
    for (const auto &kv : root) {
        rd.lines[kv.first.as<std::string>()] = kv.first.Mark().line + 1;
    }

    RunSpec spec;
    if (const auto n = root["protocol"]) {
        const std::string v = rd.scalar(n, "protocol");
        if (v == "qsscm") {
            spec.protocol = ProtocolKind::Qsscm;
        } else if (v == "ssqi") {
            spec.protocol = ProtocolKind::Ssqi;
            spec.cfg.num_receivers = 3;
        } else {
            rd.fail(n, "protocol", "expected qsscm or ssqi, got '" + v + "'");
        }
    }
    if (const auto n = root["receivers"]) {
        spec.cfg.num_receivers = rd.integer(n, "receivers");
    }
    if (const auto n = root["batch_size"]) {
        spec.cfg.batch_size = rd.integer(n, "batch_size");
    }
    if (const auto n = root["check_fraction"]) {
        spec.cfg.check_fraction = rd.real(n, "check_fraction");
    }
    if (const auto n = root["error_threshold"]) {
        spec.cfg.error_threshold = rd.real(n, "error_threshold");
    }
    if (const auto n = root["auth_fraction"]) {
        spec.cfg.auth_fraction = rd.real(n, "auth_fraction");
    }
    if (const auto n = root["auth_threshold"]) {
        spec.cfg.auth_threshold = rd.real(n, "auth_threshold");
    }
    if (const auto n = root["seed"]) {
        spec.cfg.master_seed = rd.unsigned64(n, "seed");
    }
    if (const auto n = root["final_holder"]) {
        spec.cfg.final_holder = read_party(rd, n, "final_holder").index();
        if (spec.cfg.final_holder < 0) {
            rd.fail(n, "final_holder", "must be a receiver");
        }
    }
    if (const auto n = root["trials"]) {
        spec.trials = rd.unsigned64(n, "trials");
    }
    if (const auto n = root["threads"]) {
        const int threads = rd.integer(n, "threads");
        if (threads < 1) {
            rd.fail(n, "threads", "must be at least 1");
        }
        spec.threads = static_cast<unsigned>(threads);
    }
    if (const auto n = root["message"]) {
        spec.message = read_message(rd, n);
    }
    if (const auto n = root["qubit"]) {
        spec.qubit = read_qubit(rd, n);
    }
    if (const auto n = root["coalition"]) {
        spec.coalition = read_coalition(rd, n);
    }
    if (const auto n = root["attack"]) {
        spec.attack = read_attack(rd, n);
    }
    if (const auto n = root["output"]) {
        rd.check_keys(n, "output", {"stats", "transcript"});
        if (n["stats"]) {
            spec.stats_path = rd.scalar(n["stats"], "output.stats");
        }
        if (n["transcript"]) {
            spec.transcript_path = rd.scalar(n["transcript"], "output.transcript");
        }
    }

    try {
        spec.validate();
    } catch (const Error &e) {
        // Point semantic errors at the line of the field they name.
        const std::string msg = e.what();
        const std::string field = msg.substr(0, msg.find(':'));
        const auto it = rd.lines.find(field);
        const std::string where =
            it == rd.lines.end() ? source_name : source_name + ":" + std::to_string(it->second);
        throw Error(ErrorCode::Config, where + ": " + msg);
    }
    return spec;
}

RunSpec load_config(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::Io, "cannot read config '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::string effective_config_json(const RunSpec &spec) {
    json j;
    j["protocol"] = spec.protocol == ProtocolKind::Qsscm ? "qsscm" : "ssqi";
    j["receivers"] = spec.cfg.num_receivers;
    j["batch_size"] = spec.cfg.batch_size;
    j["check_fraction"] = spec.cfg.check_fraction;
    j["error_threshold"] = spec.cfg.error_threshold;
    j["auth_fraction"] = spec.cfg.auth_fraction;
    j["auth_threshold"] = spec.cfg.auth_threshold;
    j["seed"] = spec.cfg.master_seed;
    j["final_holder"] = PartyId::receiver(spec.cfg.final_holder_index()).label();
    j["trials"] = spec.trials;
    j["threads"] = spec.threads;
    if (spec.protocol == ProtocolKind::Ssqi) {
        j["message"] = "outcome_bits";
    } else if (!spec.message.random) {
        j["message"] = format_bits(spec.message.bits);
    } else {
        j["message"] = json{
            {"random", spec.message.random_length.value_or(spec.cfg.message_capacity())}};
    }
    if (spec.protocol == ProtocolKind::Ssqi && !spec.qubit.random) {
        j["qubit"] = json{{"alpha", amplitude_json(spec.qubit.alpha)},
                          {"beta", amplitude_json(spec.qubit.beta)}};
    } else {
        j["qubit"] = "random";
    }
    json members = json::array();
    for (int r : spec.effective_coalition()) {
        members.push_back(r);
    }
    j["coalition"] = members;
    j["attack"] = attack_json(spec.attack);
    j["output"] = json{{"stats", spec.stats_path}, {"transcript", spec.transcript_path}};
    return j.dump();
}

// ------------------------------------------------------------------ trials

MetricSummary summarize(const std::vector<double> &samples) {
    MetricSummary m;
    m.count = samples.size();
    if (samples.empty()) {
        return m;
    }
    double sum = 0.0;
    for (double x : samples) {
        sum += x;
    }
    m.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples) {
            ss += (x - m.mean) * (x - m.mean);
        }
        m.std_dev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    }
    const double half = 1.96 * m.std_dev / std::sqrt(static_cast<double>(samples.size()));
    m.ci95_low = m.mean - half;
    m.ci95_high = m.mean + half;
    return m;
}

TrialResult run_trial(const RunSpec &spec, std::uint64_t trial, bool record_transcript) {
    ProtocolConfig cfg = spec.cfg;
    cfg.master_seed = trial_seed(spec.cfg.master_seed, trial);
    cfg.record_transcript = record_transcript;
    const Coalition coalition = spec.effective_coalition();

    TrialResult r;
    if (spec.protocol == ProtocolKind::Qsscm) {
        const BitString message = message_for(spec, cfg.master_seed);
        const ProtocolOutcome out = run_protocol(cfg, message, spec.attack);
        observe_sharing(r, out, message, spec.attack, cfg.num_receivers);
        if (!out.aborted() && coalition != full_coalition(cfg.num_receivers)) {
            r.coalition_decode_success =
                coalition_success(out, message, coalition, cfg.num_receivers, cfg.master_seed);
        }
        if (record_transcript) {
            r.transcript_jsonl = out.transcript.to_jsonl(trial);
        }
        return r;
    }

    const UnknownQubit input = [&] {
        if (!spec.qubit.random) {
            return UnknownQubit(spec.qubit.alpha, spec.qubit.beta);
        }
        RandomStream rng(party_seed(cfg.master_seed, kInputStream));
        return UnknownQubit::random(rng);
    }();
    const SsqiOutcome out = run_ssqi(cfg, input, coalition, spec.attack);
    r.pair_check_error_rate = out.pair_check.error_rate;
    if (out.status == SsqiStatus::PairCheckAborted) {
        r.aborted = true;
    }
    if (out.sharing) {
        const BitString sent{out.outcome_bits[0], out.outcome_bits[1]};
        observe_sharing(r, *out.sharing, sent, sharing_attack(spec.attack), cfg.num_receivers - 1);
    }
    if (!r.aborted) {
        r.fidelity = out.fidelity;
    }
    if (record_transcript) {
        r.transcript_jsonl = out.transcript.to_jsonl(trial);
    }
    return r;
}

StatsReport run_trials(const RunSpec &spec) {
    spec.validate();
    const bool record = !spec.transcript_path.empty();
    const std::uint64_t n = spec.trials;
    std::vector<std::optional<TrialResult>> results(n);
    std::vector<std::string> errors(n);

    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> first_failure{n};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t t = next.fetch_add(1);
            if (t >= n || t > first_failure.load()) {
                return;
            }
            try {
                results[t] = run_trial(spec, t, record);
            } catch (const std::exception &e) {
                errors[t] = e.what();
                std::uint64_t cur = first_failure.load();
                while (t < cur && !first_failure.compare_exchange_weak(cur, t)) {
                }
            }
        }
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, spec.threads), n));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    StatsReport report;
    report.trials_requested = n;
    report.config_json = effective_config_json(spec);
    const std::uint64_t done = first_failure.load();
    if (done < n) {
        report.incomplete = true;
        report.error = "trial " + std::to_string(done) + ": " + errors[done];
    }
    report.trials_run = done;

    std::map<std::string, std::vector<double>> samples;
    for (const char *name : {"abort_fraction", "check_error_rate", "auth_mismatch_rate",
                             "decode_error_rate", "eve_accuracy"}) {
        samples[name];
    }
    if (spec.protocol == ProtocolKind::Ssqi) {
        samples["pair_check_error_rate"];
        samples["fidelity"];
    } else if (spec.effective_coalition() != full_coalition(spec.cfg.num_receivers)) {
        samples["coalition_decode_success"];
    }
    auto push = [&](const char *name, const std::optional<double> &v) {
        if (v) {
            samples[name].push_back(*v);
        }
    };
    for (std::uint64_t t = 0; t < done; ++t) {
        const TrialResult &r = *results[t];
        report.aborted_trials += r.aborted ? 1 : 0;
        samples["abort_fraction"].push_back(r.aborted ? 1.0 : 0.0);
        push("check_error_rate", r.check_error_rate);
        push("pair_check_error_rate", r.pair_check_error_rate);
        push("auth_mismatch_rate", r.auth_mismatch_rate);
        push("decode_error_rate", r.decode_error_rate);
        push("eve_accuracy", r.eve_accuracy);
        push("fidelity", r.fidelity);
        push("coalition_decode_success", r.coalition_decode_success);
        report.transcript_jsonl += r.transcript_jsonl;
    }
    for (const auto &[name, xs] : samples) {
        report.metrics[name] = summarize(xs);
    }
    for (const auto &p : predictions(spec)) {
        OracleCheck c{p.metric, p.value, std::nullopt};
        const auto it = report.metrics.find(p.metric);
        if (it != report.metrics.end() && it->second.count > 0 && it->second.std_dev > 0.0) {
            const auto &m = it->second;
            c.z_score = (m.mean - p.value) / (m.std_dev / std::sqrt(static_cast<double>(m.count)));
        }
        report.oracles.push_back(c);
    }
    return report;
}

std::string stats_json(const StatsReport &report) {
    json j;
    j["schema"] = "qss-stats";
    j["version"] = 1;
    j["config"] = json::parse(report.config_json);
    j["trials_requested"] = report.trials_requested;
    j["trials_run"] = report.trials_run;
    j["aborted_trials"] = report.aborted_trials;
    j["incomplete"] = report.incomplete;
    j["error"] = report.incomplete ? json(report.error) : json(nullptr);
    json metrics = json::object();
    for (const auto &[name, m] : report.metrics) {
        metrics[name] = metric_json(m);
    }
    j["metrics"] = metrics;
    json oracles = json::array();
    for (const auto &o : report.oracles) {
        oracles.push_back(json{{"metric", o.metric},
                               {"prediction", o.prediction},
                               {"z_score", o.z_score ? json(*o.z_score) : json(nullptr)}});
    }
    j["oracles"] = oracles;
    return j.dump(2) + "\n";
}

void write_outputs(const StatsReport &report, const std::string &stats_path,
                   const std::string &transcript_path) {
    if (!stats_path.empty()) {
        write_file(stats_path, stats_json(report));
    }
    if (!transcript_path.empty()) {
        write_file(transcript_path, Transcript::header_line() + report.transcript_jsonl);
    }
}

std::string replay_transcript(const RunSpec &spec, std::uint64_t trial) {
    spec.validate();
    if (trial >= spec.trials) {
        throw Error(ErrorCode::InvalidArgument, "trial " + std::to_string(trial) +
                                                    " is outside a run of " +
                                                    std::to_string(spec.trials) + " trials");
    }
    return Transcript::header_line() + run_trial(spec, trial, true).transcript_jsonl;
}

std::string oracle_json(const RunSpec &spec) {
    spec.validate();
    json j;
    j["config"] = json::parse(effective_config_json(spec));
    const auto phase = attack_phase(spec.attack);
    j["attack_phase"] = phase ? json(std::string(to_string(*phase))) : json(nullptr);
    j["predicted_detection_rate"] = spec.protocol == ProtocolKind::Qsscm
                                        ? predicted_detection_rate(spec.attack, spec.cfg.shape())
                                        : predicted_round_detection_rate(spec.cfg, spec.attack);
    json preds = json::array();
    for (const auto &p : predictions(spec)) {
        preds.push_back(json{{"metric", p.metric}, {"prediction", p.value}});
    }
    j["predictions"] = preds;
    return j.dump(2) + "\n";
}

double predicted_partial_success(int num_receivers, const Coalition &coalition) {
    if (num_receivers < 2) {
        throw Error(ErrorCode::InvalidArgument, "predicted_partial_success: at least 2 receivers");
    }
    const int encryptors = num_receivers - 1;
    const bool knows_label = coalition.contains(0);
    const Unitary2 flip = make_unitary(UnitaryKind::Flip);
    double total = 0.0;

    std::vector<int> choice(static_cast<std::size_t>(encryptors), 0);
    const double w_ops = std::pow(1.0 / 3.0, encryptors);
    for (;;) {
        for (StateLabel label : kAllLabels) {
            PureState s = state_of_label(label);
            std::map<int, UnitaryKind> known;
            for (int k = 0; k < encryptors; ++k) {
                const UnitaryKind kind = kEncryptionOps[static_cast<std::size_t>(choice[k])];
                s = apply1(make_unitary(kind), s);
                if (coalition.contains(k + 1)) {
                    known[k + 1] = kind;
                }
            }
            for (int bit = 0; bit < 2; ++bit) {
                PureState t = bit ? apply1(flip, s) : s;
                for (auto it = known.rbegin(); it != known.rend(); ++it) {
                    t = apply1(make_unitary(it->second).adjoint(), t);
                }
                for (StateLabel guess : kAllLabels) {
                    const StateLabel ref = knows_label ? label : guess;
                    // The decoder reads 0 exactly when it sees the reference label.
                    const double p_ref = overlap_probability(state_of_label(ref), t);
                    const double p_right = bit ? 1.0 - p_ref : p_ref;
                    total += 0.25 * w_ops * 0.5 * 0.25 * p_right;
                }
            }
        }
        int k = 0;
        while (k < encryptors && ++choice[static_cast<std::size_t>(k)] == 3) {
            choice[static_cast<std::size_t>(k)] = 0;
            ++k;
        }
        if (k == encryptors) {
            break;
        }
    }
    return total;
}

} // namespace qss
