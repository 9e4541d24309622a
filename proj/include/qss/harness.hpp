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
 * Run specifications, seeded trial batches, statistics and output files.
 */
#pragma once

#include "qss/qsscm.hpp"
#include "qss/ssqi.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qss {

enum class ProtocolKind { Qsscm, Ssqi };

struct MessageSpec {
    /// Fixed bits; ignored when `random` is set.
    BitString bits;
    bool random = true;
    /// Length of a random message; nullopt fills every message photon.
    std::optional<int> random_length;
};

struct QubitSpec {
    bool random = true;
    Amplitude alpha{1.0, 0.0};
    Amplitude beta{0.0, 0.0};
};

struct RunSpec {
    ProtocolKind protocol = ProtocolKind::Qsscm;
    ProtocolConfig cfg;
    MessageSpec message;
    QubitSpec qubit;
    /// nullopt means every receiver.
    std::optional<Coalition> coalition;
    AttackModel attack = NoAttack{};
    std::uint64_t trials = 1;
    unsigned threads = 1;
    std::string stats_path;
    std::string transcript_path;

    /// Throws Error(Config) naming the offending field.
    void validate() const;
    [[nodiscard]] Coalition effective_coalition() const;
};

/// Parses YAML text. Errors carry the source name, line and field.
RunSpec parse_config(const std::string &text, const std::string &source_name = "<config>");

/// Reads and parses a config file; unreadable files raise Error(Io).
RunSpec load_config(const std::string &path);

struct MetricSummary {
    std::uint64_t count = 0;
    double mean = 0.0;
    double std_dev = 0.0; ///< sample standard deviation (n-1); 0 for one sample
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

/// Mean, sample std and normal-approximation 95% interval, summed in order.
MetricSummary summarize(const std::vector<double> &samples);

struct OracleCheck {
    std::string metric;
    double prediction = 0.0;
    /// (mean - prediction) / (std / sqrt(count)); nullopt when std is 0.
    std::optional<double> z_score;
};

/// Per-trial observations. A trial is aborted when Alice stops the run at
/// any check, including a failed authentication.
struct TrialResult {
    bool aborted = false;
    /// decode_partial success for a proper coalition (qsscm only).
    std::optional<double> coalition_decode_success;
    std::optional<double> check_error_rate;
    std::optional<double> pair_check_error_rate;
    std::optional<double> auth_mismatch_rate;
    std::optional<double> decode_error_rate;
    std::optional<double> eve_accuracy;
    std::optional<double> fidelity;
    std::string transcript_jsonl;
};

struct StatsReport {
    std::uint64_t trials_requested = 0;
    std::uint64_t trials_run = 0;
    std::uint64_t aborted_trials = 0;
    bool incomplete = false;
    std::string error;
    std::map<std::string, MetricSummary> metrics;
    std::vector<OracleCheck> oracles;
    /// Effective configuration, every defaulted field included.
    std::string config_json;
    /// Concatenated transcript lines of every trial run, in trial order.
    std::string transcript_jsonl;
};

/// Runs one trial (index `trial`) of a spec.
TrialResult run_trial(const RunSpec &spec, std::uint64_t trial, bool record_transcript);

/**
 * Runs spec.trials trials, on spec.threads workers. Results are gathered by
 * trial index, so the report does not depend on the thread count. A failing
 * trial stops the batch; the report then covers the trials before it and is
 * flagged incomplete.
 */
StatsReport run_trials(const RunSpec &spec);

/// Stats document (pretty JSON, trailing newline).
std::string stats_json(const StatsReport &report);

/// Writes the stats file (and the transcript file when the path is non-empty).
/// Throws Error(Io) when a file cannot be written.
void write_outputs(const StatsReport &report, const std::string &stats_path,
                   const std::string &transcript_path);

/// Transcript file contents (header line plus events) of a single trial,
/// identical to that trial's lines in a full run.
std::string replay_transcript(const RunSpec &spec, std::uint64_t trial);

/// Oracle predictions for a spec without simulating, as pretty JSON.
std::string oracle_json(const RunSpec &spec);

/// Exact success probability of decode_partial (AssumeIdentity) for a coalition.
double predicted_partial_success(int num_receivers, const Coalition &coalition);

/// Effective configuration as JSON (compact, deterministic key order).
std::string effective_config_json(const RunSpec &spec);

} // namespace qss
