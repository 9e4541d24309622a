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

// qss command line: run trial batches, print oracle predictions, replay a
// single trial's transcript. Exit codes: 0 every trial completed, 2 at
// least one trial aborted, 1 usage, configuration or I/O error.
#include "qss/qss.h"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAborted = 2;

struct SpecDeleter {
    void operator()(qss_spec *s) const { qss_spec_free(s); }
};
struct ReportDeleter {
    void operator()(qss_report *r) const { qss_report_free(r); }
};
struct StringDeleter {
    void operator()(char *s) const { qss_string_free(s); }
};
using SpecPtr = std::unique_ptr<qss_spec, SpecDeleter>;
using ReportPtr = std::unique_ptr<qss_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int report_error(const char *what) {
    std::cerr << "qss: " << what << ": " << qss_last_error() << "\n";
    return kExitError;
}

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
    cmd->add_option("--config", opts.config, "YAML run configuration")->required();
    cmd->add_option("--seed", opts.seed, "Override the master seed");
    cmd->add_flag("--quiet", opts.quiet, "Suppress the summary on stderr");
}

SpecPtr load(const CommonOptions &opts) {
    qss_spec *raw = nullptr;
    if (qss_spec_load(opts.config.c_str(), &raw) != QSS_OK) {
        report_error("config");
        return nullptr;
    }
    SpecPtr spec(raw);
    if (opts.seed) {
        qss_spec_set_seed(spec.get(), *opts.seed);
    }
    return spec;
}

bool write_text(const std::string &path, const char *text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return static_cast<bool>(std::cout);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) {
        std::cerr << "qss: cannot write '" << path << "'\n";
        return false;
    }
    return true;
}

int cmd_run(const CommonOptions &opts, std::optional<std::uint64_t> trials,
            std::optional<unsigned> threads, std::optional<std::string> out,
            std::optional<std::string> trace) {
    SpecPtr spec = load(opts);
    if (!spec) {
        return kExitError;
    }
    if (trials && qss_spec_set_trials(spec.get(), *trials) != QSS_OK) {
        return report_error("trials");
    }
    if (threads && qss_spec_set_threads(spec.get(), *threads) != QSS_OK) {
        return report_error("threads");
    }
    qss_spec_set_outputs(spec.get(), out ? out->c_str() : nullptr,
                         trace ? trace->c_str() : nullptr);

    qss_report *raw = nullptr;
    const qss_status st = qss_run(spec.get(), &raw);
    ReportPtr report(raw);
    if (!report) {
        return report_error("run");
    }
    const std::string stats_path = qss_spec_stats_path(spec.get());
    if (qss_report_write(report.get(), spec.get()) != QSS_OK) {
        return report_error("output");
    }
    if (stats_path.empty()) {
        char *json = nullptr;
        if (qss_report_stats_json(report.get(), &json) != QSS_OK) {
            return report_error("stats");
        }
        StringPtr owned(json);
        std::cout << json;
    }
    const std::uint64_t run = qss_report_trials_run(report.get());
    const std::uint64_t aborted = qss_report_aborted_trials(report.get());
    if (!opts.quiet) {
        std::cerr << "qss: " << run << " trial(s) run, " << aborted << " aborted";
        if (!stats_path.empty()) {
            std::cerr << ", stats in " << stats_path;
        }
        std::cerr << "\n";
    }
    if (st != QSS_OK) {
        return report_error("run");
    }
    return aborted > 0 ? kExitAborted : kExitOk;
}

int cmd_oracle(const CommonOptions &opts, const std::string &out) {
    SpecPtr spec = load(opts);
    if (!spec) {
        return kExitError;
    }
    char *json = nullptr;
    if (qss_oracle(spec.get(), &json) != QSS_OK) {
        return report_error("oracle");
    }
    StringPtr owned(json);
    return write_text(out, json) ? kExitOk : kExitError;
}

int cmd_replay(const CommonOptions &opts, std::uint64_t trial, const std::string &trace) {
    SpecPtr spec = load(opts);
    if (!spec) {
        return kExitError;
    }
    char *text = nullptr;
    if (qss_replay(spec.get(), trial, &text) != QSS_OK) {
        return report_error("replay");
    }
    StringPtr owned(text);
    if (!write_text(trace, text)) {
        return kExitError;
    }
    if (!opts.quiet && !trace.empty() && trace != "-") {
        std::cerr << "qss: transcript of trial " << trial << " in " << trace << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum secret sharing simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qss_version()));

    CommonOptions run_opts;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    std::optional<std::string> trace;
    auto *run = app.add_subcommand("run", "Run a batch of seeded trials");
    add_common(run, run_opts);
    run->add_option("--trials", trials, "Override the trial count");
    run->add_option("--threads", threads, "Worker threads (results do not depend on it)");
    run->add_option("--out", out, "Stats JSON file (default: stdout)");
    run->add_option("--trace", trace, "Transcript JSONL file");

    CommonOptions oracle_opts;
    std::string oracle_out;
    auto *oracle = app.add_subcommand("oracle", "Print the exact predictions for a config");
    add_common(oracle, oracle_opts);
    oracle->add_option("--out", oracle_out, "Output file (default: stdout)");

    CommonOptions replay_opts;
    std::uint64_t trial = 0;
    std::string replay_trace;
    auto *replay = app.add_subcommand("replay", "Rebuild the transcript of one trial");
    add_common(replay, replay_opts);
    replay->add_option("--trial", trial, "Trial index")->required();
    replay->add_option("--trace", replay_trace, "Transcript file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    if (run->parsed()) {
        return cmd_run(run_opts, trials, threads, out, trace);
    }
    if (oracle->parsed()) {
        return cmd_oracle(oracle_opts, oracle_out);
    }
    return cmd_replay(replay_opts, trial, replay_trace);
}
