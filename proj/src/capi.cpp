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
#include "qss/qss.h"

#include "qss/error.hpp"
#include "qss/harness.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct qss_spec {
    qss::RunSpec spec;
};

struct qss_report {
    qss::StatsReport report;
};

namespace {

thread_local std::string last_error;

qss_status to_status(qss::ErrorCode code) {
    switch (code) {
    case qss::ErrorCode::InvalidArgument: return QSS_ERR_INVALID_ARGUMENT;
    case qss::ErrorCode::DimensionMismatch: return QSS_ERR_DIMENSION;
    case qss::ErrorCode::Config: return QSS_ERR_CONFIG;
    case qss::ErrorCode::Io: return QSS_ERR_IO;
    case qss::ErrorCode::Protocol: return QSS_ERR_PROTOCOL;
    }
    return QSS_ERR_INTERNAL;
}

qss_status fail(qss_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

/// Runs `body`, translating exceptions into status codes.
template <typename F>
qss_status guarded(F &&body) {
    try {
        last_error.clear();
        body();
        return QSS_OK;
    } catch (const qss::Error &e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return fail(QSS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return fail(QSS_ERR_INTERNAL, e.what());
    }
}

char *dup_string(const std::string &s) {
    char *p = static_cast<char *>(std::malloc(s.size() + 1));
    if (p == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

} // namespace

extern "C" {

const char *qss_version(void) { return "0.1.0"; }

const char *qss_last_error(void) { return last_error.c_str(); }

void qss_string_free(char *s) { std::free(s); }

qss_status qss_spec_load(const char *path, qss_spec **out) {
    if (path == nullptr || out == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_spec_load: null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = new qss_spec{qss::load_config(path)}; });
}

qss_status qss_spec_parse(const char *yaml_text, qss_spec **out) {
    if (yaml_text == nullptr || out == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_spec_parse: null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = new qss_spec{qss::parse_config(yaml_text, "<string>")}; });
}

void qss_spec_free(qss_spec *spec) { delete spec; }

qss_status qss_spec_set_seed(qss_spec *spec, uint64_t seed) {
    if (spec == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_spec_set_seed: null spec");
    }
    spec->spec.cfg.master_seed = seed;
    return QSS_OK;
}

qss_status qss_spec_set_trials(qss_spec *spec, uint64_t trials) {
    if (spec == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_spec_set_trials: null spec");
    }
    if (trials < 1) {
        return fail(QSS_ERR_CONFIG, "trials: must be at least 1");
    }
    spec->spec.trials = trials;
    return QSS_OK;
}

qss_status qss_spec_set_threads(qss_spec *spec, unsigned threads) {
    if (spec == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_spec_set_threads: null spec");
    }
    if (threads < 1) {
        return fail(QSS_ERR_CONFIG, "threads: must be at least 1");
    }
    spec->spec.threads = threads;
    return QSS_OK;
}

qss_status qss_spec_set_outputs(qss_spec *spec, const char *stats_path,
                                const char *transcript_path) {
    if (spec == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_spec_set_outputs: null spec");
    }
    if (stats_path != nullptr) {
        spec->spec.stats_path = stats_path;
    }
    if (transcript_path != nullptr) {
        spec->spec.transcript_path = transcript_path;
    }
    return QSS_OK;
}

const char *qss_spec_stats_path(const qss_spec *spec) {
    return spec == nullptr ? "" : spec->spec.stats_path.c_str();
}

const char *qss_spec_transcript_path(const qss_spec *spec) {
    return spec == nullptr ? "" : spec->spec.transcript_path.c_str();
}

qss_status qss_run(const qss_spec *spec, qss_report **out) {
    if (spec == nullptr || out == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_run: null argument");
    }
    *out = nullptr;
    const qss_status st = guarded([&] { *out = new qss_report{qss::run_trials(spec->spec)}; });
    if (st == QSS_OK && (*out)->report.incomplete) {
        return fail(QSS_ERR_PROTOCOL, (*out)->report.error);
    }
    return st;
}

void qss_report_free(qss_report *report) { delete report; }

uint64_t qss_report_trials_run(const qss_report *report) {
    return report == nullptr ? 0 : report->report.trials_run;
}

uint64_t qss_report_aborted_trials(const qss_report *report) {
    return report == nullptr ? 0 : report->report.aborted_trials;
}

int qss_report_incomplete(const qss_report *report) {
    return report == nullptr ? 0 : (report->report.incomplete ? 1 : 0);
}

qss_status qss_report_stats_json(const qss_report *report, char **out) {
    if (report == nullptr || out == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_report_stats_json: null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = dup_string(qss::stats_json(report->report)); });
}

qss_status qss_report_write(const qss_report *report, const qss_spec *spec) {
    if (report == nullptr || spec == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_report_write: null argument");
    }
    return guarded([&] {
        qss::write_outputs(report->report, spec->spec.stats_path, spec->spec.transcript_path);
    });
}

qss_status qss_oracle(const qss_spec *spec, char **out) {
    if (spec == nullptr || out == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_oracle: null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = dup_string(qss::oracle_json(spec->spec)); });
}

qss_status qss_replay(const qss_spec *spec, uint64_t trial, char **out) {
    if (spec == nullptr || out == nullptr) {
        return fail(QSS_ERR_INVALID_ARGUMENT, "qss_replay: null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = dup_string(qss::replay_transcript(spec->spec, trial)); });
}

} // extern "C"
