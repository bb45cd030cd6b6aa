#include <exception>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/lab.hpp"
#include "gkdv_ilab.h"

struct gkdv_session {
    std::optional<gkdv::lab::RunKind> kind;
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<gkdv::lab::ExperimentReport> report;
    std::string report_path;
    std::string error;
};

namespace {

gkdv_status fail(gkdv_session* session, gkdv_status status, std::string message) {
    if (session != nullptr) session->error = std::move(message);
    return status;
}

}  // namespace

extern "C" {

gkdv_session* gkdv_session_create(void) {
    try {
        return new gkdv_session();
    } catch (...) {
        return nullptr;
    }
}

void gkdv_session_destroy(gkdv_session* session) { delete session; }

gkdv_status gkdv_select_kind(gkdv_session* session, const char* kind) {
    if (session == nullptr || kind == nullptr)
        return fail(session, GKDV_USAGE_ERROR, "null argument");
    try {
        session->kind = gkdv::lab::parse_kind(kind);
        session->error.clear();
        return GKDV_OK;
    } catch (const std::exception& e) {
        return fail(session, GKDV_USAGE_ERROR, e.what());
    }
}

gkdv_status gkdv_load_config(gkdv_session* session, const char* path) {
    if (session == nullptr || path == nullptr)
        return fail(session, GKDV_USAGE_ERROR, "null argument");
    std::ifstream in(path);
    if (!in) return fail(session, GKDV_USAGE_ERROR, std::string("cannot read config: ") + path);
    session->config_path = path;
    session->error.clear();
    return GKDV_OK;
}

gkdv_status gkdv_set(gkdv_session* session, const char* key, const char* value) {
    if (session == nullptr || key == nullptr || value == nullptr)
        return fail(session, GKDV_USAGE_ERROR, "null argument");
    try {
        // Trial application against defaults rejects unknown keys and bad
        // values immediately; the real application happens in order at run.
        auto scratch = gkdv::lab::default_config(
            session->kind.value_or(gkdv::lab::RunKind::soliton_test));
        gkdv::lab::apply_key(scratch, key, value);
        session->overrides.push_back(std::string(key) + "=" + value);
        session->error.clear();
        return GKDV_OK;
    } catch (const std::exception& e) {
        return fail(session, GKDV_USAGE_ERROR, e.what());
    }
}

gkdv_status gkdv_run(gkdv_session* session) {
    if (session == nullptr) return GKDV_USAGE_ERROR;
    try {
        const auto config =
            gkdv::lab::parse_config(session->kind, session->config_path, session->overrides);
        session->report = gkdv::lab::run(config);
        session->error.clear();
        return GKDV_OK;
    } catch (const std::invalid_argument& e) {
        return fail(session, GKDV_USAGE_ERROR, e.what());
    } catch (const std::exception& e) {
        return fail(session, GKDV_INTERNAL_ERROR, e.what());
    }
}

int gkdv_checks_passed(const gkdv_session* session) {
    if (session == nullptr || !session->report.has_value()) return -1;
    return session->report->checks_passed ? 1 : 0;
}

int gkdv_divergence_flagged(const gkdv_session* session) {
    if (session == nullptr || !session->report.has_value()) return -1;
    return session->report->diverged ? 1 : 0;
}

gkdv_status gkdv_write_report(gkdv_session* session, const char* out_dir) {
    if (session == nullptr || out_dir == nullptr)
        return fail(session, GKDV_USAGE_ERROR, "null argument");
    if (!session->report.has_value())
        return fail(session, GKDV_USAGE_ERROR, "nothing has run yet");
    try {
        session->report_path = gkdv::lab::write_report(*session->report, out_dir);
        session->error.clear();
        return GKDV_OK;
    } catch (const std::exception& e) {
        return fail(session, GKDV_IO_ERROR, e.what());
    }
}

const char* gkdv_report_path(const gkdv_session* session) {
    return session == nullptr ? "" : session->report_path.c_str();
}

const char* gkdv_error_message(const gkdv_session* session) {
    return session == nullptr ? "" : session->error.c_str();
}

const char* gkdv_version(void) { return "1.0.0"; }

}  // extern "C"
