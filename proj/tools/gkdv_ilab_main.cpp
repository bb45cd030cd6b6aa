#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gkdv_ilab.h"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_diverged = 3;

int bail(gkdv_session* session, const char* stage) {
    std::fprintf(stderr, "gkdv-ilab: %s: %s\n", stage, gkdv_error_message(session));
    gkdv_session_destroy(session);
    return exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gKdV I-method laboratory"};
    app.set_help_flag("--help", "print this help and exit");

    std::string kind;
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = "out";
    std::string seed;
    std::string workers;
    app.add_option("kind", kind,
                   "experiment kind: simulate, soliton-test, conservation, "
                   "almost-conservation, counterexample, bilinear-probe, identities, "
                   "global-continuation, sweep")
        ->required();
    app.add_option("--config", config_path, "config file (key = value lines)");
    app.add_option("--set", sets, "override one config key (key=value, repeatable)")
        ->allow_extra_args(false);
    app.add_option("--out", out_dir, "report directory (default: out)");
    app.add_option("--seed", seed, "random seed (overrides config and --set)");
    app.add_option("--workers", workers, "sweep worker pool size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    gkdv_session* session = gkdv_session_create();
    if (session == nullptr) {
        std::fprintf(stderr, "gkdv-ilab: out of memory\n");
        return exit_usage;
    }

    if (gkdv_select_kind(session, kind.c_str()) != GKDV_OK) return bail(session, "kind");
    if (!config_path.empty() && gkdv_load_config(session, config_path.c_str()) != GKDV_OK)
        return bail(session, "config");
    for (const auto& assignment : sets) {
        const auto split = assignment.find('=');
        if (split == std::string::npos) {
            std::fprintf(stderr, "gkdv-ilab: --set expects key=value, got '%s'\n",
                         assignment.c_str());
            gkdv_session_destroy(session);
            return exit_usage;
        }
        const std::string key = assignment.substr(0, split);
        const std::string value = assignment.substr(split + 1);
        if (gkdv_set(session, key.c_str(), value.c_str()) != GKDV_OK)
            return bail(session, "--set");
    }
    if (!seed.empty() && gkdv_set(session, "seed", seed.c_str()) != GKDV_OK)
        return bail(session, "--seed");
    if (!workers.empty() && gkdv_set(session, "workers", workers.c_str()) != GKDV_OK)
        return bail(session, "--workers");

    if (gkdv_run(session) != GKDV_OK) return bail(session, "run");
    if (gkdv_write_report(session, out_dir.c_str()) != GKDV_OK) return bail(session, "report");

    const bool diverged = gkdv_divergence_flagged(session) == 1;
    const bool passed = gkdv_checks_passed(session) == 1;
    const char* verdict = diverged ? "DIVERGED" : passed ? "PASS" : "FAIL";
    std::printf("%s: %s (report: %s)\n", kind.c_str(), verdict, gkdv_report_path(session));
    gkdv_session_destroy(session);
    if (diverged) return exit_diverged;
    return passed ? exit_pass : exit_check_failed;
}
