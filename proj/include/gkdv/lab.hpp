#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gkdv/schedule.hpp"

namespace gkdv::lab {

enum class RunKind {
    simulate,
    soliton_test,
    conservation,
    almost_conservation,
    counterexample,
    bilinear_probe,
    identities,
    global_continuation,
    sweep,
};

RunKind parse_kind(const std::string& text);
std::string kind_name(RunKind kind);

// Flat, fully resolved run configuration. Defaults are per kind; every key is
// settable from a config file (key = value lines) or a --set override, and
// unknown keys are rejected. The JSON config echo prints exactly these keys.
struct RunConfig {
    RunKind kind = RunKind::soliton_test;
    double length = 50.0;
    int num_modes = 1024;
    std::string data = "soliton";  // soliton | gaussian
    double amplitude = 0.5;
    double width = 1.0;
    double c = 1.0;
    double center = -1.0;  // < 0 means length / 2
    double s = 0.7;
    double big_n = 16.0;
    std::vector<double> n_list{8.0, 16.0, 32.0, 64.0};
    double T = 5.0;
    double dt = 1e-3;
    double t_window = 0.0;  // bilinear window; 0 selects one interaction passage
    double window_start = 0.0;
    double n1 = 1.0;  // bilinear low band
    double k = 100.0; // counterexample frequency scale
    int samples = 1000;
    int probe_samples = 10000;
    double c_delta = 1.0;
    double epsilon = 0.01;
    double lambda_margin = 0.05;
    long long sample_every = 0;  // 0 picks roughly 200 rows
    std::uint64_t seed = 12345;
    int workers = 0;  // 0 means hardware concurrency
    std::string sweep_key;
    std::string sweep_values;  // comma-separated
    std::string child_kind;

    // Explicit key = value pairs applied while resolving this config, in
    // order. Sweep children replay them on top of the child kind's defaults;
    // not part of the echo.
    std::vector<std::pair<std::string, std::string>> assignments;
};

RunConfig default_config(RunKind kind);

// Applies one key = value assignment with range validation; throws
// std::invalid_argument with a message naming the key and the valid range.
void apply_key(RunConfig& config, const std::string& key, const std::string& value);

// Resolves a full config: defaults for the kind, then the file (if any), then
// the overrides in order. When `kind` is absent the file must carry a kind
// key. A kind key that contradicts the invoked kind is an error.
RunConfig parse_config(std::optional<RunKind> kind, const std::string& config_path,
                       const std::vector<std::string>& overrides);

nlohmann::json config_echo(const RunConfig& config);

// The same resolved configuration as a parseable config file (one key = value
// line per field), so an echoed config reproduces its run exactly.
std::string config_file_text(const RunConfig& config);

struct ReportRow {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double e1 = 0.0;
    double hs_norm = 0.0;
    double linf = 0.0;
};

struct ExperimentReport {
    RunConfig config;
    std::vector<ReportRow> rows;
    nlohmann::json summary;
    bool checks_passed = true;
    bool diverged = false;
    double runtime_seconds = 0.0;
    std::vector<ExperimentReport> children;  // sweep only
};

// Builds the configured initial data on the configured grid.
SpectralField initial_data(const RunConfig& config);

ExperimentReport run(const RunConfig& config);

// CSV (<stem>.csv: t,mass,energy,e1,hs_norm,linf at 17 significant digits) and
// JSON sidecar (<stem>.json: config echo + summary + flags); sweeps write one
// CSV per child plus the aggregate JSON. Stem is the kind name. Returns the
// sidecar path. Throws std::runtime_error naming the path on I/O failure.
std::string write_report(const ExperimentReport& report, const std::string& out_dir);

std::string csv_text(const std::vector<ReportRow>& rows);

}  // namespace gkdv::lab
