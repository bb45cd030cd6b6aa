#include "gkdv/lab.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gkdv::lab {

namespace {

const std::map<std::string, RunKind>& kind_table() {
    static const std::map<std::string, RunKind> table{
        {"simulate", RunKind::simulate},
        {"soliton-test", RunKind::soliton_test},
        {"conservation", RunKind::conservation},
        {"almost-conservation", RunKind::almost_conservation},
        {"counterexample", RunKind::counterexample},
        {"bilinear-probe", RunKind::bilinear_probe},
        {"identities", RunKind::identities},
        {"global-continuation", RunKind::global_continuation},
        {"sweep", RunKind::sweep},
    };
    return table;
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& requirement) {
    throw std::invalid_argument(key + " " + requirement);
}

double parse_double(const std::string& key, const std::string& value) {
    size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        bad_value(key, "must be a number, got '" + value + "'");
    }
    if (pos != value.size()) bad_value(key, "must be a number, got '" + value + "'");
    return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
    size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(value, &pos);
    } catch (const std::exception&) {
        bad_value(key, "must be an integer, got '" + value + "'");
    }
    if (pos != value.size()) bad_value(key, "must be an integer, got '" + value + "'");
    return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
    size_t pos = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(value, &pos);
    } catch (const std::exception&) {
        bad_value(key, "must be a nonnegative integer, got '" + value + "'");
    }
    if (pos != value.size()) bad_value(key, "must be a nonnegative integer, got '" + value + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
    if (out.empty()) bad_value(key, "must be a nonempty comma-separated list");
    return out;
}

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ",";
        out += format_double(values[i]);
    }
    return out;
}

}  // namespace

RunKind parse_kind(const std::string& text) {
    const auto it = kind_table().find(text);
    if (it == kind_table().end())
        throw std::invalid_argument("unknown experiment kind '" + text + "'");
    return it->second;
}

std::string kind_name(RunKind kind) {
    for (const auto& [name, value] : kind_table())
        if (value == kind) return name;
    return "unknown";
}

RunConfig default_config(RunKind kind) {
    RunConfig cfg;  // struct defaults match soliton-test
    cfg.kind = kind;
    switch (kind) {
        case RunKind::simulate:
            cfg.length = 30.0;
            cfg.num_modes = 512;
            cfg.data = "gaussian";
            cfg.T = 1.0;
            break;
        case RunKind::soliton_test:
            break;
        case RunKind::conservation:
            cfg.T = 1.0;
            break;
        case RunKind::almost_conservation:
            cfg.length = 30.0;
            cfg.num_modes = 512;
            cfg.data = "gaussian";
            cfg.amplitude = 0.5;
            cfg.width = 0.25;
            cfg.c_delta = 0.01;
            break;
        case RunKind::counterexample:
            cfg.big_n = 1.0;
            cfg.k = 100.0;
            break;
        case RunKind::bilinear_probe:
            cfg.length = 50.265482457436692;  // 16 pi: integer modes stay dyadic-friendly
            cfg.num_modes = 2048;
            cfg.n1 = 1.0;
            cfg.n_list = {4.0, 16.0, 64.0};
            break;
        case RunKind::identities:
            break;
        case RunKind::global_continuation:
            cfg.length = 30.0;
            cfg.num_modes = 512;
            cfg.data = "gaussian";
            cfg.amplitude = 0.6;
            cfg.width = 1.0;
            break;
        case RunKind::sweep:
            break;
    }
    return cfg;
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "kind") {
        config.kind = parse_kind(value);
    } else if (key == "L") {
        config.length = parse_double(key, value);
        if (!(config.length > 0.0)) bad_value(key, "must be positive");
    } else if (key == "n") {
        const long long n = parse_integer(key, value);
        if (n < 8 || n % 2 != 0) bad_value(key, "must be an even integer of at least 8");
        config.num_modes = static_cast<int>(n);
    } else if (key == "data") {
        if (value != "soliton" && value != "gaussian")
            bad_value(key, "must be 'soliton' or 'gaussian'");
        config.data = value;
    } else if (key == "amplitude") {
        config.amplitude = parse_double(key, value);
        if (!(config.amplitude > 0.0)) bad_value(key, "must be positive");
    } else if (key == "width") {
        config.width = parse_double(key, value);
        if (!(config.width > 0.0)) bad_value(key, "must be positive");
    } else if (key == "c") {
        config.c = parse_double(key, value);
        if (!(config.c > 0.0)) bad_value(key, "must be positive");
    } else if (key == "center") {
        config.center = parse_double(key, value);
    } else if (key == "s") {
        config.s = parse_double(key, value);
        if (!(config.s > 0.5) || !(config.s < 1.0)) bad_value(key, "must lie in (1/2, 1)");
    } else if (key == "N") {
        config.big_n = parse_double(key, value);
        if (!(config.big_n >= 1.0)) bad_value(key, "must be at least 1");
    } else if (key == "N_list") {
        config.n_list = parse_double_list(key, value);
        for (const double n : config.n_list)
            if (!(n >= 2.0)) bad_value(key, "entries must be at least 2");
    } else if (key == "T") {
        config.T = parse_double(key, value);
        if (!(config.T >= 0.0)) bad_value(key, "must be nonnegative");
    } else if (key == "dt") {
        config.dt = parse_double(key, value);
        if (!(config.dt > 0.0)) bad_value(key, "must be positive");
    } else if (key == "T_w") {
        config.t_window = parse_double(key, value);
        if (!(config.t_window >= 0.0)) bad_value(key, "must be nonnegative (0 = automatic)");
    } else if (key == "window_start") {
        config.window_start = parse_double(key, value);
        if (!(config.window_start >= 0.0)) bad_value(key, "must be nonnegative");
    } else if (key == "N1") {
        config.n1 = parse_double(key, value);
        if (!(config.n1 >= 1.0)) bad_value(key, "must be at least 1");
    } else if (key == "k") {
        config.k = parse_double(key, value);
        if (!(config.k > 0.0)) bad_value(key, "must be positive");
    } else if (key == "samples") {
        const long long n = parse_integer(key, value);
        if (n < 1) bad_value(key, "must be a positive integer");
        config.samples = static_cast<int>(n);
    } else if (key == "probe_samples") {
        const long long n = parse_integer(key, value);
        if (n < 1) bad_value(key, "must be a positive integer");
        config.probe_samples = static_cast<int>(n);
    } else if (key == "c_delta") {
        config.c_delta = parse_double(key, value);
        if (!(config.c_delta > 0.0)) bad_value(key, "must be positive");
    } else if (key == "epsilon") {
        config.epsilon = parse_double(key, value);
        if (!(config.epsilon > 0.0) || !(config.epsilon < 0.25))
            bad_value(key, "must lie in (0, 0.25)");
    } else if (key == "lambda_margin") {
        config.lambda_margin = parse_double(key, value);
        if (!(config.lambda_margin >= 0.0)) bad_value(key, "must be nonnegative");
    } else if (key == "sample_every") {
        const long long n = parse_integer(key, value);
        if (n < 0) bad_value(key, "must be nonnegative (0 = automatic)");
        config.sample_every = n;
    } else if (key == "seed") {
        config.seed = parse_seed(key, value);
    } else if (key == "workers") {
        const long long n = parse_integer(key, value);
        if (n < 0) bad_value(key, "must be nonnegative (0 = hardware concurrency)");
        config.workers = static_cast<int>(n);
    } else if (key == "sweep_key") {
        config.sweep_key = value;
    } else if (key == "sweep_values") {
        config.sweep_values = value;
    } else if (key == "child_kind") {
        if (parse_kind(value) == RunKind::sweep)
            bad_value(key, "cannot itself be 'sweep'");
        config.child_kind = value;
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
    config.assignments.emplace_back(key, value);
}

namespace {

std::vector<std::pair<std::string, std::string>> read_config_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected 'key = value'");
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return entries;
}

std::pair<std::string, std::string> split_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be key=value, got '" + text + "'");
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

}  // namespace

RunConfig parse_config(std::optional<RunKind> kind, const std::string& config_path,
                       const std::vector<std::string>& overrides) {
    std::vector<std::pair<std::string, std::string>> entries;
    if (!config_path.empty()) entries = read_config_lines(config_path);
    for (const auto& text : overrides) entries.push_back(split_override(text));

    RunKind resolved;
    if (kind) {
        resolved = *kind;
    } else {
        bool found = false;
        resolved = RunKind::soliton_test;
        for (const auto& [key, value] : entries)
            if (key == "kind" && !found) {
                resolved = parse_kind(value);
                found = true;
            }
        if (!found)
            throw std::invalid_argument("kind not specified (positional argument or kind key)");
    }

    RunConfig config = default_config(resolved);
    for (const auto& [key, value] : entries) {
        apply_key(config, key, value);
        if (key == "kind" && config.kind != resolved)
            throw std::invalid_argument("kind in config conflicts with the invoked kind '" +
                                        kind_name(resolved) + "'");
    }
    config.kind = resolved;
    return config;
}

nlohmann::json config_echo(const RunConfig& config) {
    nlohmann::json echo;
    echo["kind"] = kind_name(config.kind);
    echo["L"] = config.length;
    echo["n"] = config.num_modes;
    echo["data"] = config.data;
    echo["amplitude"] = config.amplitude;
    echo["width"] = config.width;
    echo["c"] = config.c;
    echo["center"] = config.center;
    echo["s"] = config.s;
    echo["N"] = config.big_n;
    echo["N_list"] = config.n_list;
    echo["T"] = config.T;
    echo["dt"] = config.dt;
    echo["T_w"] = config.t_window;
    echo["window_start"] = config.window_start;
    echo["N1"] = config.n1;
    echo["k"] = config.k;
    echo["samples"] = config.samples;
    echo["probe_samples"] = config.probe_samples;
    echo["c_delta"] = config.c_delta;
    echo["epsilon"] = config.epsilon;
    echo["lambda_margin"] = config.lambda_margin;
    echo["sample_every"] = config.sample_every;
    echo["seed"] = config.seed;
    echo["workers"] = config.workers;
    if (config.kind == RunKind::sweep) {
        echo["sweep_key"] = config.sweep_key;
        echo["sweep_values"] = config.sweep_values;
        echo["child_kind"] = config.child_kind;
    }
    return echo;
}

std::string config_file_text(const RunConfig& config) {
    std::string out;
    auto put = [&out](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };
    put("kind", kind_name(config.kind));
    put("L", format_double(config.length));
    put("n", std::to_string(config.num_modes));
    put("data", config.data);
    put("amplitude", format_double(config.amplitude));
    put("width", format_double(config.width));
    put("c", format_double(config.c));
    put("center", format_double(config.center));
    put("s", format_double(config.s));
    put("N", format_double(config.big_n));
    put("N_list", join_doubles(config.n_list));
    put("T", format_double(config.T));
    put("dt", format_double(config.dt));
    put("T_w", format_double(config.t_window));
    put("window_start", format_double(config.window_start));
    put("N1", format_double(config.n1));
    put("k", format_double(config.k));
    put("samples", std::to_string(config.samples));
    put("probe_samples", std::to_string(config.probe_samples));
    put("c_delta", format_double(config.c_delta));
    put("epsilon", format_double(config.epsilon));
    put("lambda_margin", format_double(config.lambda_margin));
    put("sample_every", std::to_string(config.sample_every));
    put("seed", std::to_string(config.seed));
    put("workers", std::to_string(config.workers));
    if (config.kind == RunKind::sweep) {
        put("sweep_key", config.sweep_key);
        put("sweep_values", config.sweep_values);
        put("child_kind", config.child_kind);
    }
    return out;
}

}  // namespace gkdv::lab
