#include "gkdv/lab.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace gkdv::lab {

namespace {

std::string format17(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string sanitize(const std::string& text) {
    std::string out;
    for (const char ch : text)
        out += (std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '.' || ch == '-')
                   ? ch
                   : '_';
    return out;
}

nlohmann::json report_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["config"] = config_echo(report.config);
    j["summary"] = report.summary;
    j["checks_passed"] = report.checks_passed;
    j["diverged"] = report.diverged;
    j["runtime_seconds"] = report.runtime_seconds;
    j["row_count"] = report.rows.size();
    return j;
}

}  // namespace

std::string csv_text(const std::vector<ReportRow>& rows) {
    std::string out = "t,mass,energy,e1,hs_norm,linf\n";
    for (const auto& row : rows) {
        out += format17(row.t);
        out += ',';
        out += format17(row.mass);
        out += ',';
        out += format17(row.energy);
        out += ',';
        out += format17(row.e1);
        out += ',';
        out += format17(row.hs_norm);
        out += ',';
        out += format17(row.linf);
        out += '\n';
    }
    return out;
}

std::string write_report(const ExperimentReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir.string());

    const std::string stem = kind_name(report.config.kind);
    nlohmann::json sidecar = report_json(report);

    if (report.config.kind == RunKind::sweep) {
        nlohmann::json children = nlohmann::json::array();
        for (size_t i = 0; i < report.children.size(); ++i) {
            const auto& child = report.children[i];
            const std::string child_stem =
                stem + "_" + std::to_string(i) + "_" + sanitize(kind_name(child.config.kind));
            write_file(dir / (child_stem + ".csv"), csv_text(child.rows));
            nlohmann::json entry = report_json(child);
            entry["csv"] = child_stem + ".csv";
            children.push_back(std::move(entry));
        }
        sidecar["children"] = std::move(children);
    }

    write_file(dir / (stem + ".csv"), csv_text(report.rows));
    const fs::path sidecar_path = dir / (stem + ".json");
    write_file(sidecar_path, sidecar.dump(2) + "\n");
    return sidecar_path.string();
}

}  // namespace gkdv::lab
