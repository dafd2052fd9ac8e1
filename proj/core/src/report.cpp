#include "illiq/report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace illiq {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json RunManifest::to_json() const {
    return nlohmann::json{{"schema_version", schema_version},
                          {"command", command},
                          {"library_version", library_version},
                          {"seed", seed},
                          {"scenario", scenario_echo},
                          {"grid", grid_summary},
                          {"outputs", outputs},
                          {"wall_clock_seconds", wall_clock_seconds}};
}

void RunManifest::append_to(const std::string& out_dir) const {
    const auto path = std::filesystem::path(out_dir) / "manifest.jsonl";
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open manifest: " + path.string());
    out << to_json().dump() << '\n';
}

const char* library_version() { return "0.1.0"; }

}  // namespace illiq
