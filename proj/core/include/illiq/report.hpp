// Output helpers: locale-independent shortest round-trip numbers, file
// writing and the append-only run manifest.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace illiq {

// Shortest decimal representation that round-trips to the same double
// (std::to_chars general form); locale independent.
std::string fmt_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// One manifest entry per run, appended as a JSON line to
// <out_dir>/manifest.jsonl.  Every emitted output file is referenced by
// exactly one entry.
struct RunManifest {
    int schema_version = 1;
    std::string command;
    std::string library_version;
    std::uint64_t seed = 0;
    std::string scenario_echo;  // flattened key=value echo of the spec
    std::string grid_summary;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;

    nlohmann::json to_json() const;
    void append_to(const std::string& out_dir) const;
};

const char* library_version();

}  // namespace illiq
