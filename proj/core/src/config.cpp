#include "illiq/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace illiq {

namespace {

std::string trim(const std::string& s) {
    auto b = s.begin();
    auto e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
    return {b, e};
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
    Config cfg;
    cfg.name_ = name;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(name + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(name + ":" + std::to_string(line_no) +
                              ": expected key = value, got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
        }
        if (!section.empty()) key = section + "." + key;
        if (cfg.entries_.count(key)) {
            throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "'");
        }
        cfg.entries_[key] = Entry{value, line_no, false};
    }
    return cfg;
}

const Config::Entry& Config::entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ConfigError(name_ + ": missing required key '" + key + "'");
    }
    it->second.consumed = true;
    return it->second;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

int Config::line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
}

std::string Config::get_string(const std::string& key) const { return entry(key).value; }

double Config::get_double(const std::string& key) const {
    const Entry& e = entry(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key '" + key +
                          "' is not a number ('" + e.value + "')");
    }
}

std::int64_t Config::get_int(const std::string& key) const {
    const Entry& e = entry(key);
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key '" + key +
                          "' is not an integer ('" + e.value + "')");
    }
}

std::uint64_t Config::get_uint(const std::string& key) const {
    const Entry& e = entry(key);
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key '" + key +
                          "' is not a non-negative integer ('" + e.value + "')");
    }
}

bool Config::get_bool(const std::string& key) const {
    const Entry& e = entry(key);
    std::string v = e.value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key '" + key +
                      "' is not a boolean ('" + e.value + "')");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const Entry& e = entry(key);
    std::vector<double> out;
    std::istringstream ss(e.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key '" + key +
                              "' has a non-numeric list entry ('" + tok + "')");
        }
    }
    if (out.empty()) {
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key '" + key +
                          "' is an empty list");
    }
    return out;
}

std::string Config::get_string_or(const std::string& key, const std::string& dflt) const {
    return has(key) ? get_string(key) : dflt;
}
double Config::get_double_or(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}
std::int64_t Config::get_int_or(const std::string& key, std::int64_t dflt) const {
    return has(key) ? get_int(key) : dflt;
}
std::uint64_t Config::get_uint_or(const std::string& key, std::uint64_t dflt) const {
    return has(key) ? get_uint(key) : dflt;
}
bool Config::get_bool_or(const std::string& key, bool dflt) const {
    return has(key) ? get_bool(key) : dflt;
}

std::vector<std::string> Config::unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_) {
        if (!e.consumed) out.push_back(k);
    }
    return out;
}

void Config::reject_unconsumed() const {
    const auto leftover = unconsumed();
    if (!leftover.empty()) {
        const auto& key = leftover.front();
        throw ConfigError(name_ + ":" + std::to_string(line_of(key)) + ": unknown key '" + key +
                          "'");
    }
}

}  // namespace illiq
