// Line-oriented key/value configuration files.
//
//   # comment
//   schema_version = 1
//   [grid]
//   base_dt = 0.25
//
// Section headers prefix subsequent keys ("grid.base_dt").  Every key
// records its line number so that validation errors can point at the
// offending line.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace illiq {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& name = "<config>");

    bool has(const std::string& key) const;
    std::vector<std::string> keys() const;
    int line_of(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;  // comma separated

    // Typed access with defaults; the key is marked as consumed either way.
    std::string get_string_or(const std::string& key, const std::string& dflt) const;
    double get_double_or(const std::string& key, double dflt) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t dflt) const;
    std::uint64_t get_uint_or(const std::string& key, std::uint64_t dflt) const;
    bool get_bool_or(const std::string& key, bool dflt) const;

    // Keys never touched by any accessor; used to reject unknown keys.
    std::vector<std::string> unconsumed() const;
    // Throws ConfigError naming the first unknown key and its line.
    void reject_unconsumed() const;

    const std::string& source_name() const { return name_; }

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    const Entry& entry(const std::string& key) const;

    std::string name_;
    std::map<std::string, Entry> entries_;
};

}  // namespace illiq
