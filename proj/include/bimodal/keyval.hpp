#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace bimodal {

/// `key = value` text with '#' comments. Lookups convert and validate the
/// value and report failures as ConfigError with the source line.
///
/// Environment variables named prefix + upper-cased key (BIMODAL_NB for
/// `nb`) take precedence over file entries.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text, std::string source = "<config>");
    static KeyValueConfig load(const std::filesystem::path& path);

    /// Enables environment overrides for every later lookup.
    void apply_environment(std::string_view prefix = "BIMODAL_");

    /// Sets a value from code (command-line flags); wins over everything.
    void set(const std::string& key, std::string value);

    bool has(const std::string& key) const;

    double get_double(const std::string& key, double fallback);
    double require_double(const std::string& key);
    long long get_int(const std::string& key, long long fallback);
    std::size_t get_count(const std::string& key, std::size_t fallback);
    std::string get_string(const std::string& key, const std::string& fallback);
    bool get_bool(const std::string& key, bool fallback);

    /// Throws ConfigError naming the first entry no lookup asked for.
    void reject_unused() const;

    const std::string& source() const noexcept { return source_; }

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;  // 0: environment or code
        std::string origin;
    };

    std::optional<Entry> lookup(const std::string& key);
    [[noreturn]] void fail(const std::string& key, const Entry& e, const std::string& why) const;

    std::string source_ = "<config>";
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
    std::set<std::string> overridden_;
    std::string env_prefix_;
};

}  // namespace bimodal
