#include "bimodal/keyval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bimodal/errors.hpp"

namespace bimodal {

namespace {

std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) noexcept
{
    return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::string env_name(std::string_view prefix, const std::string& key)
{
    std::string name(prefix);
    for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return name;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source)
{
    KeyValueConfig cfg;
    cfg.source_ = std::move(source);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = cfg.source_ + " line " + std::to_string(line_no);
        if (eq == std::string_view::npos) {
            throw ConfigError(where + ": expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": field '" + key + "': empty value");
        if (cfg.entries_.count(key)) throw ConfigError(where + ": field '" + key + "': duplicate entry");
        cfg.entries_[key] = {value, line_no, where};
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void KeyValueConfig::apply_environment(std::string_view prefix)
{
    env_prefix_ = std::string(prefix);
}

void KeyValueConfig::set(const std::string& key, std::string value)
{
    entries_[key] = {std::move(value), 0, "command line"};
    overridden_.insert(key);
}

bool KeyValueConfig::has(const std::string& key) const
{
    if (entries_.count(key)) return true;
    return !env_prefix_.empty() && std::getenv(env_name(env_prefix_, key).c_str()) != nullptr;
}

std::optional<KeyValueConfig::Entry> KeyValueConfig::lookup(const std::string& key)
{
    used_.insert(key);
    if (overridden_.count(key)) return entries_.at(key);
    if (!env_prefix_.empty()) {
        const std::string name = env_name(env_prefix_, key);
        if (const char* v = std::getenv(name.c_str())) {
            return Entry{std::string(trim(v)), 0, "environment " + name};
        }
    }
    if (const auto it = entries_.find(key); it != entries_.end()) return it->second;
    return std::nullopt;
}

void KeyValueConfig::fail(const std::string& key, const Entry& e, const std::string& why) const
{
    throw ConfigError(e.origin + ": field '" + key + "': " + why + ", got '" + e.value + "'");
}

double KeyValueConfig::get_double(const std::string& key, double fallback)
{
    const auto e = lookup(key);
    if (!e) return fallback;
    double v = 0.0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) fail(key, *e, "expected a finite number");
    return v;
}

double KeyValueConfig::require_double(const std::string& key)
{
    if (!has(key)) throw ConfigError(source_ + ": missing required field '" + key + "'");
    return get_double(key, 0.0);
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback)
{
    const auto e = lookup(key);
    if (!e) return fallback;
    long long v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) fail(key, *e, "expected an integer");
    return v;
}

std::size_t KeyValueConfig::get_count(const std::string& key, std::size_t fallback)
{
    const auto e = lookup(key);
    if (!e) return fallback;
    const long long v = get_int(key, 0);
    if (v <= 0) fail(key, *e, "expected a positive integer");
    return static_cast<std::size_t>(v);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback)
{
    const auto e = lookup(key);
    return e ? e->value : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback)
{
    const auto e = lookup(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(key, *e, "expected true or false");
}

void KeyValueConfig::reject_unused() const
{
    const Entry* first = nullptr;
    std::string first_key;
    for (const auto& [key, e] : entries_) {
        if (used_.count(key)) continue;
        if (!first || e.line < first->line) {
            first = &e;
            first_key = key;
        }
    }
    if (first) throw ConfigError(first->origin + ": field '" + first_key + "': unknown key");
}

}  // namespace bimodal
