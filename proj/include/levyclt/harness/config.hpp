#pragma once

// Flat INI-style experiment configuration ("section.key = value"), with typed getters
// and a canonical form whose FNV-1a hash tags every output file.

#include "levyclt/polycore/dense_matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyclt {

/// Invalid or missing configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that could not produce a trustworthy number; exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

class Config {
public:
    Config() = default;
    static Config from_file(const std::filesystem::path& path);
    static Config from_string(const std::string& text, std::filesystem::path base_dir = ".");

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated numbers; "2^-3" style powers are accepted.
    std::vector<double> get_list(const std::string& key) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
    /// Rows separated by '|', entries by ',' or whitespace.
    DenseMatrix<double> get_matrix(const std::string& key) const;
    /// Path relative to the config file's directory.
    std::filesystem::path get_path(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    /// Sorted "key=value" lines.
    std::string canonical() const;
    std::uint64_t hash() const { return fnv1a64(canonical()); }

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_ = ".";
};

double parse_number(const std::string& text, const std::string& what);

}  // namespace levyclt
