#pragma once

// Experiment tables and their RFC-4180 serialization. Every file carries the config hash
// as its first column; an optional "# generated_at=" first line is the only
// non-reproducible content.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace levyclt {

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    void add_row(std::vector<std::string> row);
    /// Column index by name; throws std::out_of_range.
    std::size_t column(const std::string& name) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Ten significant digits; "nan"/"inf" spelled out.
std::string fmt(double v);
std::string fmt(long v);
std::string csv_quote(const std::string& field);

struct OutputOptions {
    bool timestamp = true;
    bool force = false;
};

/// Table with a leading config_hash column, optionally preceded by a timestamp line.
std::string render_csv(const CsvTable& table, std::uint64_t config_hash, bool timestamp);

/// Text dump with a "config_hash=" first line (after the optional timestamp line).
std::string render_text(const std::string& body, std::uint64_t config_hash, bool timestamp);

/// Hash recorded in an existing output, if any ("config_hash" column or "config_hash=" line).
std::string existing_output_hash(const std::filesystem::path& path);

/// Writes `content` unless the file exists with a different recorded hash and !force
/// (throws ConfigError).
void write_output(const std::filesystem::path& path, const std::string& content, std::uint64_t config_hash,
                  const OutputOptions& opts);

/// Parses RFC-4180 text (skipping '#' lines before the header) back into a table.
CsvTable parse_csv(const std::string& text);

}  // namespace levyclt
