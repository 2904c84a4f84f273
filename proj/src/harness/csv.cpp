#include "levyclt/harness/csv.hpp"

#include "levyclt/harness/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levyclt {

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
    rows_.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    throw std::out_of_range("CsvTable: no column '" + name + "'");
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt(long v) { return std::to_string(v); }

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string timestamp_line() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, "# generated_at=%Y-%m-%dT%H:%M:%SZ\n", &tm);
    return buf;
}

}  // namespace

std::string render_csv(const CsvTable& table, std::uint64_t config_hash, bool timestamp) {
    std::string out = timestamp ? timestamp_line() : "";
    out += "config_hash";
    for (const auto& h : table.header()) out += "," + csv_quote(h);
    out += "\r\n";
    const std::string hash = hex64(config_hash);
    for (const auto& row : table.rows()) {
        out += hash;
        for (const auto& f : row) out += "," + csv_quote(f);
        out += "\r\n";
    }
    return out;
}

std::string render_text(const std::string& body, std::uint64_t config_hash, bool timestamp) {
    std::string out = timestamp ? timestamp_line() : "";
    return out + "config_hash=" + hex64(config_hash) + "\n" + body;
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string field;
    bool in_quotes = false, at_line_start = true, skipping = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (at_line_start && records.empty() && c == '#') skipping = true;
        at_line_start = false;
        if (skipping) {
            if (c == '\n') {
                skipping = false;
                at_line_start = true;
            }
            continue;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            any = true;
        } else if (c == ',') {
            rec.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r') {
            continue;
        } else if (c == '\n') {
            rec.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(rec));
            rec.clear();
            any = false;
            at_line_start = true;
        } else {
            field += c;
            any = true;
        }
    }
    if (in_quotes) throw std::invalid_argument("parse_csv: unterminated quoted field");
    if (any) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw std::invalid_argument("parse_csv: no header");
    CsvTable t(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) t.add_row(records[i]);
    return t;
}

std::string existing_output_hash(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return "";
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# generated_at=", 0) == 0) continue;
        if (line.rfind("config_hash=", 0) == 0) return line.substr(12);
        break;
    }
    try {
        const CsvTable t = parse_csv(text);
        const std::size_t col = t.column("config_hash");
        return t.rows().empty() ? "" : t.rows().front()[col];
    } catch (const std::exception&) {
        return "";
    }
}

void write_output(const std::filesystem::path& path, const std::string& content, std::uint64_t config_hash,
                  const OutputOptions& opts) {
    if (std::filesystem::exists(path) && !opts.force) {
        const std::string old = existing_output_hash(path);
        if (old != hex64(config_hash))
            throw ConfigError("refusing to overwrite '" + path.string() + "': recorded config hash '" + old +
                              "' differs from " + hex64(config_hash) + " (use --force)");
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open output '" + path.string() + "'");
    f << content;
    if (!f) throw ConfigError("failed writing output '" + path.string() + "'");
}

}  // namespace levyclt
