#include "levyclt/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace levyclt {

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
    const auto p = s.find_first_of(";#");
    return trim(p == std::string::npos ? s : s.substr(0, p));
}

Config parse(std::istream& in, std::filesystem::path base_dir) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    Config c = Config::from_string("", std::move(base_dir));
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            c.set(section, strip_comment(body.data()));
            continue;
        }
        for (const auto& [key, leaf] : body) {
            if (!leaf.empty()) throw ConfigError("config: nested keys are not supported (" + section + "." + key + ")");
            c.set(section + "." + key, strip_comment(leaf.data()));
        }
    }
    return c;
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
    auto dir = path.parent_path();
    return parse(f, dir.empty() ? std::filesystem::path(".") : dir);
}

Config Config::from_string(const std::string& text, std::filesystem::path base_dir) {
    if (text.empty()) {
        Config c;
        c.base_dir_ = std::move(base_dir);
        return c;
    }
    std::istringstream in(text);
    return parse(in, std::move(base_dir));
}

double parse_number(const std::string& raw, const std::string& what) {
    const std::string text = trim(raw);
    if (text.empty()) throw ConfigError(what + ": empty number");
    if (auto caret = text.find('^'); caret != std::string::npos)
        return std::pow(parse_number(text.substr(0, caret), what), parse_number(text.substr(caret + 1), what));
    if (auto slash = text.find('/'); slash != std::string::npos) {
        const double d = parse_number(text.substr(slash + 1), what);
        if (d == 0.0) throw ConfigError(what + ": division by zero in '" + text + "'");
        return parse_number(text.substr(0, slash), what) / d;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v)) throw ConfigError(what + ": '" + text + "' is not a finite number");
    return v;
}

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const { return parse_number(get_string(key), key); }
double Config::get_double(const std::string& key, double fallback) const { return has(key) ? get_double(key) : fallback; }

long Config::get_int(const std::string& key) const {
    const double v = get_double(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError(key + ": expected an integer");
    return static_cast<long>(v);
}
long Config::get_int(const std::string& key, long fallback) const { return has(key) ? get_int(key) : fallback; }

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string s = trim(get_string(key));
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used, 10);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-') throw ConfigError(key + ": expected an unsigned 64-bit integer");
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ConfigError(key + ": expected a boolean");
}

std::vector<double> Config::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get_string(key));
    for (std::string tok; std::getline(ss, tok, ',');) out.push_back(parse_number(tok, key));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
    return has(key) ? get_list(key) : fallback;
}

DenseMatrix<double> Config::get_matrix(const std::string& key) const {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(get_string(key));
    for (std::string row; std::getline(ss, row, '|');) {
        for (auto& ch : row)
            if (ch == ',') ch = ' ';
        std::istringstream rs(row);
        std::vector<double> r;
        for (std::string tok; rs >> tok;) r.push_back(parse_number(tok, key));
        if (!r.empty()) rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError(key + ": empty matrix");
    DenseMatrix<double> m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw ConfigError(key + ": ragged matrix");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::filesystem::path Config::get_path(const std::string& key) const {
    std::filesystem::path p(get_string(key));
    return p.is_absolute() ? p : base_dir_ / p;
}

std::string Config::canonical() const {
    std::string s;
    for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
    return s;
}

}  // namespace levyclt
