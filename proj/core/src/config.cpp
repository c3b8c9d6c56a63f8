#include "amf/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>

#include "amf/error.hpp"
#include "amf/panel_io.hpp"

namespace amf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Grouping parse_grouping(const std::string& v) {
    if (v == "class") return Grouping::Class;
    if (v == "subclass") return Grouping::Subclass;
    throw Error(ErrorCode::Validation, "grouping must be class or subclass, got '" + v + "'");
}

}  // namespace

KeyValues parse_key_values(std::istream& in, const std::string& source) {
    KeyValues out;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Validation, source + " line " + std::to_string(row) + ": expected key = value");
        }
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

KeyValues read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Validation, "cannot open " + path);
    return parse_key_values(in, path);
}

double parse_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
        throw Error(ErrorCode::Validation, key + ": '" + value + "' is not a number");
    }
    return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
        throw Error(ErrorCode::Validation, key + ": '" + value + "' is not an integer");
    }
    return v;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
        throw Error(ErrorCode::Validation, key + ": '" + value + "' is not an unsigned 64-bit seed");
    }
    return v;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto& s = sweep;
    auto& g = s.gibs;
    auto integer = [&] { return static_cast<int>(parse_integer(key, value)); };
    auto real = [&] { return parse_double(key, value); };
    if (key == "prices") prices = value;
    else if (key == "factors") factors = value;
    else if (key == "taxonomy") taxonomy = value;
    else if (key == "bundle") bundle = value;
    else if (key == "first_year") s.first_year = integer();
    else if (key == "last_year") s.last_year = integer();
    else if (key == "min_len") s.min_len = integer();
    else if (key == "threshold") g.threshold_within = g.threshold_union = real();
    else if (key == "threshold_within") g.threshold_within = real();
    else if (key == "threshold_union") g.threshold_union = real();
    else if (key == "support_cap") g.support_cap = integer();
    else if (key == "folds") g.n_folds = integer();
    else if (key == "grid_size") g.grid_size = integer();
    else if (key == "significance") g.significance = real();
    else if (key == "grouping") g.grouping = parse_grouping(value);
    else if (key == "lasso_tolerance") g.lasso.tolerance = real();
    else if (key == "max_sweeps") g.lasso.max_sweeps = integer();
    else if (key == "fdr") s.fdr = real();
    else if (key == "basis_size") s.basis_size = integer();
    else if (key == "min_coverage") s.min_coverage = real();
    else if (key == "oos_weeks") s.oos_weeks = integer();
    else if (key == "workers") s.workers = integer();
    else if (key == "seed") seed = parse_seed(key, value);
    else if (key == "output_dir") output_dir = value;
    else throw Error(ErrorCode::Validation, "unknown setting '" + key + "'");

    if (s.min_len < 1 || s.last_year < s.first_year) throw Error(ErrorCode::Validation, "bad window bounds");
    if (g.support_cap < 1 || g.n_folds < 2 || g.grid_size < 2) {
        throw Error(ErrorCode::Validation, "support_cap >= 1, folds >= 2 and grid_size >= 2 required");
    }
    if (s.basis_size < 1) throw Error(ErrorCode::Validation, "basis_size must be >= 1");
}

void RunConfig::apply(const KeyValues& values) {
    for (const auto& [k, v] : values) set(k, v);
}

std::string RunConfig::canonical() const {
    const auto& s = sweep;
    const auto& g = s.gibs;
    std::map<std::string, std::string> kv{
        {"prices", prices},
        {"factors", factors},
        {"taxonomy", taxonomy},
        {"bundle", bundle},
        {"first_year", std::to_string(s.first_year)},
        {"last_year", std::to_string(s.last_year)},
        {"min_len", std::to_string(s.min_len)},
        {"threshold_within", format_double(g.threshold_within)},
        {"threshold_union", format_double(g.threshold_union)},
        {"support_cap", std::to_string(g.support_cap)},
        {"folds", std::to_string(g.n_folds)},
        {"grid_size", std::to_string(g.grid_size)},
        {"significance", format_double(g.significance)},
        {"grouping", g.grouping == Grouping::Class ? "class" : "subclass"},
        {"lasso_tolerance", format_double(g.lasso.tolerance)},
        {"max_sweeps", std::to_string(g.lasso.max_sweeps)},
        {"fdr", format_double(s.fdr)},
        {"basis_size", std::to_string(s.basis_size)},
        {"min_coverage", format_double(s.min_coverage)},
        {"oos_weeks", std::to_string(s.oos_weeks)},
        {"seed", std::to_string(seed)},
    };
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

std::string RunConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    cfg.apply(read_key_value_file(path));
    return cfg;
}

}  // namespace amf
