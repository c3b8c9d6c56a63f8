#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "amf/sweep.hpp"

namespace amf {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// "key = value" lines; '#' starts a comment, blank lines are skipped.
/// Throws Validation naming the source and line on a line without '='.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<input>");
KeyValues read_key_value_file(const std::string& path);

double parse_double(const std::string& key, const std::string& value);
long long parse_integer(const std::string& key, const std::string& value);
std::uint64_t parse_seed(const std::string& key, const std::string& value);

/// Settings shared by every command.
struct RunConfig {
    std::string prices;
    std::string factors;
    std::string taxonomy;  // empty: built-in taxonomy
    std::string bundle;
    SweepConfig sweep;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    /// Applies one setting; throws Validation for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void apply(const KeyValues& values);

    /// Sorted key=value listing of every setting that can change results
    /// (the worker count and output directory are left out).
    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;
};

RunConfig load_run_config(const std::string& path);

std::uint64_t fnv1a(const std::string& text);

}  // namespace amf
