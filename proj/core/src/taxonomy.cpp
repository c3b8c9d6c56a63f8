#include "amf/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "amf/error.hpp"

namespace amf {

namespace {

std::vector<std::pair<std::string, std::string>> builtin_rows() {
    const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
        {"Bond/Fixed Income",
         {"California Munis", "Corporate Bonds", "Emerging Markets Bonds", "Government Bonds",
          "High Yield Bonds", "Inflation-Protected Bonds", "International Government Bonds",
          "Money Market", "Mortgage Backed Securities", "National Munis", "New York Munis",
          "Preferred Stock/Convertible Bonds", "Total Bond Market"}},
        {"Commodity",
         {"Agricultural Commodities", "Commodities", "Metals", "Oil & Gas", "Precious Metals"}},
        {"Currency", {"Currency"}},
        {"Diversified Portfolio", {"Diversified Portfolio", "Target Retirement Date"}},
        {"Equity",
         {"All Cap Equities", "Alternative Energy Equities", "Asia Pacific Equities",
          "Building & Construction", "China Equities", "Commodity Producers Equities",
          "Communications Equities", "Consumer Discretionary Equities", "Consumer Staples Equities",
          "Emerging Markets Equities", "Energy Equities", "Europe Equities", "Financial Equities",
          "Foreign Large Cap Equities", "Foreign Small & Mid Cap Equities", "Global Equities",
          "Health & Biotech Equities", "Industrials Equities", "Japan Equities",
          "Large Cap Blend Equities", "Large Cap Growth Equities", "Large Cap Value Equities",
          "Latin America Equities", "MLPs (Master Limited Partnerships)", "Materials",
          "Mid Cap Blend Equities", "Mid Cap Growth Equities", "Mid Cap Value Equities",
          "Small Cap Blend Equities", "Small Cap Growth Equities", "Small Cap Value Equities",
          "Technology Equities", "Transportation Equities", "Utilities Equities",
          "Volatility Hedged Equity", "Water Equities"}},
        {"Alternative ETFs", {"Hedge Fund", "Long-Short"}},
        {"Inverse", {"Inverse Bonds", "Inverse Commodities", "Inverse Equities", "Inverse Volatility"}},
        {"Leveraged",
         {"Leveraged Bonds", "Leveraged Commodities", "Leveraged Currency", "Leveraged Equities",
          "Leveraged Multi-Asset", "Leveraged Real Estate", "Leveraged Volatility"}},
        {"Real Estate", {"Global Real Estate", "Real Estate"}},
        {"Volatility", {"Volatility"}},
    };
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& [cls, subs] : table) {
        for (const auto& s : subs) rows.emplace_back(s, cls);
    }
    return rows;
}

std::string trim(std::string s) {
    const auto ws = " \t\r\n\"";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

Taxonomy::Taxonomy(const std::vector<std::pair<std::string, std::string>>& rows) {
    for (const auto& [sub, cls] : rows) {
        auto [it, inserted] = subclass_class_.emplace(sub, cls);
        if (!inserted && it->second != cls) {
            throw Error(ErrorCode::Validation,
                        "subclass '" + sub + "' mapped to both '" + it->second + "' and '" + cls + "'");
        }
        if (std::find(classes_.begin(), classes_.end(), cls) == classes_.end()) classes_.push_back(cls);
    }
}

const Taxonomy& Taxonomy::builtin() {
    static const Taxonomy t(builtin_rows());
    return t;
}

Taxonomy Taxonomy::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Validation, "cannot open taxonomy file " + path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || trim(line).empty()) continue;
        // Subclass names may contain '/', '&', and parentheses but not commas.
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw Error(ErrorCode::Validation, path + " row " + std::to_string(lineno) + ": expected subclass,class");
        }
        rows.emplace_back(trim(line.substr(0, comma)), trim(line.substr(comma + 1)));
    }
    return Taxonomy(rows);
}

std::optional<std::string> Taxonomy::class_of(const std::string& subclass) const {
    auto it = subclass_class_.find(subclass);
    if (it == subclass_class_.end()) return std::nullopt;
    return it->second;
}

bool Taxonomy::contains(const std::string& cls, const std::string& subclass) const {
    auto c = class_of(subclass);
    return c && *c == cls;
}

}  // namespace amf
