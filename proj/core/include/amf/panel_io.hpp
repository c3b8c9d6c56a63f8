#pragma once

#include <string>
#include <vector>

#include "amf/panel.hpp"

namespace amf {

/// Long-format CSV ingestion and emission.
///
///   prices:  date,id,price,return
///   factors: date,id,value,role,class,subclass
///
/// Dates are ISO-8601 and are mapped to the Friday closing their week; when a
/// week holds several observations for one id the latest one wins. Prices are
/// turned into adjusted prices by compounding returns from the first observed
/// price; a gap with no return is bridged by the raw price ratio.
/// Violations throw Error(Validation) naming the file row.

struct IngestLog {
    std::vector<std::string> warnings;
};

std::string format_double(double v);

PricePanel read_price_csv(const std::string& path, IngestLog* log = nullptr);
FactorPanel read_factor_csv(const std::string& path, const Taxonomy& taxonomy = Taxonomy::builtin(),
                            IngestLog* log = nullptr);

/// Reads both files onto the union of their weekly grids.
MarketData read_market(const std::string& price_path, const std::string& factor_path,
                       const Taxonomy& taxonomy = Taxonomy::builtin(), IngestLog* log = nullptr);

void write_price_csv(const PricePanel& panel, const std::string& path);
void write_factor_csv(const FactorPanel& panel, const std::string& path);

/// Splits one CSV record; supports double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace amf
