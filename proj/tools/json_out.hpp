#pragma once

#include <string>

#include <json.hpp>

#include "amf/config.hpp"
#include "amf/sweep.hpp"
#include "amf/synth.hpp"

namespace amf::cli {

using Json = nlohmann::ordered_json;

/// NaN and infinities become null.
Json number(double v);

Json ids(const std::vector<Index>& idx, const std::vector<FactorInfo>& factors);
Json selection_json(const SelectionResult& r, const std::vector<FactorInfo>& factors);
Json window_json(const Window& w);
Json window_report_json(const WindowReport& r);
Json sweep_manifest(const SweepResult& result, const RunConfig& cfg, const std::string& csv_name);
Json truth_json(const SynthMarket& market);
Json calibration_json(const CalibrationReport& report, const std::vector<RateEstimate>& ladder);

void write_json(const Json& j, const std::string& path);

}  // namespace amf::cli
