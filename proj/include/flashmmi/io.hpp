#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "flashmmi/channel.hpp"
#include "flashmmi/degree_distribution.hpp"
#include "flashmmi/harness.hpp"
#include "flashmmi/ldpc.hpp"
#include "flashmmi/mi.hpp"
#include "flashmmi/quantopt.hpp"

namespace flashmmi {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

Json to_json(const ChannelModel& model);
Json to_json(const Dmc& dmc, const BitLabeling& labeling);
Json to_json(const QuantizationScheme& scheme);
Json to_json(const DegreeDistribution& dd);
Json to_json(const CodeMetadata& meta);
Json to_json(const SimConfig& cfg);
Json to_json(const SimResult& result);

ChannelSpec channel_spec_from_json(const Json& j);
QuantSpec quant_spec_from_json(const Json& j);
CodeSpec code_spec_from_json(const Json& j);
SimConfig sim_config_from_json(const Json& j);
SimResult sim_result_from_json(const Json& j);
DegreeDistribution degree_distribution_from_json(const Json& j);
QuantizationScheme scheme_from_json(const Json& j);

/// Numeric CSV: '#' lines are comments, a non-numeric first row is a header.
std::vector<std::vector<double>> read_numeric_csv(std::istream& is);

/// Levels from a density table with columns v, f_0, ..., f_{M-1}.
std::vector<LevelDensity> tabulated_levels_from_csv(const std::string& path);

/// 16-hex-digit FNV-1a hash of the compact JSON dump.
std::string config_hash(const Json& j);

/// One CSV row per SimResult.
std::string sim_csv_header();
std::string sim_csv_row(const SimResult& r);

/// Number formatted with the given significant digits.
std::string fmt(double x, int digits = 9);

}  // namespace flashmmi
