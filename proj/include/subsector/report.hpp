/*
 * JSON and delimited-text emitters for analysis results. JSON objects keep
 * insertion order so identical inputs serialize to identical bytes.
 */
#pragma once

#include "subsector/anticorr.hpp"
#include "subsector/corrmatrix.hpp"
#include "subsector/rmt.hpp"
#include "subsector/sectors.hpp"
#include "subsector/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace subsector {

using Json = nlohmann::ordered_json;

Json to_json(const WishartLaw& law);
Json to_json(const SignificantSet& set);
Json to_json(const SectorTable& table);
Json to_json(const BlockAverages& blocks);
Json to_json(const ModeScan& scan);
Json to_json(const AnticorrReport& report);
Json to_json(const MarketSpec& spec);
Json to_json(const std::vector<PlantedFactor>& truth, std::span<const std::string> assets);

/// alpha, C+- raw, C+- pearson, baseline mean, baseline std (plus sizes and z).
void write_scan_csv(std::ostream& out, const ModeScan& scan);
void write_blocks_csv(std::ostream& out, const std::vector<ModeBlocks>& blocks);
void write_sector_csv(std::ostream& out, const SectorTable& table);

void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace subsector
