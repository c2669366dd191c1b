#include "subsector/report.hpp"

#include "subsector/errors.hpp"
#include "format.hpp"

#include <fstream>
#include <limits>
#include <ostream>

namespace subsector {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::ostream& csv_number(std::ostream& out, const std::optional<double>& v) {
  if (v) out << detail::Shortest{*v};
  return out;
}

Json scan_row(const ScanRow& row) {
  Json j;
  j["alpha"] = row.alpha;
  j["eigenvalue"] = row.eigenvalue;
  j["n_plus"] = row.n_plus;
  j["n_minus"] = row.n_minus;
  j["c_pm_raw"] = row.corr.raw;
  j["c_pm_pearson"] = optional_number(row.corr.pearson);
  j["baseline_mean"] = row.baseline.mean;
  j["baseline_std"] = row.baseline.stddev;
  j["baseline_trials"] = row.baseline.trials;
  j["baseline_undefined_trials"] = row.baseline.undefined_trials;
  j["baseline_seed"] = row.baseline.seed;
  j["baseline_z"] = optional_number(row.baseline_z);
  return j;
}

}  // namespace

Json to_json(const WishartLaw& law) {
  Json j;
  j["q"] = law.q;
  j["lambda_min"] = law.lambda_min;
  j["lambda_max"] = law.lambda_max;
  return j;
}

Json to_json(const SignificantSet& set) {
  Json j;
  j["margin"] = set.margin;
  j["threshold"] = set.threshold;
  Json modes = Json::array();
  for (std::size_t k = 0; k < set.indices.size(); ++k) {
    modes.push_back({{"alpha", set.indices[k]},
                     {"eigenvalue", set.eigenvalues[k]},
                     {"ratio_to_lambda_max", set.ratios[k]}});
  }
  j["modes"] = std::move(modes);
  return j;
}

Json to_json(const SectorTable& table) {
  Json j;
  j["sign_convention"] = table.sign_convention;
  j["thresholds"] = table.thresholds;
  j["excluded_modes"] = table.excluded_modes;
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    const auto& r = row.report;
    rows.push_back({{"mode", r.mode_index},
                    {"eigenvalue", row.eigenvalue},
                    {"threshold", r.threshold},
                    {"sign", to_string(r.side)},
                    {"category", r.dominant_category},
                    {"matched", r.matched},
                    {"total", r.total},
                    {"members", r.members}});
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const BlockAverages& blocks) {
  Json j;
  j["within_positive"] = optional_number(blocks.within_positive);
  j["within_negative"] = optional_number(blocks.within_negative);
  j["between"] = optional_number(blocks.between);
  return j;
}

Json to_json(const ModeScan& scan) {
  Json j;
  j["u_c"] = scan.options.u_c;
  j["trials"] = scan.options.trials;
  j["seed"] = scan.options.seed;
  j["include_market_mode"] = scan.options.include_market_mode;
  j["weighting"] = "magnitudes";
  Json rows = Json::array();
  for (const auto& row : scan.rows) rows.push_back(scan_row(row));
  j["rows"] = std::move(rows);
  j["skipped_modes"] = scan.skipped_modes;
  std::size_t defined = 0;
  for (const auto& row : scan.rows) defined += row.corr.pearson ? 1 : 0;
  j["trend_rank_correlation"] = defined >= 2 ? Json(scan_trend(scan)) : Json(nullptr);
  return j;
}

Json to_json(const AnticorrReport& report) {
  Json j;
  j["scan"] = to_json(report.scan);
  j["full_vector_scan"] = report.full_vector_scan ? to_json(*report.full_vector_scan) : Json(nullptr);
  Json blocks = Json::array();
  for (const auto& b : report.blocks) {
    Json e = to_json(b.averages);
    e["alpha"] = b.alpha;
    e["eigenvalue"] = b.eigenvalue;
    blocks.push_back(std::move(e));
  }
  j["block_averages"] = std::move(blocks);
  return j;
}

Json to_json(const MarketSpec& spec) {
  Json j;
  j["n_assets"] = spec.n_assets;
  j["n_observations"] = spec.n_observations;
  j["market_strength"] = spec.market_strength;
  j["noise_std"] = spec.noise_std;
  j["seed"] = spec.seed;
  Json blocks = Json::array();
  for (const auto& b : spec.blocks) {
    blocks.push_back({{"name", b.name}, {"assets", b.assets}, {"loading", b.loading}, {"signs", b.signs}});
  }
  j["blocks"] = std::move(blocks);
  return j;
}

Json to_json(const std::vector<PlantedFactor>& truth, std::span<const std::string> assets) {
  Json out = Json::array();
  auto names = [&](const std::vector<std::size_t>& idx) {
    Json a = Json::array();
    for (auto i : idx) a.push_back(assets[i]);
    return a;
  };
  for (const auto& f : truth) {
    out.push_back({{"factor", f.name}, {"positive", names(f.positive)}, {"negative", names(f.negative)}});
  }
  return out;
}

void write_scan_csv(std::ostream& out, const ModeScan& scan) {
  out << "alpha,c_pm_raw,c_pm_pearson,baseline_mean,baseline_std,eigenvalue,n_plus,n_minus,baseline_z\n";
  for (const auto& row : scan.rows) {
    out << row.alpha << ',' << detail::Shortest{row.corr.raw} << ',';
    csv_number(out, row.corr.pearson) << ',' << detail::Shortest{row.baseline.mean} << ','
                                      << detail::Shortest{row.baseline.stddev} << ','
                                      << detail::Shortest{row.eigenvalue} << ',' << row.n_plus << ','
                                      << row.n_minus << ',';
    csv_number(out, row.baseline_z) << '\n';
  }
}

void write_blocks_csv(std::ostream& out, const std::vector<ModeBlocks>& blocks) {
  out << "alpha,eigenvalue,within_positive,within_negative,between\n";
  for (const auto& b : blocks) {
    out << b.alpha << ',' << detail::Shortest{b.eigenvalue} << ',';
    csv_number(out, b.averages.within_positive) << ',';
    csv_number(out, b.averages.within_negative) << ',';
    csv_number(out, b.averages.between) << '\n';
  }
}

void write_sector_csv(std::ostream& out, const SectorTable& table) {
  out << "mode,eigenvalue,threshold,sign,category,matched,total,members\n";
  for (const auto& row : table.rows) {
    const auto& r = row.report;
    out << r.mode_index << ',' << detail::Shortest{row.eigenvalue} << ',' << detail::Shortest{r.threshold} << ',' << to_string(r.side)
        << ',' << r.dominant_category << ',' << r.matched << ',' << r.total << ',';
    for (std::size_t k = 0; k < r.members.size(); ++k) out << (k ? ";" : "") << r.members[k];
    out << '\n';
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace subsector
