/*
 * Synthetic factor-model markets with known sector structure.
 *
 *   R_i(t) = m f_0(t) + sum_b s_i g_b f_b(t) + sigma eps_i(t)
 *
 * with independent standard-normal factors and noise. s_i = +/-1 splits a
 * block into two halves that move against each other along f_b.
 */
#pragma once

#include "subsector/corrmatrix.hpp"
#include "subsector/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace subsector {

struct PlantedBlock {
  std::string name;
  std::vector<std::size_t> assets;
  double loading = 1.0;
  std::vector<int> signs;  ///< +1/-1 per asset; empty means all +1
};

struct MarketSpec {
  std::size_t n_assets = 0;
  std::size_t n_observations = 0;
  double market_strength = 0.0;
  std::vector<PlantedBlock> blocks;
  double noise_std = 1.0;
  std::uint64_t seed = 1;
};

/// Throws ConfigError for overlapping blocks, out-of-range assets, bad signs,
/// non-finite loadings or an asset that would have zero variance.
void validate(const MarketSpec& spec);

struct PlantedFactor {
  std::string name;
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
};

struct SyntheticMarket {
  ReturnMatrix raw;
  NormalizedReturns normalized;
  std::vector<PlantedFactor> ground_truth;  ///< market factor first when present
};

std::string synthetic_asset_name(std::size_t i);

/// Deterministic in the seed: each factor and each asset's noise draws from
/// its own substream.
SyntheticMarket generate(const MarketSpec& spec);

/// The T -> infinity correlation matrix of the factor model.
CorrelationMatrix population_correlation(const MarketSpec& spec);

/// Category per asset: "<block>+" / "<block>-" for block members, "noise"
/// otherwise.
CategoryMap planted_categories(const MarketSpec& spec);

/// Prices P(0) = 100, P(t+1) = P(t) exp(scale R(t)) on consecutive weekdays
/// from `start`. Log returns of the result reproduce scale * raw returns.
PricePanel to_price_panel(const SyntheticMarket& market, Date start, double scale = 0.01);

/// key = value lines; '#' starts a comment. Keys: n_assets, n_observations,
/// market_strength, noise_std, seed and repeatable
///   block = name=<id> start=<i> size=<n> loading=<g> [positive=<k>]
/// where the first k assets of the block get sign +1 and the rest -1.
MarketSpec parse_market_spec(std::istream& in);
MarketSpec load_market_spec(const std::filesystem::path& path);

}  // namespace subsector
