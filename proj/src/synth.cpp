#include "subsector/synth.hpp"

#include "subsector/errors.hpp"
#include "subsector/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace subsector {

namespace {

constexpr std::uint64_t kMarketStream = 0;
constexpr std::uint64_t kBlockStream = 1;
constexpr std::uint64_t kNoiseStream = std::uint64_t{1} << 32;

Eigen::VectorXd normals(std::uint64_t seed, std::uint64_t stream, std::size_t n) {
  auto rng = substream(seed, stream);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (auto& x : out) x = dist(rng);
  return out;
}

int sign_of(const PlantedBlock& b, std::size_t k) { return b.signs.empty() ? 1 : b.signs[k]; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string_view key) {
  T value{};
  text = trim(text);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

PlantedBlock parse_block(std::string_view text, std::size_t line, std::size_t ordinal) {
  PlantedBlock block;
  block.name = "block" + std::to_string(ordinal);
  std::size_t start = 0, size = 0;
  std::optional<std::size_t> positive;
  bool have_start = false, have_size = false;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ParseError(line, "block field '" + token + "' lacks '='");
    const std::string key = token.substr(0, eq);
    const std::string_view value = std::string_view(token).substr(eq + 1);
    if (key == "name") {
      block.name = std::string(value);
    } else if (key == "start") {
      start = parse_number<std::size_t>(value, line, key);
      have_start = true;
    } else if (key == "size") {
      size = parse_number<std::size_t>(value, line, key);
      have_size = true;
    } else if (key == "loading") {
      block.loading = parse_number<double>(value, line, key);
    } else if (key == "positive") {
      positive = parse_number<std::size_t>(value, line, key);
    } else {
      throw ParseError(line, "unknown block field '" + key + "'");
    }
  }
  if (!have_start || !have_size) throw ParseError(line, "block needs start= and size=");
  if (positive && *positive > size) throw ParseError(line, "positive= exceeds size=");
  for (std::size_t k = 0; k < size; ++k) block.assets.push_back(start + k);
  if (positive) {
    for (std::size_t k = 0; k < size; ++k) block.signs.push_back(k < *positive ? 1 : -1);
  }
  return block;
}

}  // namespace

void validate(const MarketSpec& spec) {
  if (spec.n_assets < 2) throw ConfigError("n_assets must be at least 2");
  if (spec.n_observations < 2) throw ConfigError("n_observations must be at least 2");
  if (!std::isfinite(spec.market_strength) || spec.market_strength < 0.0) {
    throw ConfigError("market_strength must be finite and non-negative");
  }
  if (!std::isfinite(spec.noise_std) || spec.noise_std < 0.0) {
    throw ConfigError("noise_std must be finite and non-negative");
  }
  std::set<std::size_t> used;
  std::vector<double> variance(spec.n_assets,
                               spec.market_strength * spec.market_strength +
                                   spec.noise_std * spec.noise_std);
  for (const auto& b : spec.blocks) {
    if (!std::isfinite(b.loading)) throw ConfigError("block '" + b.name + "' has a non-finite loading");
    if (!b.signs.empty() && b.signs.size() != b.assets.size()) {
      throw ConfigError("block '" + b.name + "' sign pattern does not match its size");
    }
    for (std::size_t k = 0; k < b.assets.size(); ++k) {
      const auto i = b.assets[k];
      if (i >= spec.n_assets) throw ConfigError("block '" + b.name + "' references asset " + std::to_string(i));
      if (!used.insert(i).second) {
        throw ConfigError("blocks overlap at asset " + std::to_string(i));
      }
      const int s = sign_of(b, k);
      if (s != 1 && s != -1) throw ConfigError("block signs must be +1 or -1");
      variance[i] += b.loading * b.loading;
    }
  }
  for (std::size_t i = 0; i < spec.n_assets; ++i) {
    if (!(variance[i] > 0.0)) throw ConfigError("asset " + std::to_string(i) + " would have zero variance");
  }
}

std::string synthetic_asset_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "S%03zu", i);
  return buf;
}

SyntheticMarket generate(const MarketSpec& spec) {
  validate(spec);
  const auto N = static_cast<Eigen::Index>(spec.n_assets);
  const auto T = static_cast<Eigen::Index>(spec.n_observations);

  Eigen::MatrixXd R(N, T);
  for (Eigen::Index i = 0; i < N; ++i) {
    R.row(i) = spec.noise_std *
               normals(spec.seed, kNoiseStream + static_cast<std::uint64_t>(i), spec.n_observations)
                   .transpose();
  }
  SyntheticMarket market;
  if (spec.market_strength > 0.0) {
    const Eigen::RowVectorXd f0 =
        normals(spec.seed, kMarketStream, spec.n_observations).transpose();
    R.rowwise() += spec.market_strength * f0;
    PlantedFactor all{"market", {}, {}};
    for (std::size_t i = 0; i < spec.n_assets; ++i) all.positive.push_back(i);
    market.ground_truth.push_back(std::move(all));
  }
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const auto& block = spec.blocks[b];
    const Eigen::RowVectorXd f = normals(spec.seed, kBlockStream + b, spec.n_observations).transpose();
    PlantedFactor truth{block.name, {}, {}};
    for (std::size_t k = 0; k < block.assets.size(); ++k) {
      const auto i = block.assets[k];
      const int s = sign_of(block, k);
      R.row(static_cast<Eigen::Index>(i)) += (s * block.loading) * f;
      (s > 0 ? truth.positive : truth.negative).push_back(i);
    }
    std::sort(truth.positive.begin(), truth.positive.end());
    std::sort(truth.negative.begin(), truth.negative.end());
    market.ground_truth.push_back(std::move(truth));
  }

  market.raw.returns = std::move(R);
  market.raw.delta_t = 1;
  for (std::size_t i = 0; i < spec.n_assets; ++i) {
    market.raw.assets.push_back(synthetic_asset_name(i));
  }
  market.normalized = normalize_returns(market.raw);
  return market;
}

CorrelationMatrix population_correlation(const MarketSpec& spec) {
  validate(spec);
  const auto N = static_cast<Eigen::Index>(spec.n_assets);
  const double m2 = spec.market_strength * spec.market_strength;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(N, N, m2);
  cov.diagonal().array() += spec.noise_std * spec.noise_std;
  for (const auto& b : spec.blocks) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(N);
    for (std::size_t k = 0; k < b.assets.size(); ++k) {
      load(static_cast<Eigen::Index>(b.assets[k])) = sign_of(b, k) * b.loading;
    }
    cov += load * load.transpose();
  }
  const Eigen::VectorXd inv_sd = cov.diagonal().array().rsqrt();
  CorrelationMatrix c;
  c.values = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  c.values = 0.5 * (c.values + c.values.transpose()).eval();
  c.values.diagonal().setOnes();
  c.n_observations = spec.n_observations;
  for (std::size_t i = 0; i < spec.n_assets; ++i) c.assets.push_back(synthetic_asset_name(i));
  return c;
}

CategoryMap planted_categories(const MarketSpec& spec) {
  CategoryMap out;
  for (std::size_t i = 0; i < spec.n_assets; ++i) out[synthetic_asset_name(i)] = "noise";
  for (const auto& b : spec.blocks) {
    for (std::size_t k = 0; k < b.assets.size(); ++k) {
      out[synthetic_asset_name(b.assets[k])] = b.name + (sign_of(b, k) > 0 ? "+" : "-");
    }
  }
  return out;
}

PricePanel to_price_panel(const SyntheticMarket& market, Date start, double scale) {
  const auto N = market.raw.returns.rows();
  const auto T = market.raw.returns.cols();
  PricePanel panel;
  panel.assets = market.raw.assets;
  Date day = start;
  while (panel.dates.size() < static_cast<std::size_t>(T + 1)) {
    const std::chrono::weekday wd{day};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) panel.dates.push_back(day);
    day += std::chrono::days{1};
  }
  panel.prices.resize(N, T + 1);
  panel.prices.col(0).setConstant(100.0);
  for (Eigen::Index t = 0; t < T; ++t) {
    panel.prices.col(t + 1) =
        panel.prices.col(t).array() * (scale * market.raw.returns.col(t)).array().exp();
  }
  return panel;
}

MarketSpec parse_market_spec(std::istream& in) {
  MarketSpec spec;
  std::string raw;
  std::size_t line = 0;
  bool have_n = false, have_t = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text(raw);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (key == "n_assets") {
      spec.n_assets = parse_number<std::size_t>(value, line, key);
      have_n = true;
    } else if (key == "n_observations") {
      spec.n_observations = parse_number<std::size_t>(value, line, key);
      have_t = true;
    } else if (key == "market_strength") {
      spec.market_strength = parse_number<double>(value, line, key);
    } else if (key == "noise_std") {
      spec.noise_std = parse_number<double>(value, line, key);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(value, line, key);
    } else if (key == "block") {
      spec.blocks.push_back(parse_block(value, line, spec.blocks.size()));
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }
  if (!have_n || !have_t) throw ConfigError("market spec needs n_assets and n_observations");
  validate(spec);
  return spec;
}

MarketSpec load_market_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return parse_market_spec(in);
}

}  // namespace subsector
