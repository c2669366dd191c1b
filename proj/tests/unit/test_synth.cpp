#include "helpers.hpp"

#include "subsector/errors.hpp"
#include "subsector/rmt.hpp"
#include "subsector/sectors.hpp"
#include "subsector/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace subsector;
using namespace testing_support;

namespace {

MarketSpec split_block_spec(std::uint64_t seed, double loading = 1.0) {
  MarketSpec spec;
  spec.n_assets = 50;
  spec.n_observations = 2000;
  spec.seed = seed;
  PlantedBlock block{"pair", {}, loading, {}};
  for (std::size_t k = 0; k < 20; ++k) {
    block.assets.push_back(10 + k);
    block.signs.push_back(k < 10 ? 1 : -1);
  }
  spec.blocks = {block};
  return spec;
}

}  // namespace

TEST_CASE("null model is pure noise") {
  MarketSpec spec;
  spec.n_assets = 100;
  spec.n_observations = 1000;
  spec.seed = 3;
  const auto market = generate(spec);
  CHECK(market.ground_truth.empty());
  const auto s = eigendecompose(correlation_matrix(market.normalized));
  const auto law = mp_bounds(aspect_ratio(s));
  const std::span<const double> values(s.eigenvalues.data(), 100);
  CHECK(fraction_outside(values, law) <= 0.02);
  CHECK(ks_distance(values, law) < 0.05);
  CHECK(population_correlation(spec).values == Eigen::MatrixXd::Identity(100, 100));
}

TEST_CASE("a block over every asset produces a near-uniform market mode") {
  MarketSpec spec;
  spec.n_assets = 40;
  spec.n_observations = 2000;
  spec.seed = 8;
  PlantedBlock all{"all", {}, 3.0, {}};
  for (std::size_t i = 0; i < 40; ++i) all.assets.push_back(i);
  spec.blocks = {all};

  const auto pop = eigendecompose(population_correlation(spec));
  const double flat = 1.0 / std::sqrt(40.0);
  CHECK((pop.mode(0).array() - flat).abs().maxCoeff() < 1e-12);
  CHECK(pop.eigenvalues(0) == doctest::Approx(1.0 + 39.0 * 0.9).epsilon(1e-12));

  const auto s = eigendecompose(correlation_matrix(generate(spec).normalized));
  CHECK(s.eigenvalues(0) > 10.0 * s.eigenvalues(1));
  CHECK((s.mode(0).array() - flat).abs().maxCoeff() < 0.2 * flat);
  CHECK(single_signed(s.mode(0)));
}

TEST_CASE("a sign-split block is recovered by its mode") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto spec = split_block_spec(seed);
    const auto market = generate(spec);
    const auto s = eigendecompose(correlation_matrix(market.normalized));
    const auto sig = significant_eigenvalues(s);
    REQUIRE(sig.indices == std::vector<std::size_t>{0});
    const auto part = select_components(s, 0, 0.10);
    const auto& truth = market.ground_truth.front();
    const bool same = part.positive == truth.positive && part.negative == truth.negative;
    const bool swapped = part.positive == truth.negative && part.negative == truth.positive;
    CHECK((same || swapped));
  }
}

TEST_CASE("population_correlation") {
  SUBCASE("two-asset opposite-sign block") {
    for (double g : {0.5, 1.0, 2.0}) {
      for (double sigma : {0.5, 1.0}) {
        MarketSpec spec;
        spec.n_assets = 2;
        spec.n_observations = 10;
        spec.noise_std = sigma;
        spec.blocks = {PlantedBlock{"b", {0, 1}, g, {1, -1}}};
        const auto c = population_correlation(spec);
        CHECK(c.values(0, 1) == doctest::Approx(-g * g / (g * g + sigma * sigma)).epsilon(1e-14));
      }
    }
  }
  SUBCASE("always a valid correlation matrix") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto spec = split_block_spec(seed, 0.3 * static_cast<double>(seed));
      spec.market_strength = 0.1 * static_cast<double>(seed);
      spec.noise_std = 0.5;
      const auto c = population_correlation(spec);
      CHECK_NOTHROW(validate(c));
      CHECK(eigendecompose(c).eigenvalues.minCoeff() >= -1e-9);
    }
  }
  SUBCASE("finite samples converge at the 1/sqrt(T) rate") {
    auto spec = split_block_spec(5);
    spec.market_strength = 0.7;
    for (std::size_t t : {500u, 2000u, 8000u}) {
      spec.n_observations = t;
      const auto sample = correlation_matrix(generate(spec).normalized);
      const double err = (sample.values - population_correlation(spec).values).cwiseAbs().maxCoeff();
      CHECK(err < 5.0 / std::sqrt(static_cast<double>(t)));
    }
  }
}

TEST_CASE("generation is deterministic and seed-dependent") {
  const auto a = generate(split_block_spec(4));
  const auto b = generate(split_block_spec(4));
  const auto c = generate(split_block_spec(5));
  CHECK(a.raw.returns == b.raw.returns);
  CHECK(a.normalized.returns == b.normalized.returns);
  CHECK(a.raw.returns != c.raw.returns);
  CHECK(a.raw.assets.front() == "S000");

  // adding a block leaves the noise of untouched assets unchanged
  auto spec = split_block_spec(4);
  spec.blocks.push_back(PlantedBlock{"extra", {40, 41}, 1.0, {}});
  const auto d = generate(spec);
  CHECK(d.raw.returns.row(0) == a.raw.returns.row(0));
}

TEST_CASE("spec validation") {
  auto spec = split_block_spec(1);
  spec.blocks.push_back(PlantedBlock{"clash", {29, 30}, 1.0, {}});
  CHECK_THROWS_AS(generate(spec), ConfigError);

  spec = split_block_spec(1);
  spec.blocks.front().assets.back() = 50;
  CHECK_THROWS_AS(validate(spec), ConfigError);

  spec = split_block_spec(1);
  spec.blocks.front().signs.front() = 2;
  CHECK_THROWS_AS(validate(spec), ConfigError);

  spec = split_block_spec(1);
  spec.noise_std = 0.0;
  CHECK_THROWS_AS(validate(spec), ConfigError);
}

TEST_CASE("planted categories and price panels") {
  const auto spec = split_block_spec(2);
  const auto cats = planted_categories(spec);
  CHECK(cats.at("S010") == "pair+");
  CHECK(cats.at("S029") == "pair-");
  CHECK(cats.at("S000") == "noise");

  const auto market = generate(spec);
  const auto panel = to_price_panel(market, parse_date("2000-01-03"));
  CHECK(panel.n_dates() == 2001);
  for (const auto d : panel.dates) {
    const std::chrono::weekday wd{d};
    CHECK(wd != std::chrono::Saturday);
    CHECK(wd != std::chrono::Sunday);
  }
  const auto rm = log_returns(panel);
  CHECK((rm.returns - 0.01 * market.raw.returns).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("market spec files") {
  SUBCASE("full spec") {
    std::istringstream in(
        "# planted pair\n"
        "n_assets = 50\n"
        "n_observations = 2000\n"
        "market_strength = 0.5   # weak market\n"
        "seed = 42\n"
        "block = name=pair start=10 size=20 loading=1.0 positive=10\n");
    const auto spec = parse_market_spec(in);
    CHECK(spec.n_assets == 50);
    CHECK(spec.seed == 42);
    CHECK(spec.market_strength == 0.5);
    REQUIRE(spec.blocks.size() == 1);
    CHECK(spec.blocks[0].assets.front() == 10);
    CHECK(spec.blocks[0].signs[9] == 1);
    CHECK(spec.blocks[0].signs[10] == -1);
  }
  SUBCASE("syntax errors carry the line") {
    std::istringstream in("n_assets = 10\nn_observations = x\n");
    try {
      parse_market_spec(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::istringstream unknown("colour = blue\n");
    CHECK_THROWS_AS(parse_market_spec(unknown), ParseError);
    std::istringstream missing("n_assets = 10\n");
    CHECK_THROWS_AS(parse_market_spec(missing), ConfigError);
    std::istringstream overlap(
        "n_assets = 10\nn_observations = 20\nblock = start=0 size=5\nblock = start=4 size=2\n");
    CHECK_THROWS_AS(parse_market_spec(overlap), ConfigError);
  }
}
