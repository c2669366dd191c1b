#include "subsector/cli.hpp"
#include "subsector/rmt.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace subsector;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "subsector");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("subsector_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

void write_spec(const std::string& path) {
  std::ofstream(path) << "n_assets = 30\nn_observations = 600\nmarket_strength = 0.8\nseed = 9\n"
                         "block = name=pair start=5 size=12 loading=1.2 positive=6\n";
}

}  // namespace

TEST_CASE("synth then analyze reports the Wishart bounds of its own aspect ratio") {
  Scratch s("analyze");
  write_spec(s / "spec.txt");
  REQUIRE(cli({"synth", "--spec", s / "spec.txt", "--out-dir", s / "syn"}).code == 0);
  const auto r = cli({"analyze", "--input", s / "syn/panel.csv", "--format", "wide", "--out-dir", s / "out"});
  REQUIRE(r.code == 0);
  const auto j = read_json(s / "out/spectrum.json");
  CHECK(j["n_assets"] == 30);
  CHECK(j["n_observations"] == 600);
  const auto law = mp_bounds(600.0 / 30.0);
  CHECK(std::abs(j["wishart"]["lambda_min"].get<double>() - law.lambda_min) < 1e-10);
  CHECK(std::abs(j["wishart"]["lambda_max"].get<double>() - law.lambda_max) < 1e-10);
  CHECK(j["significant"]["modes"].size() == 2);
  CHECK(fs::exists(s / "out/correlation.csv"));
  CHECK(fs::exists(s / "out/correlation.json"));
  const auto gt = read_json(s / "syn/ground_truth.json");
  CHECK(gt["ground_truth"].size() == 2);
}

TEST_CASE("two-asset toy panel") {
  Scratch s("toy");
  std::ofstream(s / "toy.csv") << "date,asset,price\n"
                                  "2021-01-04,AAA,10\n2021-01-04,BBB,20\n"
                                  "2021-01-05,AAA,10.5\n2021-01-05,BBB,19\n"
                                  "2021-01-06,AAA,10.2\n2021-01-06,BBB,19.5\n"
                                  "2021-01-07,AAA,10.9\n2021-01-07,BBB,19.1\n";
  REQUIRE(cli({"analyze", "--input", s / "toy.csv", "--out-dir", s / "out"}).code == 0);
  const auto j = read_json(s / "out/spectrum.json");
  CHECK(j["n_assets"] == 2);
  CHECK(j["n_observations"] == 3);
  CHECK(j["eigenvalues"].size() == 2);
  CHECK(j["eigenvalues"][0].get<double>() + j["eigenvalues"][1].get<double>() ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constant-price asset") {
  Scratch s("const");
  std::ofstream f(s / "p.csv");
  f << "date,A,B,FLAT\n";
  const double a[] = {10, 11, 10.5, 10.7, 11.2}, b[] = {5, 4.9, 5.2, 5.1, 5.3};
  for (int d = 0; d < 5; ++d) f << "2021-02-0" << d + 1 << ',' << a[d] << ',' << b[d] << ",3\n";
  f.close();
  const auto plain = cli({"analyze", "--input", s / "p.csv", "--format", "wide", "--out-dir", s / "x"});
  CHECK(plain.code == kExitData);
  CHECK(plain.err.find("FLAT") != std::string::npos);

  const auto r = cli({"analyze", "--input", s / "p.csv", "--format", "wide", "--drop-zero-variance",
                      "--out-dir", s / "out"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  const auto j = read_json(s / "out/spectrum.json");
  CHECK(j["dropped_assets"]["zero_variance"] == nlohmann::json::array({"FLAT"}));
  CHECK(j["n_assets"] == 2);
}

TEST_CASE("sectors and anticorr outputs") {
  Scratch s("outputs");
  write_spec(s / "spec.txt");
  REQUIRE(cli({"synth", "--spec", s / "spec.txt", "--out-dir", s / "syn"}).code == 0);
  const std::string panel = s / "syn/panel.csv";

  SUBCASE("sectors with metadata") {
    REQUIRE(cli({"sectors", "--input", panel, "--format", "wide", "--metadata", s / "syn/metadata.csv",
                 "--out-dir", s / "sec"}).code == 0);
    const auto j = read_json(s / "sec/sectors.json");
    bool found_pair = false;
    for (const auto& row : j["table"]["rows"]) {
      const auto label = row["category"].get<std::string>();
      if (label == "pair+" || label == "pair-") found_pair = true;
    }
    CHECK(found_pair);
    CHECK(slurp(s / "sec/sectors.csv").rfind("mode,eigenvalue,threshold,sign,category", 0) == 0);
  }
  SUBCASE("missing metadata file degrades to Unlabeled") {
    const auto r = cli({"sectors", "--input", panel, "--format", "wide", "--metadata", s / "nope.csv",
                        "--out-dir", s / "sec"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    for (const auto& row : read_json(s / "sec/sectors.json")["table"]["rows"]) {
      CHECK(row["category"] == "Unlabeled");
    }
  }
  SUBCASE("sectors from a stored correlation matrix") {
    REQUIRE(cli({"analyze", "--input", panel, "--format", "wide", "--out-dir", s / "an"}).code == 0);
    REQUIRE(cli({"sectors", "--input", panel, "--format", "wide", "--out-dir", s / "inline"}).code == 0);
    REQUIRE(cli({"sectors", "--correlation", s / "an/correlation.csv", "--out-dir", s / "stored"}).code == 0);
    CHECK(read_json(s / "inline/sectors.json")["table"] == read_json(s / "stored/sectors.json")["table"]);
  }
  SUBCASE("anticorr") {
    REQUIRE(cli({"anticorr", "--input", panel, "--format", "wide", "--trials", "200", "--u-c-zero-scan",
                 "--out-dir", s / "ac"}).code == 0);
    CHECK(fs::exists(s / "ac/anticorr.json"));
    CHECK(fs::exists(s / "ac/anticorr_scan_uc0.csv"));
    CHECK(fs::exists(s / "ac/block_averages.csv"));
    const auto csv = slurp(s / "ac/anticorr_scan.csv");
    CHECK(csv.rfind("alpha,c_pm_raw,c_pm_pearson,baseline_mean,baseline_std", 0) == 0);
    const auto j = read_json(s / "ac/anticorr.json");
    CHECK(j["report"]["scan"]["rows"][0]["alpha"] == 1);
  }
}

TEST_CASE("identical runs produce byte-identical reports") {
  Scratch s("determinism");
  write_spec(s / "spec.txt");
  REQUIRE(cli({"synth", "--spec", s / "spec.txt", "--out-dir", s / "a"}).code == 0);
  REQUIRE(cli({"synth", "--spec", s / "spec.txt", "--out-dir", s / "b"}).code == 0);
  CHECK(slurp(s / "a/panel.csv") == slurp(s / "b/panel.csv"));
  for (const char* dir : {"r1", "r2"}) {
    REQUIRE(cli({"anticorr", "--input", s / "a/panel.csv", "--format", "wide", "--trials", "150",
                 "--seed", "4", "--out-dir", s / dir}).code == 0);
  }
  CHECK(slurp(s / "r1/anticorr.json") == slurp(s / "r2/anticorr.json"));
  CHECK(slurp(s / "r1/anticorr_scan.csv") == slurp(s / "r2/anticorr_scan.csv"));
}

TEST_CASE("exit codes") {
  Scratch s("codes");
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"analyze"}).code == kExitUsage);
  CHECK(cli({"analyze", "--input", "x.csv", "--trials", "5"}).code == kExitUsage);
  CHECK(cli({"analyze", "--input", "x.csv", "--u-c", "-0.1"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"analyze", "--input", s / "missing.csv", "--out-dir", s / "o"}).code == kExitData);
  std::ofstream(s / "bad.csv") << "date,asset,price\n2021-01-04,A,1\n2021-01-05,A\n";
  const auto r = cli({"analyze", "--input", s / "bad.csv", "--out-dir", s / "o"});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("line 3") != std::string::npos);
}
