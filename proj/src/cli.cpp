#include "subsector/cli.hpp"

#include "subsector/anticorr.hpp"
#include "subsector/errors.hpp"
#include "subsector/rmt.hpp"
#include "subsector/sectors.hpp"
#include "subsector/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>

namespace subsector {

namespace {

constexpr const char* kToolName = "subsector";
constexpr const char* kToolVersion = "1.0.0";

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::numerical ? kExitNumerical : kExitData;
}

int guarded(std::ostream& log, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    log << "error: malformed JSON: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitData;
  }
}

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

template <typename Writer>
void write_text(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  writer(out);
}

std::filesystem::path sidecar_for(const std::filesystem::path& grid) {
  auto side = grid;
  side.replace_extension(".json");
  return side;
}

std::optional<CategoryMap> read_metadata(const AnalysisConfig& config, std::ostream& log) {
  if (!config.metadata) return std::nullopt;
  if (!std::filesystem::exists(*config.metadata)) {
    log << "warning: metadata file '" << config.metadata->string()
        << "' not found; categories reported as " << kUnlabeled << '\n';
    return std::nullopt;
  }
  return load_metadata(*config.metadata);
}

Json spectrum_report(const AnalysisConfig& config, const PipelineResult& r) {
  const auto law = mp_bounds(aspect_ratio(r.spectrum));
  const auto significant = significant_eigenvalues(r.spectrum, config.margin);
  const std::span<const double> values(r.spectrum.eigenvalues.data(),
                                       static_cast<std::size_t>(r.spectrum.eigenvalues.size()));
  Json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["config"] = provenance(config, "analyze");
  j["n_assets"] = r.spectrum.n_assets();
  j["n_observations"] = r.spectrum.n_observations;
  j["n_dates"] = r.panel.n_dates();
  j["first_date"] = format_date(r.panel.dates.front());
  j["last_date"] = format_date(r.panel.dates.back());
  j["wishart"] = to_json(law);
  j["lambda_min_real"] = r.spectrum.eigenvalues(r.spectrum.eigenvalues.size() - 1);
  j["leading_eigenvalues"] = std::vector<double>(
      values.begin(), values.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(3, values.size())));
  j["mean_offdiagonal"] = mean_offdiagonal(r.correlation);
  j["significant"] = to_json(significant);
  j["bulk"] = {{"fraction_outside", fraction_outside(values, law)},
               {"ks_distance", ks_distance(values, law)}};
  j["dropped_assets"] = {{"common_range", r.dropped_range},
                         {"zero_variance", r.dropped_zero_variance}};
  j["assets"] = r.spectrum.assets;
  j["eigenvalues"] = std::vector<double>(values.begin(), values.end());
  return j;
}

void add_common(CLI::App* cmd, AnalysisConfig& c) {
  cmd->add_option("--input", c.inputs, "Price file(s); repeat to merge panels");
  cmd->add_option("--format", c.format, "Input layout")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, PanelFormat>{{"long", PanelFormat::long_format},
                                             {"wide", PanelFormat::wide_format}},
          CLI::ignore_case));
  cmd->add_option("--delta-t", c.delta_t, "Return horizon in trading days")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--u-c", c.thresholds, "Component threshold u_c (repeatable)");
  cmd->add_option("--margin", c.margin, "Detection margin over lambda_max")->check(CLI::Range(1.0, 1e9));
  cmd->add_option("--trials", c.trials, "Random-baseline trials")->check(CLI::Range(100, 100000000));
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--metadata", c.metadata, "asset,category file");
  cmd->add_option("--out-dir", c.out_dir, "Output directory");
  cmd->add_option("--shift-rule", c.shift_rules, "Calendar shift, e.g. 'EGX30,TA100:sun->fri'");
  cmd->add_option("--common-range", c.common_range, "Leading-gap policy")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, CommonRangePolicy>{{"trim", CommonRangePolicy::trim_dates},
                                                   {"drop", CommonRangePolicy::drop_late_assets}},
          CLI::ignore_case));
  cmd->add_flag("--drop-zero-variance", c.drop_zero_variance, "Drop constant-return assets");
  cmd->add_flag("--include-market-mode", c.include_market_mode, "Scan mode 0 as well");
  cmd->add_flag("--u-c-zero-scan", c.u_c_zero_scan, "Repeat the scan with full eigenvectors");
}

std::optional<std::string> usage_problem(const AnalysisConfig& c, bool needs_input) {
  if (needs_input && c.inputs.empty()) return "--input is required";
  for (double t : c.thresholds) {
    if (!(t > 0.0)) return "--u-c values must be positive";
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> AnalysisConfig::effective_thresholds() const {
  std::vector<double> t = thresholds.empty() ? std::vector<double>{0.08, 0.10} : thresholds;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

Json provenance(const AnalysisConfig& config, const std::string& command) {
  Json j;
  j["command"] = command;
  Json inputs = Json::array();
  for (const auto& p : config.inputs) inputs.push_back(p.generic_string());
  j["inputs"] = std::move(inputs);
  j["format"] = config.format == PanelFormat::long_format ? "long" : "wide";
  j["delta_t"] = config.delta_t;
  j["thresholds"] = config.effective_thresholds();
  j["margin"] = config.margin;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["metadata"] = config.metadata ? Json(config.metadata->generic_string()) : Json(nullptr);
  j["correlation"] = config.correlation ? Json(config.correlation->generic_string()) : Json(nullptr);
  j["shift_rules"] = config.shift_rules;
  j["common_range"] = config.common_range == CommonRangePolicy::trim_dates ? "trim" : "drop";
  j["drop_zero_variance"] = config.drop_zero_variance;
  j["include_market_mode"] = config.include_market_mode;
  j["u_c_zero_scan"] = config.u_c_zero_scan;
  return j;
}

PipelineResult run_pipeline(const AnalysisConfig& config, std::ostream& log) {
  PriceSchema schema;
  schema.format = config.format;
  std::vector<PricePanel> panels;
  for (const auto& path : config.inputs) panels.push_back(load_prices(path, schema));
  PricePanel panel = merge_panels(panels);
  if (config.metadata && std::filesystem::exists(*config.metadata)) {
    for (const auto& [k, v] : load_metadata(*config.metadata)) panel.metadata[k] = v;
  }

  std::vector<ShiftRule> rules;
  for (const auto& text : config.shift_rules) rules.push_back(parse_shift_rule(text));
  panel = forward_fill(align_calendar(panel, rules));

  PipelineResult r;
  auto range = apply_common_range(panel, config.common_range);
  r.dropped_range = range.dropped_assets;
  r.panel = std::move(range.panel);
  for (const auto& a : r.dropped_range) {
    log << "warning: dropped '" << a << "' (starts after the first date)\n";
  }

  ReturnMatrix rm = log_returns(r.panel, config.delta_t);
  if (config.drop_zero_variance) {
    auto filtered = drop_zero_variance(rm);
    r.dropped_zero_variance = filtered.dropped_assets;
    rm = std::move(filtered.returns);
    for (const auto& a : r.dropped_zero_variance) {
      log << "warning: dropped '" << a << "' (zero return variance)\n";
    }
  }
  if (rm.n_assets() < 2) throw InsufficientDataError("fewer than two assets remain");
  r.returns = normalize_returns(rm);
  r.correlation = correlation_matrix(r.returns);
  r.spectrum = eigendecompose(r.correlation);
  return r;
}

int cmd_analyze(const AnalysisConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto r = run_pipeline(config, log);
    prepare_out_dir(config.out_dir);
    write_correlation(r.correlation, config.out_dir / "correlation.csv",
                      config.out_dir / "correlation.json");
    write_json_file(config.out_dir / "spectrum.json", spectrum_report(config, r));
    log << "analyze: N=" << r.spectrum.n_assets() << " T=" << r.spectrum.n_observations
        << " -> " << (config.out_dir / "spectrum.json").string() << '\n';
  });
}

int cmd_sectors(const AnalysisConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    EigenSpectrum spec;
    if (config.correlation) {
      spec = eigendecompose(read_correlation(*config.correlation, sidecar_for(*config.correlation)));
    } else {
      spec = run_pipeline(config, log).spectrum;
    }
    const auto metadata = read_metadata(config, log);
    const auto thresholds = config.effective_thresholds();
    const auto significant = significant_eigenvalues(spec, config.margin);
    const auto table = sector_table(spec, significant, thresholds, metadata ? &*metadata : nullptr);
    if (!thresholds.empty() && thresholds.front() <= noise_floor(spec.n_assets())) {
      log << "warning: u_c = " << thresholds.front() << " is not above 1/sqrt(N) = "
          << noise_floor(spec.n_assets()) << '\n';
    }

    prepare_out_dir(config.out_dir);
    Json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["config"] = provenance(config, "sectors");
    doc["significant"] = to_json(significant);
    doc["table"] = to_json(table);
    write_json_file(config.out_dir / "sectors.json", doc);
    write_text(config.out_dir / "sectors.csv", [&](std::ostream& out) { write_sector_csv(out, table); });
    log << "sectors: " << table.rows.size() << " rows -> "
        << (config.out_dir / "sectors.csv").string() << '\n';
  });
}

int cmd_anticorr(const AnalysisConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto r = run_pipeline(config, log);
    ScanOptions options;
    options.u_c = config.effective_thresholds().front();
    options.trials = config.trials;
    options.seed = config.seed;
    options.include_market_mode = config.include_market_mode;
    const auto report =
        anticorr_report(r.returns, r.correlation, r.spectrum, options, config.u_c_zero_scan);

    prepare_out_dir(config.out_dir);
    Json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["config"] = provenance(config, "anticorr");
    doc["report"] = to_json(report);
    write_json_file(config.out_dir / "anticorr.json", doc);
    write_text(config.out_dir / "anticorr_scan.csv",
               [&](std::ostream& out) { write_scan_csv(out, report.scan); });
    if (report.full_vector_scan) {
      write_text(config.out_dir / "anticorr_scan_uc0.csv",
                 [&](std::ostream& out) { write_scan_csv(out, *report.full_vector_scan); });
    }
    write_text(config.out_dir / "block_averages.csv",
               [&](std::ostream& out) { write_blocks_csv(out, report.blocks); });
    log << "anticorr: " << report.scan.rows.size() << " modes scanned -> "
        << (config.out_dir / "anticorr.json").string() << '\n';
  });
}

int cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::ostream& log) {
  return guarded(log, [&] {
    const auto spec = load_market_spec(spec_path);
    const auto market = generate(spec);
    const auto panel = to_price_panel(market, parse_date("2000-01-03"));

    prepare_out_dir(out_dir);
    write_text(out_dir / "panel.csv", [&](std::ostream& out) { write_wide(out, panel); });
    write_text(out_dir / "metadata.csv", [&](std::ostream& out) {
      out << "asset,category\n";
      for (const auto& [asset, category] : planted_categories(spec)) out << asset << ',' << category << '\n';
    });
    Json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["spec"] = to_json(spec);
    doc["ground_truth"] = to_json(market.ground_truth, market.raw.assets);
    write_json_file(out_dir / "ground_truth.json", doc);
    log << "synth: " << spec.n_assets << " assets x " << panel.n_dates() << " dates -> "
        << (out_dir / "panel.csv").string() << '\n';
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-matrix sector and subsector analysis of price panels", kToolName};
  app.require_subcommand(1);

  AnalysisConfig analyze_cfg, sectors_cfg, anticorr_cfg;
  auto* analyze = app.add_subcommand("analyze", "Spectrum, Wishart bounds and significant modes");
  add_common(analyze, analyze_cfg);
  auto* sectors = app.add_subcommand("sectors", "Positive/negative subsector tables");
  add_common(sectors, sectors_cfg);
  sectors->add_option("--correlation", sectors_cfg.correlation,
                      "correlation.csv written by analyze (sidecar .json alongside)");
  auto* anticorr = app.add_subcommand("anticorr", "Subsector anti-correlation scan");
  add_common(anticorr, anticorr_cfg);

  std::filesystem::path synth_spec, synth_out = ".";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic factor-model panel");
  synth->add_option("--spec", synth_spec, "Market spec (key = value)")->required();
  synth->add_option("--out-dir", synth_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto usage = [&](const std::string& msg) {
    err << "usage error: " << msg << '\n';
    return kExitUsage;
  };
  if (analyze->parsed()) {
    if (auto p = usage_problem(analyze_cfg, true)) return usage(*p);
    return cmd_analyze(analyze_cfg, err);
  }
  if (sectors->parsed()) {
    if (auto p = usage_problem(sectors_cfg, !sectors_cfg.correlation)) return usage(*p);
    return cmd_sectors(sectors_cfg, err);
  }
  if (anticorr->parsed()) {
    if (auto p = usage_problem(anticorr_cfg, true)) return usage(*p);
    return cmd_anticorr(anticorr_cfg, err);
  }
  return cmd_synth(synth_spec, synth_out, err);
}

}  // namespace subsector
