/*
 * Command-line orchestration: analyze, sectors, anticorr and synth.
 */
#pragma once

#include "subsector/corrmatrix.hpp"
#include "subsector/report.hpp"
#include "subsector/timeseries.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace subsector {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

struct AnalysisConfig {
  std::vector<std::filesystem::path> inputs;
  PanelFormat format = PanelFormat::long_format;
  std::size_t delta_t = 1;
  std::vector<double> thresholds;  ///< empty selects {0.08, 0.10}
  double margin = 1.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> metadata;
  std::optional<std::filesystem::path> correlation;  ///< prior analyze artifact
  std::filesystem::path out_dir = ".";
  std::vector<std::string> shift_rules;
  CommonRangePolicy common_range = CommonRangePolicy::trim_dates;
  bool drop_zero_variance = false;
  bool include_market_mode = false;
  bool u_c_zero_scan = false;

  std::vector<double> effective_thresholds() const;
};

/// The configuration as embedded in every report. The output directory is
/// left out so that reruns into different directories compare equal.
Json provenance(const AnalysisConfig& config, const std::string& command);

struct PipelineResult {
  PricePanel panel;  ///< repaired and trimmed
  std::vector<std::string> dropped_range;
  std::vector<std::string> dropped_zero_variance;
  NormalizedReturns returns;
  CorrelationMatrix correlation;
  EigenSpectrum spectrum;
};

/// load -> merge -> align -> forward fill -> common range -> returns ->
/// normalize -> correlate -> decompose.
PipelineResult run_pipeline(const AnalysisConfig& config, std::ostream& log);

int cmd_analyze(const AnalysisConfig& config, std::ostream& log);
int cmd_sectors(const AnalysisConfig& config, std::ostream& log);
int cmd_anticorr(const AnalysisConfig& config, std::ostream& log);
int cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::ostream& log);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace subsector
