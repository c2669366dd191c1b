/*
 * Price ingestion, calendar repair and return normalization.
 *
 * Prices are held asset-major (N x D): row i is asset i, column d is date d.
 * Missing observations are NaN until forward_fill() repairs them.
 */
#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace subsector {

using Date = std::chrono::sys_days;
using CategoryMap = std::map<std::string, std::string>;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
/// Throws ArgumentError on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date date);

struct PricePanel {
  std::vector<Date> dates;
  std::vector<std::string> assets;
  Eigen::MatrixXd prices;  ///< N x D, NaN marks a missing cell
  CategoryMap metadata;
  /// Per-asset index of the first observed date. Filled by forward_fill().
  std::vector<std::size_t> first_valid;

  std::size_t n_assets() const { return assets.size(); }
  std::size_t n_dates() const { return dates.size(); }
  bool is_missing(std::size_t asset, std::size_t date) const;
  std::size_t missing_count() const;
  std::size_t asset_index(const std::string& name) const;  ///< throws ConfigError
};

/// Throws ValidationError unless dates are strictly increasing, the grid
/// matches the axes and every observed price is positive and finite.
void validate(const PricePanel& panel);

/// Returns R_i(t) = ln P_i(t + dt) - ln P_i(t), one row per asset.
struct ReturnMatrix {
  std::vector<std::string> assets;
  Eigen::MatrixXd returns;  ///< N x T
  std::size_t delta_t = 1;

  std::size_t n_assets() const { return static_cast<std::size_t>(returns.rows()); }
  std::size_t n_observations() const { return static_cast<std::size_t>(returns.cols()); }
};

struct NormalizedReturns {
  std::vector<std::string> assets;
  Eigen::MatrixXd returns;  ///< N x T, each row zero mean and unit population variance
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  std::size_t n_assets() const { return static_cast<std::size_t>(returns.rows()); }
  std::size_t n_observations() const { return static_cast<std::size_t>(returns.cols()); }
};

enum class PanelFormat { long_format, wide_format };

struct PriceSchema {
  PanelFormat format = PanelFormat::long_format;
  char delimiter = '\0';  ///< '\0' detects comma or tab from the header line
  std::string date_column = "date";
  std::string asset_column = "asset";  ///< long format only
  std::string price_column = "price";  ///< long format only
};

/// Reads a delimited price file. Absent cells (long format) and empty or
/// NA-like tokens (wide format) become missing. Dates are sorted ascending.
PricePanel load_prices(std::istream& in, const PriceSchema& schema);
PricePanel load_prices(const std::filesystem::path& path, const PriceSchema& schema);

/// Reads (asset, category) pairs. A leading "asset,category" header is skipped.
CategoryMap load_metadata(std::istream& in);
CategoryMap load_metadata(const std::filesystem::path& path);

/// Writes the panel in wide format (date column plus one column per asset).
void write_wide(std::ostream& out, const PricePanel& panel, char delimiter = ',');

/// Union of dates and assets of several panels. An asset may appear in only
/// one input.
PricePanel merge_panels(const std::vector<PricePanel>& panels);

struct ShiftRule {
  std::vector<std::string> assets;
  std::chrono::weekday from;
  std::chrono::weekday to;
};

/// Parses "A,B,C:sun->fri" style rules; weekday names are three-letter English.
ShiftRule parse_shift_rule(std::string_view text);

/// Moves observations of the listed assets from the source weekday to the
/// nearest preceding target weekday. When the target day is already observed
/// the target value wins and the shifted one is dropped.
PricePanel align_calendar(const PricePanel& panel, const std::vector<ShiftRule>& rules);

/// Fills each missing cell with the last observed price of that asset.
/// Leading gaps stay missing and are reported through `first_valid`.
PricePanel forward_fill(const PricePanel& panel);

enum class CommonRangePolicy {
  trim_dates,        ///< cut the date axis to where every asset is observed
  drop_late_assets,  ///< drop assets that start after the first date
};

struct RangeSelection {
  PricePanel panel;
  std::vector<std::string> dropped_assets;
};

RangeSelection apply_common_range(const PricePanel& filled, CommonRangePolicy policy);

ReturnMatrix log_returns(const PricePanel& panel, std::size_t delta_t = 1);

NormalizedReturns normalize_returns(const ReturnMatrix& rm);

struct VarianceFilter {
  ReturnMatrix returns;
  std::vector<std::string> dropped_assets;
};

/// Removes rows that normalize_returns() would reject.
VarianceFilter drop_zero_variance(const ReturnMatrix& rm);

}  // namespace subsector
